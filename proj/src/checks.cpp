#include "lmfmm/checks.hpp"

#include <algorithm>
#include <cstdarg>
#include <cstdio>
#include <random>

#include "json.hpp"
#include "lmfmm/dcim.hpp"
#include "lmfmm/oracle.hpp"
#include "lmfmm/sommerfeld.hpp"
#include "lmfmm/special.hpp"
#include "lmfmm/taylor.hpp"

namespace lmfmm {

namespace {

std::string fmt(const char *f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char *f, ...) {
  char buf[256];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

CheckResult make(std::string name, double value, double reference, double err, double tol) {
  CheckResult c;
  c.check = std::move(name);
  c.value = value;
  c.reference = reference;
  c.error = err;
  c.tolerance = tol;
  c.pass = std::isfinite(err) && err <= tol;
  return c;
}

std::string case_tag(const GoldenCase &g, int idx) {
  return fmt("point%d(%d,%d,%d)", idx < 5 ? 1 : 2, g.k3, g.k3p, g.s);
}

double rel_diff(cplx a, cplx b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace

LayeredMedium golden_medium() { return LayeredMedium({0.0, -2.0}, {0.8, 1.5, 2.0}); }

const std::vector<GoldenCase> &golden_cases() {
  static const std::vector<GoldenCase> cases = [] {
    const Vec3 r1{0.5, 1.0, -0.5}, rp1{0.3, 1.3, -0.5};
    const Vec3 r2{0.6, 0.3, -1.2}, rp2{0.5, 1.0, -0.5};
    return std::vector<GoldenCase>{
        {r1, rp1, 0, 0, 0, {0.0636386627264339, 0.00236214962912961}},
        {r1, rp1, 3, 4, 0, {0.00474777580070183, -0.00126663970537548}},
        {r1, rp1, 8, 8, 0, {-7.40635683599036e-10, 1.3083718652325e-06}},
        {r1, rp1, 0, 0, 4, {-1.77276908208051e-06, -1.50190394931086e-06}},
        {r1, rp1, 0, 0, 8, {1.61980348471514e-11, -2.87922306729206e-13}},
        {r2, rp2, 0, 0, 0, {0.0470021533117637, -0.0655662374392812}},
        {r2, rp2, 3, 4, 0, {0.00185695910047338, -0.00407200441147604}},
        {r2, rp2, 8, 8, 0, {5.85835080649916e-09, -5.8052078071366e-05}},
        {r2, rp2, 0, 0, 4, {-1.71372127668556e-05, 0.000103591338132027}},
        {r2, rp2, 0, 0, 8, {-1.26729956194435e-07, 5.90666673167792e-08}},
    };
  }();
  return cases;
}

std::vector<CheckResult> check_golden_quadrature(double rel_tol) {
  const LayeredMedium m = golden_medium();
  std::vector<CheckResult> out;
  const auto &cases = golden_cases();
  for (size_t i = 0; i < cases.size(); ++i) {
    const GoldenCase &g = cases[i];
    ContourOptions o;
    o.gap = vertical_gap(m, 1, 1, Direction::Up, g.r.z, g.rp.z);
    o.power = 1 + g.k3 + g.k3p + g.s;
    o.rho_max = 1.0;
    const ContourSpec c = build_contour(m, 1e-16, o);
    const cplx v = eval_scattered_derivative(m, 1, 1, g.r, g.rp, Direction::Up, g.s, g.k3, g.k3p, c).value;
    const std::string tag = "golden_quadrature " + case_tag(g, int(i));
    out.push_back(make(tag + " re", v.real(), g.ref.real(), std::abs(v.real() - g.ref.real()) / std::abs(g.ref.real()),
                       rel_tol));
    out.push_back(make(tag + " im", v.imag(), g.ref.imag(), std::abs(v.imag() - g.ref.imag()) / std::abs(g.ref.imag()),
                       rel_tol));
  }
  return out;
}

std::vector<CheckResult> check_golden_dcim(double abs_tol, double fit_tol) {
  const LayeredMedium m = golden_medium();
  const DcimPath path = default_dcim_path(m, 1);
  const double k1 = m.k(1);
  std::vector<CheckResult> out;
  const auto &cases = golden_cases();
  for (size_t i = 0; i < cases.size(); ++i) {
    const GoldenCase &g = cases[i];
    const DcimImageSet set = two_level_dcim(m, 1, 1, g.k3p, g.rp.z, kGoldenAnchor, path, fit_tol);
    const std::vector<cplx> a = eval_image_derivatives(set, k1, g.r, g.rp, g.k3 + g.s);
    // (dx + i dy)^s = sum_j C(s, j) i^j dx^{s-j} dy^j; a holds D^k / k!.
    cplx v = 0.0;
    for (int j = 0; j <= g.s; ++j)
      v += binomial(g.s, j) * std::pow(I, j) * factorial(g.s - j) * factorial(j) * factorial(g.k3) *
           a[mi_index(g.s - j, j, g.k3)];
    v /= factorial(g.s) * factorial(g.k3);
    const std::string tag = "golden_dcim " + case_tag(g, int(i));
    out.push_back(make(tag + " re", v.real(), g.ref.real(), std::abs(v.real() - g.ref.real()), abs_tol));
    out.push_back(make(tag + " im", v.imag(), g.ref.imag(), std::abs(v.imag() - g.ref.imag()), abs_tol));
  }
  return out;
}

std::vector<CheckResult> check_sommerfeld_identity(int probes, uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uk(0.5, 3.0), uz(0.3, 2.0), urho(0.0, 2.0), uphi(0.0, 2.0 * PI);
  std::vector<CheckResult> out;
  for (int i = 0; i < probes; ++i) {
    const double k = uk(rng), z = (i % 2 ? -1.0 : 1.0) * uz(rng), rho = urho(rng), phi = uphi(rng);
    const Vec3 r{rho * std::cos(phi), rho * std::sin(phi), z};
    ContourOptions o;
    o.gap = std::abs(z);
    o.power = 1;
    o.rho_max = std::max(rho, 1.0);
    const LayeredMedium hom({0.0}, {k, k});
    const ContourSpec c = build_contour(hom, 1e-16, o);
    const double res = verify_sommerfeld_identity(k, r, c);
    out.push_back(make(fmt("sommerfeld_identity k=%.4f r=(%.4f,%.4f,%.4f)", k, r.x, r.y, r.z), res, 0.0, res, tol));
  }
  return out;
}

std::vector<CheckResult> check_spectral_equivalence(int points, uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const LayeredMedium two({0.0}, {0.8, 1.5});
  const LayeredMedium three = golden_medium();
  std::vector<CheckResult> out;
  for (const LayeredMedium *m : {&two, &three}) {
    const double b = 0.5 * m->k_min(), xmax = 3.0 * m->k_max();
    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
      // alternate between the imaginary-axis leg and the shifted horizontal leg of the contour
      const cplx krho = (i % 2 == 0) ? cplx(0.0, -b * u(rng)) : cplx(xmax * u(rng), -b);
      for (int l = 0; l < m->num_layers(); ++l)
        for (int lp = 0; lp < m->num_layers(); ++lp) {
          const ReactionCoeffs g = solve_reaction_coeffs_general(*m, l, lp, krho);
          const ReactionCoeffs c =
              m->num_interfaces() == 1 ? closed_form_two_layer(*m, l, lp, krho) : closed_form_three_layer(*m, l, lp, krho);
          for (auto [x, y] : {std::pair{g.uu, c.uu}, {g.ud, c.ud}, {g.du, c.du}, {g.dd, c.dd}})
            worst = std::max(worst, rel_diff(x, y));
        }
    }
    out.push_back(make(fmt("spectral_equivalence %d-layer (%d points)", m->num_layers(), points), worst, 0.0, worst,
                       tol));
  }
  return out;
}

std::vector<CheckResult> check_kappa_identities(int points, uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const LayeredMedium m = golden_medium();
  const double b = 0.5 * m.k_min(), xmax = 3.0 * m.k_max();
  double den = 0.0, pair = 0.0;
  for (int i = 0; i < points; ++i) {
    const cplx krho = (i % 2 == 0) ? cplx(0.0, -b * u(rng)) : cplx(xmax * u(rng), -b);
    const double zp = m.depth(1) + (m.depth(0) - m.depth(1)) * (0.05 + 0.9 * u(rng));
    const ThreeLayerKappas K = three_layer_kappas(m, krho, zp);
    den = std::max(den, rel_diff(K.den_top, K.den_bottom));
    // kappa22 is fixed by the sum/difference pair (k0 k0z +- k1 k1z) e^{+- i k1z z'}.
    const cplx a0 = m.k(0) * vertical_wavenumber(m.k(0), krho), a1 = m.k(1) * vertical_wavenumber(m.k(1), krho);
    const cplx k1z = vertical_wavenumber(m.k(1), krho);
    const double z = zp - m.depth(0);
    const cplx sum = (a0 + a1) * std::exp(I * k1z * z), dif = (a0 - a1) * std::exp(-I * k1z * z);
    pair = std::max(pair, rel_diff(K.k22, 0.5 * (sum - dif)));
  }
  return {make(fmt("kappa_denominator_identity (%d points)", points), den, 0.0, den, tol),
          make(fmt("kappa22_sum_difference_pair (%d points)", points), pair, 0.0, pair, tol)};
}

std::vector<CheckResult> check_nonsym_vs_fd(int max_order, double tol) {
  const double k = 1.5;
  const std::vector<Vec3> probes{{0.2, -0.3, 0.7}, {1.1, 0.4, -0.9}, {0.3, 0.2, 0.25}, {2.0, 1.0, 1.5}};
  std::vector<CheckResult> out;
  for (const Vec3 &o : probes) {
    const std::vector<cplx> a = nonsym_derivs(k, CVec3{o.x, o.y, o.z}, max_order);
    const ScalarField f = [k](const Vec3 &r) { return hankel0(k * norm(r)); };
    std::vector<double> order_max(max_order + 1, 0.0);
    for (const auto &mi : mi_list(max_order))
      order_max[mi[0] + mi[1] + mi[2]] = std::max(order_max[mi[0] + mi[1] + mi[2]], std::abs(a[mi_index(mi[0], mi[1], mi[2])]));
    double worst = 0.0;
    for (const auto &mi : mi_list(max_order)) {
      const int n = mi[0] + mi[1] + mi[2];
      if (n == 0) continue;
      const cplx fd = finite_difference(f, o, mi, 0.0, norm(o)) / (factorial(mi[0]) * factorial(mi[1]) * factorial(mi[2]));
      worst = std::max(worst, std::abs(fd - a[mi_index(mi[0], mi[1], mi[2])]) / order_max[n]);
    }
    out.push_back(make(fmt("nonsym_recurrence_vs_fd r=(%.2f,%.2f,%.2f) orders<=%d", o.x, o.y, o.z, max_order), worst, 0.0,
                       worst, tol));
  }
  return out;
}

std::vector<CheckResult> check_ladder_special_case(int n_max, double tol) {
  const double k = 1.3;
  const Vec3 off{0.4, -0.7, 0.9};
  const std::vector<cplx> Om = omega_table(k, off, n_max + 1);
  auto at = [&](int n, int m) { return Om[n * n + n + m]; };
  std::vector<CheckResult> out;
  for (int n = 0; n <= n_max; ++n)
    for (int m : n == 0 ? std::vector<int>{0} : std::vector<int>{n, -n}) {
      double A = 0.0, B = 0.0;
      ladder_step(Ladder::Zero, n, m, A, B);
      cplx lhs = A * at(n + 1, m);
      if (std::abs(m) <= n - 1) lhs += B * at(n - 1, m);
      const cplx rhs = at(n + 1, m) / std::sqrt(2.0 * n + 3.0);
      const double e = std::abs(lhs - rhs) / std::abs(rhs);
      out.push_back(make(fmt("ladder_D0_special_case n=%d m=%d", n, m), e, 0.0, e, tol));
    }
  return out;
}

std::vector<CheckResult> check_gpof_roundtrip(double tol) {
  const std::vector<cplx> c{{1.0, 0.5}, {-0.7, 0.2}, {0.3, -0.4}};
  const std::vector<cplx> s{{-0.5, 2.0}, {-1.3, -0.7}, {-0.2, 0.3}};
  const int N = 101;
  const double T = 5.0, dt = T / (N - 1);
  auto exact = [&](double t) {
    cplx v = 0.0;
    for (size_t j = 0; j < c.size(); ++j) v += c[j] * std::exp(s[j] * t);
    return v;
  };
  std::vector<cplx> y(N);
  for (int i = 0; i < N; ++i) y[i] = exact(i * dt);
  const ExpModel fit = gpof_fit(y, dt, 1e-13, 10);
  double worst = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double t = (i + 0.37) * T / 400.0;
    worst = std::max(worst, std::abs(eval_exp_model(fit, t) - exact(t)));
  }
  return {make(fmt("gpof_roundtrip (%zu terms recovered)", fit.size()), worst, 0.0, worst, tol)};
}

std::vector<CheckResult> check_sym_nonsym(int P, double tol) {
  const double k = 1.5;
  const std::vector<Vec3> probes{{0.2, -0.3, 0.7}, {1.1, 0.4, -0.9}, {-0.6, 0.8, 0.3}};
  std::vector<CheckResult> out;
  for (const Vec3 &o : probes) {
    const std::vector<cplx> D = sym_derivs(k, o, P);
    const std::vector<cplx> Dn = sym_from_nonsym(nonsym_derivs(k, CVec3{o.x, o.y, o.z}, P), P);
    const auto &list = sym_list(P);
    std::vector<double> order_max(P + 1, 0.0);
    for (size_t i = 0; i < list.size(); ++i) order_max[list[i][0]] = std::max(order_max[list[i][0]], std::abs(Dn[i]));
    double worst = 0.0;
    for (size_t i = 0; i < list.size(); ++i) worst = std::max(worst, std::abs(D[i] - Dn[i]) / order_max[list[i][0]]);
    out.push_back(make(fmt("sym_vs_nonsym r=(%.2f,%.2f,%.2f) order<=%d", o.x, o.y, o.z, P), worst, 0.0, worst, tol));
  }
  return out;
}

std::vector<CheckResult> run_verify_suite() {
  std::vector<CheckResult> all;
  auto add = [&](std::vector<CheckResult> v) { all.insert(all.end(), v.begin(), v.end()); };
  add(check_golden_quadrature());
  add(check_golden_dcim());
  add(check_sommerfeld_identity());
  add(check_spectral_equivalence());
  add(check_kappa_identities());
  add(check_nonsym_vs_fd());
  add(check_ladder_special_case());
  add(check_gpof_roundtrip());
  add(check_sym_nonsym());
  return all;
}

bool all_pass(const std::vector<CheckResult> &r) {
  return !r.empty() && std::all_of(r.begin(), r.end(), [](const CheckResult &c) { return c.pass; });
}

double worst_ratio(const std::vector<CheckResult> &r) {
  double w = 0.0;
  for (const auto &c : r) w = std::max(w, std::isfinite(c.error) ? c.error / c.tolerance : INFINITY);
  return w;
}

std::string checks_to_json(const std::vector<CheckResult> &r) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto &c : r)
    a.push_back({{"check", c.check},
                 {"status", c.pass ? "PASS" : "FAIL"},
                 {"value", c.value},
                 {"reference", c.reference},
                 {"tolerance", c.tolerance},
                 {"error", c.error}});
  return a.dump(2);
}

}  // namespace lmfmm
