// Contour construction, scattered Green's function quadrature and table integrals.

#include <cmath>

#include "doctest.h"
#include "lmfmm/checks.hpp"
#include "lmfmm/sommerfeld.hpp"

using namespace lmfmm;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

ContourSpec contour_for(const LayeredMedium &m, double gap, int power, double rho_max, double tol = 1e-14) {
  ContourOptions o;
  o.gap = gap;
  o.power = power;
  o.rho_max = rho_max;
  return build_contour(m, tol, o);
}

}  // namespace

TEST_CASE("contour shape and truncation") {
  const LayeredMedium m({0.0}, {0.8, 1.5});
  const ContourSpec c = contour_for(m, 0.5, 0, 1.0, 1e-12);
  CHECK(c.b == doctest::Approx(0.4));
  // the envelope e^{-gap t} has fallen below tol at t_max
  CHECK(std::exp(-0.5 * c.t_max) <= 1e-12 * 1.0000001);
  REQUIRE_FALSE(c.segments.empty());
  CHECK(std::abs(c.segments.front().start) < 1e-15);
  for (const auto &s : c.segments) CHECK(s.end.imag() <= 0.0);
  const QuadRule r = make_rule(c);
  for (size_t i = 0; i < r.size(); ++i) CHECK(r.x[i].imag() < 0.0);
  // t_max shrinks as the decay gap grows
  double prev = 1e300;
  for (double gap : {0.1, 0.3, 1.0, 3.0}) {
    const double t = contour_for(m, gap, 2, 1.0).t_max;
    CHECK(t < prev);
    prev = t;
  }
}

TEST_CASE("Sommerfeld identity at fixed probes") {
  struct Probe {
    double k;
    Vec3 r;
  };
  for (const Probe &p : {Probe{1.0, {0.3, 0.4, 0.5}}, Probe{2.0, {1.0, 0.0, -0.2}}, Probe{0.8, {0.0, 0.0, 1.5}}}) {
    const LayeredMedium hom({0.0}, {p.k, p.k});
    const ContourSpec c = contour_for(hom, std::abs(p.r.z), 1, std::max(1.0, std::hypot(p.r.x, p.r.y)), 1e-16);
    CHECK(verify_sommerfeld_identity(p.k, p.r, c) < 1e-10);
  }
  for (const auto &c : check_sommerfeld_identity()) {
    INFO(c.check);
    CHECK(c.pass);
  }
}

TEST_CASE("golden derivative values by quadrature") {
  for (const auto &c : check_golden_quadrature(1e-6)) {
    INFO(c.check << " value " << c.value << " reference " << c.reference);
    CHECK(c.pass);
  }
}

TEST_CASE("down-going component vanishes in the top layer") {
  const LayeredMedium m({0.0, -2.0}, {0.8, 1.5, 2.0});
  const ContourSpec c = contour_for(m, 1.0, 1, 1.0);
  const auto v = eval_scattered_green(m, 0, 1, {0.1, 0.2, 0.5}, {0.0, 0.0, -1.0}, Direction::Down, c);
  CHECK(std::abs(v.value) == 0.0);
  const auto w = eval_scattered_green(m, 2, 1, {0.1, 0.2, -2.5}, {0.0, 0.0, -1.0}, Direction::Up, c);
  CHECK(std::abs(w.value) == 0.0);
}

TEST_CASE("derivative of order zero equals the scattered Green's function") {
  const LayeredMedium m = golden_medium();
  const Vec3 r{0.3, -0.2, -0.4}, rp{-0.1, 0.25, -1.2};
  for (Direction dir : {Direction::Up, Direction::Down}) {
    const ContourSpec c =
        contour_for(m, vertical_gap(m, 1, 1, dir, r.z, rp.z), 1, std::hypot(r.x - rp.x, r.y - rp.y) + 1.0);
    const cplx g = eval_scattered_green(m, 1, 1, r, rp, dir, c).value;
    CHECK(rel(eval_scattered_derivative(m, 1, 1, r, rp, dir, 0, 0, 0, c).value, g) < 1e-12);
    CHECK(rel(eval_scattered_mixed(m, 1, 1, r, rp, dir, 0, 0, 0, 0, c).value, g) < 1e-12);
    const double rho = std::hypot(r.x - rp.x, r.y - rp.y);
    CHECK(rel(eval_table_integral(m, 1, 1, dir, 0, 0, 0, 0, rho, r.z, rp.z, c).value, g) < 1e-12);
  }
}

TEST_CASE("table integrals match mixed derivatives through the phase formula") {
  // (dx - i dy)^s (dx + i dy)^{M-s} dz^n dz'^n' u = (-1)^{M-s} 2^M M! n! n'! e^{i(M-2s)phi} S^{M s}_{n n'}
  const LayeredMedium m = golden_medium();
  const Vec3 r{0.35, -0.15, -0.3}, rp{-0.2, 0.3, -0.5};
  const double rho = std::hypot(r.x - rp.x, r.y - rp.y), phi = std::atan2(r.y - rp.y, r.x - rp.x);
  const int idx[][4] = {{1, 3, 3, 2}, {0, 0, 2, 1}, {2, 1, 4, 0}, {3, 2, 5, 5}, {0, 4, 1, 1}};
  for (Direction dir : {Direction::Up, Direction::Down}) {
    const ContourSpec c = contour_for(m, vertical_gap(m, 1, 1, dir, r.z, rp.z), 14, rho + 1.0);
    for (const auto &q : idx) {
      const int n = q[0], np = q[1], M = q[2], s = q[3];
      const cplx S = eval_table_integral(m, 1, 1, dir, n, np, M, s, rho, r.z, rp.z, c).value;
      const cplx d = eval_scattered_mixed(m, 1, 1, r, rp, dir, s, M - s, n, np, c).value;
      const double f = (((M - s) % 2) ? -1.0 : 1.0) * std::pow(2.0, M) * factorial(M) * factorial(n) * factorial(np);
      INFO("n=" << n << " n'=" << np << " M=" << M << " s=" << s);
      CHECK(rel(f * std::exp(I * double(M - 2 * s) * phi) * S, d) < 1e-10);
    }
  }
}

TEST_CASE("table integral converges under node doubling") {
  const LayeredMedium m = golden_medium();
  const ContourSpec c = contour_for(m, vertical_gap(m, 1, 1, Direction::Up, -0.3, -0.5), 4 * 3 + 1, 1.0);
  ContourSpec c2 = c;
  for (auto &s : c2.segments) s.panels *= 2;
  const cplx a = eval_table_integral(m, 1, 1, Direction::Up, 1, 3, 3, 2, 0.4, -0.3, -0.5, c).value;
  const cplx b = eval_table_integral(m, 1, 1, Direction::Up, 1, 3, 3, 2, 0.4, -0.3, -0.5, c2).value;
  CHECK(std::isfinite(std::abs(a)));
  CHECK(rel(a, b) < 1e-10);
}

TEST_CASE("batched table integrals equal single evaluations") {
  const LayeredMedium m({0.0}, {0.8, 1.5});
  const int p = 2;
  const std::vector<double> rhos{0.0, 0.5, 1.5};
  const ContourSpec c = contour_for(m, vertical_gap(m, 0, 0, Direction::Up, 0.8, 1.2), 4 * p + 1, 2.5);
  const auto batch = table_integrals_batch(m, 0, 0, Direction::Up, p, rhos, 0.8, 1.2, c);
  REQUIRE(batch.size() == rhos.size());
  for (size_t ir = 0; ir < rhos.size(); ++ir)
    for (int n = 0; n <= p; ++n)
      for (int np = 0; np <= p; ++np)
        for (int M = 0; M <= 2 * p; ++M)
          for (int s = 0; s <= M; ++s) {
            const cplx one = eval_table_integral(m, 0, 0, Direction::Up, n, np, M, s, rhos[ir], 0.8, 1.2, c).value;
            const cplx b = batch[ir][nn_index(n, np, p)][mm_index(M, s)];
            CHECK(std::abs(b - one) <= 1e-11 * std::max(std::abs(one), 1e-12));
          }
}
