/// \file sommerfeld.cpp
/// \brief Contour construction and quadrature of scattered-field Sommerfeld integrals.

#include "lmfmm/sommerfeld.hpp"

#include <Eigen/Dense>
#include <algorithm>

#include "lmfmm/special.hpp"

namespace lmfmm {

ContourSpec build_contour(const LayeredMedium &m, double tol, const ContourOptions &opt) {
  if (!(tol > 0.0) || tol > 1e-2) throw DomainError("build_contour: tol must lie in (0, 1e-2]");
  if (!(opt.gap > 0.0)) throw DomainError("build_contour: vertical gap must be positive");
  ContourSpec c;
  c.tol = tol;
  c.b = opt.b > 0.0 ? opt.b : 0.5 * m.k_min();
  // Envelope e(t) = t^P e^{-gap t}; normalise by its peak over t >= 1.
  const double P = std::max(opt.power, 0);
  const double tpk = std::max(1.0, P / opt.gap);
  const double log_peak = P * std::log(tpk) - opt.gap * tpk;
  const double target = std::log(tol) + std::max(log_peak, 0.0);
  double lo = tpk, hi = tpk + 1.0;
  auto f = [&](double t) { return P * std::log(t) - opt.gap * t - target; };
  while (f(hi) > 0.0) hi = tpk + 2.0 * (hi - tpk);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  const double t_fine = m.k_max() + 2.0;
  c.t_max = std::max(hi, t_fine + 1.0);
  const cplx ib = cplx(0.0, c.b);
  c.segments.push_back({0.0, -ib, std::max(2, int(std::ceil(c.b / opt.fine_width))), 16});
  c.segments.push_back({-ib, t_fine - ib, int(std::ceil(t_fine / opt.fine_width)), 16});
  const double width = std::min(opt.tail_width, 2.0 * PI / std::max(opt.rho_max, 1e-3));
  c.segments.push_back({t_fine - ib, c.t_max - ib, std::max(1, int(std::ceil((c.t_max - t_fine) / width))), 16});
  return c;
}

QuadRule make_rule(const ContourSpec &c, int refine) {
  QuadRule r;
  std::vector<double> gx, gw;
  for (const auto &seg : c.segments) {
    gauss_legendre(seg.order, gx, gw);
    const int np = seg.panels * refine;
    const cplx h = (seg.end - seg.start) / double(np);
    for (int p = 0; p < np; ++p) {
      const cplx a = seg.start + double(p) * h;
      for (int i = 0; i < seg.order; ++i) {
        r.x.push_back(a + 0.5 * (gx[i] + 1.0) * h);
        r.w.push_back(0.5 * gw[i] * h);
      }
    }
  }
  return r;
}

double vertical_gap(const LayeredMedium &m, int l, int lp, Direction dir, double z, double zp) {
  const double tg = (dir == Direction::Up) ? z - m.depth(l) : m.depth(l - 1) - z;
  double sg = 1e300;
  if (lp < m.num_interfaces()) sg = std::min(sg, zp - m.depth(lp));
  if (lp > 0) sg = std::min(sg, m.depth(lp - 1) - zp);
  return tg + sg;
}

ComponentNodes component_nodes(const LayeredMedium &m, int l, int lp, Direction dir, const QuadRule &rule) {
  ComponentNodes cn;
  cn.l = l;
  cn.lp = lp;
  cn.dir = dir;
  cn.rule = rule;
  const size_t n = rule.size();
  cn.kz.resize(n);
  cn.kpz.resize(n);
  cn.coef.resize(n);
  for (size_t q = 0; q < n; ++q) {
    cn.kz[q] = vertical_wavenumber(m.k(l), rule.x[q]);
    cn.kpz[q] = vertical_wavenumber(m.k(lp), rule.x[q]);
    cn.coef[q] = solve_reaction_coeffs_general(m, l, lp, rule.x[q]);
  }
  return cn;
}

namespace {

void check_points(const LayeredMedium &m, int l, int lp, Direction dir, double z, double zp) {
  if (l < 0 || l >= m.num_layers() || lp < 0 || lp >= m.num_layers())
    throw DomainError("sommerfeld: bad layer index");
  if (!m.inside(l, z)) throw DomainError("sommerfeld: target not strictly inside its layer");
  if (!m.inside(lp, zp)) throw DomainError("sommerfeld: source not strictly inside its layer");
  (void)dir;
}

// Box centres may sit outside their layer; the integrals only need a decaying integrand.
void check_gap(const LayeredMedium &m, int l, int lp, Direction dir, double z, double zp) {
  if (l < 0 || l >= m.num_layers() || lp < 0 || lp >= m.num_layers())
    throw DomainError("sommerfeld: bad layer index");
  if (m.admissible(l, dir) && !(vertical_gap(m, l, lp, dir, z, zp) > 0.0))
    throw DomainError("sommerfeld: integrand does not decay for these heights");
}

cplx target_factor(const LayeredMedium &m, int l, Direction dir, cplx kz, double z) {
  return dir == Direction::Up ? std::exp(I * kz * (z - m.depth(l))) : std::exp(I * kz * (m.depth(l - 1) - z));
}

// Generic driver: integrand(rule) -> value; refines until self-consistent.
template <class F>
SommerfeldValue converge(const ContourSpec &c, F &&integrate) {
  SommerfeldValue out;
  cplx prev = integrate(make_rule(c, 1));
  for (int refine = 2; refine <= 8; refine *= 2) {
    const QuadRule r = make_rule(c, refine);
    const cplx cur = integrate(r);
    out.value = cur;
    out.error = std::abs(cur - prev);
    out.nodes = int(r.size());
    if (out.error <= 1e3 * c.tol * std::abs(cur) || out.error == 0.0) return out;
    prev = cur;
  }
  if (out.error > 1e-6 * std::abs(out.value) && out.error > 1e-300)
    throw QuadratureError("sommerfeld: no convergence within the node budget");
  return out;
}

}  // namespace

SommerfeldValue eval_scattered_mixed(const LayeredMedium &m, int l, int lp, const Vec3 &r, const Vec3 &rp,
                                     Direction dir, int a, int b, int n, int np, const ContourSpec &contour) {
  check_points(m, l, lp, dir, r.z, rp.z);
  if (!m.admissible(l, dir)) return {};
  const double dx = r.x - rp.x, dy = r.y - rp.y;
  const double rho = std::hypot(dx, dy);
  const double phi = std::atan2(dy, dx);
  const int order = b - a;
  const double kl = m.k(l);
  const cplx zsign = (dir == Direction::Up) ? I : -I;
  auto integrate = [&](const QuadRule &rule) {
    cplx acc = 0.0;
    std::vector<cplx> sig(np + 1);
    for (size_t q = 0; q < rule.size(); ++q) {
      const cplx kr = rule.x[q];
      const cplx kz = vertical_wavenumber(kl, kr);
      const cplx kpz = vertical_wavenumber(m.k(lp), kr);
      const ReactionCoeffs c = solve_reaction_coeffs_general(m, l, lp, kr);
      density_sigma_tilde_orders(m, c, lp, kpz, rp.z, dir, np, sig.data());
      cplx jv = bessel_j(std::abs(order), kr * rho);
      if (order < 0 && (std::abs(order) % 2)) jv = -jv;
      // (dx - i dy)^a (dx + i dy)^b J0 = (-1)^b k^{a+b} J_{b-a} e^{i(b-a)phi}
      const cplx horiz = ((b % 2) ? -1.0 : 1.0) * std::pow(kr, a + b) * jv;
      const cplx vert = std::pow(zsign * kz, n) * target_factor(m, l, dir, kz, r.z);
      acc += rule.w[q] * kr * horiz * vert * sig[np] * factorial(np) / kz;
    }
    return acc / kl * std::exp(I * double(order) * phi);
  };
  ContourSpec c = contour;
  return converge(c, integrate);
}

SommerfeldValue eval_scattered_derivative(const LayeredMedium &m, int l, int lp, const Vec3 &r,
                                          const Vec3 &rp, Direction dir, int s, int k3, int k3p,
                                          const ContourSpec &contour) {
  SommerfeldValue v = eval_scattered_mixed(m, l, lp, r, rp, dir, 0, s, k3, k3p, contour);
  const double f = factorial(s) * factorial(k3) * factorial(k3p);
  v.value /= f;
  v.error /= f;
  return v;
}

SommerfeldValue eval_scattered_green(const LayeredMedium &m, int l, int lp, const Vec3 &r, const Vec3 &rp,
                                     Direction dir, const ContourSpec &contour) {
  return eval_scattered_mixed(m, l, lp, r, rp, dir, 0, 0, 0, 0, contour);
}

SommerfeldValue eval_table_integral(const LayeredMedium &m, int l, int lp, Direction dir, int n, int np,
                                    int mm, int mp, double rho, double z, double zp,
                                    const ContourSpec &contour) {
  check_points(m, l, lp, dir, z, zp);
  if (n < 0 || np < 0 || mm < 0 || mp < 0 || mp > mm) throw DomainError("eval_table_integral: bad indices");
  if (!m.admissible(l, dir)) return {};
  const double kl = m.k(l);
  const cplx zsign = (dir == Direction::Up) ? I : -I;
  const double norm = std::pow(2.0, mm) * factorial(mm) * factorial(n);
  auto integrate = [&](const QuadRule &rule) {
    cplx acc = 0.0;
    std::vector<cplx> sig(np + 1);
    for (size_t q = 0; q < rule.size(); ++q) {
      const cplx kr = rule.x[q];
      const cplx kz = vertical_wavenumber(kl, kr);
      const cplx kpz = vertical_wavenumber(m.k(lp), kr);
      const ReactionCoeffs c = solve_reaction_coeffs_general(m, l, lp, kr);
      density_sigma_tilde_orders(m, c, lp, kpz, zp, dir, np, sig.data());
      const cplx jv = bessel_j(mm - 2 * mp, kr * rho);
      acc += rule.w[q] * std::pow(kr, mm + 1) * jv * std::pow(zsign * kz, n) *
             target_factor(m, l, dir, kz, z) / kz * sig[np];
    }
    return acc / (kl * norm);
  };
  return converge(contour, integrate);
}

std::vector<std::vector<std::vector<cplx>>> table_integrals_batch(const LayeredMedium &m, int l, int lp,
                                                                  Direction dir, int p,
                                                                  const std::vector<double> &rhos, double z,
                                                                  double zp, const ContourSpec &contour) {
  check_gap(m, l, lp, dir, z, zp);
  const int nn = (p + 1) * (p + 1);
  const int nm = mm_index(2 * p, 2 * p) + 1;
  std::vector<std::vector<std::vector<cplx>>> out(
      rhos.size(), std::vector<std::vector<cplx>>(nn, std::vector<cplx>(nm, 0.0)));
  if (!m.admissible(l, dir)) return out;
  const QuadRule rule = make_rule(contour, 1);
  const int Q = int(rule.size());
  const double kl = m.k(l);
  const cplx zsign = (dir == Direction::Up) ? I : -I;
  // A(q, nn) carries weights, vertical factors and densities; B(q, mm) the Bessel part.
  Eigen::MatrixXcd A(nn, Q);
  std::vector<cplx> sig(p + 1);
  for (int q = 0; q < Q; ++q) {
    const cplx kr = rule.x[q];
    const cplx kz = vertical_wavenumber(kl, kr);
    const cplx kpz = vertical_wavenumber(m.k(lp), kr);
    const ReactionCoeffs c = solve_reaction_coeffs_general(m, l, lp, kr);
    density_sigma_tilde_orders(m, c, lp, kpz, zp, dir, p, sig.data());
    cplx v = rule.w[q] * kr * target_factor(m, l, dir, kz, z) / (kz * kl);
    for (int n = 0; n <= p; ++n) {
      for (int np = 0; np <= p; ++np) A(nn_index(n, np, p), q) = v * sig[np];
      v *= zsign * kz / double(n + 1);
    }
  }
  Eigen::MatrixXcd B(Q, nm);
  std::vector<cplx> jv(2 * p + 1);
  for (size_t ir = 0; ir < rhos.size(); ++ir) {
    for (int q = 0; q < Q; ++q) {
      const cplx kr = rule.x[q];
      bessel_j_all(2 * p, kr * rhos[ir], jv.data());
      cplx pw = 1.0;
      for (int mm = 0; mm <= 2 * p; ++mm) {
        const cplx f = pw / (std::pow(2.0, mm) * factorial(mm));
        for (int mp = 0; mp <= mm; ++mp) {
          const int ord = mm - 2 * mp;
          cplx j = jv[std::abs(ord)];
          if (ord < 0 && (std::abs(ord) % 2)) j = -j;
          B(q, mm_index(mm, mp)) = f * j;
        }
        pw *= kr;
      }
    }
    Eigen::MatrixXcd S = A * B;
    for (int a = 0; a < nn; ++a)
      for (int b = 0; b < nm; ++b) out[ir][a][b] = S(a, b);
  }
  return out;
}

double verify_sommerfeld_identity(double k, const Vec3 &r, const ContourSpec &contour) {
  if (r.z == 0.0) throw DomainError("verify_sommerfeld_identity: z must be nonzero");
  const double rho = std::hypot(r.x, r.y);
  const double az = std::abs(r.z);
  const QuadRule rule = make_rule(contour, 1);
  cplx acc = 0.0;
  for (size_t q = 0; q < rule.size(); ++q) {
    const cplx kr = rule.x[q];
    const cplx kz = vertical_wavenumber(k, kr);
    acc += rule.w[q] * kr * bessel_j0(kr * rho) * std::exp(I * kz * az) / kz;
  }
  acc /= k;
  return std::abs(hankel0(k * norm(r)) - acc);
}

}  // namespace lmfmm
