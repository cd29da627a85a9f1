/// \file oracle.cpp
/// \brief Direct sums, error metrics and finite differences.

#include "lmfmm/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>

#include "lmfmm/special.hpp"

namespace lmfmm {

ErrorReport error_metrics(const std::vector<cplx> &exact, const std::vector<cplx> &approx, double floor_rel) {
  if (exact.size() != approx.size()) throw DomainError("error_metrics: length mismatch");
  ErrorReport r;
  r.n = exact.size();
  double num = 0.0, den = 0.0, emax = 0.0;
  for (size_t i = 0; i < exact.size(); ++i) {
    num += std::norm(exact[i] - approx[i]);
    den += std::norm(exact[i]);
    emax = std::max(emax, std::abs(exact[i]));
  }
  if (!(den > 0.0)) throw DomainError("error_metrics: exact field is identically zero");
  r.err2 = std::sqrt(num / den);
  const double floor = floor_rel * emax;
  for (size_t i = 0; i < exact.size(); ++i) {
    const double a = std::abs(exact[i]);
    if (a < floor || a == 0.0) {
      ++r.skipped;
      continue;
    }
    r.errmax = std::max(r.errmax, std::abs(exact[i] - approx[i]) / a);
  }
  if (r.skipped > 0)
    std::fprintf(stderr, "error_metrics: %zu entries below the relative floor %.1e skipped for Err_max\n", r.skipped,
                 floor_rel);
  return r;
}

std::vector<cplx> direct_free(const std::vector<Vec3> &targets, const std::vector<Vec3> &sources,
                              const std::vector<cplx> &q, double k, bool exclude_self) {
  if (q.size() != sources.size()) throw DomainError("direct_free: strength count mismatch");
  std::vector<cplx> out(targets.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < long(targets.size()); ++i) {
    cplx acc = 0.0;
    for (size_t j = 0; j < sources.size(); ++j) {
      if (exclude_self && size_t(i) == j) continue;
      acc += q[j] * hankel0(k * norm(targets[i] - sources[j]));
    }
    out[i] = acc;
  }
  return out;
}

namespace {

// Shared-contour quadrature for several directions of one (target layer, source layer) pair.
struct PairOracle {
  const LayeredMedium &m;
  int l, lp;
  std::vector<Direction> dirs;
  double quad_tol;

  ContourSpec contour(const std::vector<Vec3> &t, const std::vector<Vec3> &s) const {
    double zt_lo = 1e300, zt_hi = -1e300, zs_lo = 1e300, zs_hi = -1e300;
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    for (const auto &p : t) {
      zt_lo = std::min(zt_lo, p.z);
      zt_hi = std::max(zt_hi, p.z);
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.y);
      y_hi = std::max(y_hi, p.y);
    }
    for (const auto &p : s) {
      zs_lo = std::min(zs_lo, p.z);
      zs_hi = std::max(zs_hi, p.z);
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.y);
      y_hi = std::max(y_hi, p.y);
    }
    ContourOptions o;
    o.gap = 1e300;
    for (Direction d : dirs)
      for (double z : {zt_lo, zt_hi})
        for (double zp : {zs_lo, zs_hi}) o.gap = std::min(o.gap, vertical_gap(m, l, lp, d, z, zp));
    o.rho_max = std::hypot(x_hi - x_lo, y_hi - y_lo) + 1e-3;
    return build_contour(m, quad_tol, o);
  }

  // out[d][i] for every direction.
  std::vector<std::vector<cplx>> run(const std::vector<Vec3> &t, const std::vector<Vec3> &s,
                                     const std::vector<cplx> &q, const QuadRule &rule) const {
    const size_t Q = rule.size(), nd = dirs.size();
    std::vector<cplx> W(Q), kz(Q), kpz(Q);
    std::vector<ReactionCoeffs> coef(Q);
    for (size_t a = 0; a < Q; ++a) {
      kz[a] = vertical_wavenumber(m.k(l), rule.x[a]);
      kpz[a] = vertical_wavenumber(m.k(lp), rule.x[a]);
      coef[a] = solve_reaction_coeffs_general(m, l, lp, rule.x[a]);
      W[a] = rule.w[a] * rule.x[a] / (kz[a] * m.k(l));
    }
    // Source densities per direction, node-major per source.
    std::vector<std::vector<cplx>> sig(nd, std::vector<cplx>(Q * s.size()));
    for (size_t d = 0; d < nd; ++d)
      for (size_t j = 0; j < s.size(); ++j)
        for (size_t a = 0; a < Q; ++a) {
          cplx v;
          density_sigma_tilde_orders(m, coef[a], lp, kpz[a], s[j].z, dirs[d], 0, &v);
          sig[d][j * Q + a] = v * q[j];
        }
    std::vector<std::vector<cplx>> out(nd, std::vector<cplx>(t.size(), 0.0));
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < long(t.size()); ++i) {
      std::vector<std::vector<cplx>> tf(nd, std::vector<cplx>(Q));
      for (size_t d = 0; d < nd; ++d)
        for (size_t a = 0; a < Q; ++a)
          tf[d][a] = W[a] * (dirs[d] == Direction::Up ? std::exp(I * kz[a] * (t[i].z - m.depth(l)))
                                                      : std::exp(I * kz[a] * (m.depth(l - 1) - t[i].z)));
      std::vector<cplx> j0(Q);
      std::vector<cplx> acc(nd, 0.0);
      for (size_t j = 0; j < s.size(); ++j) {
        const double rho = std::hypot(t[i].x - s[j].x, t[i].y - s[j].y);
        for (size_t a = 0; a < Q; ++a) j0[a] = bessel_j0(rule.x[a] * rho);
        for (size_t d = 0; d < nd; ++d) {
          const cplx *sg = &sig[d][j * Q];
          cplx v = 0.0;
          for (size_t a = 0; a < Q; ++a) v += j0[a] * tf[d][a] * sg[a];
          acc[d] += v;
        }
      }
      for (size_t d = 0; d < nd; ++d) out[d][i] = acc[d];
    }
    return out;
  }

  std::vector<std::vector<cplx>> operator()(const std::vector<Vec3> &t, const std::vector<Vec3> &s,
                                            const std::vector<cplx> &q) const {
    const ContourSpec c = contour(t, s);
    // Self-check the rule on the first target before the full sweep.
    for (int refine = 1; refine <= 8; refine *= 2) {
      const std::vector<Vec3> t1(t.begin(), t.begin() + 1);
      const auto a = run(t1, s, q, make_rule(c, refine));
      const auto b = run(t1, s, q, make_rule(c, 2 * refine));
      double diff = 0.0, scale = 0.0;
      for (size_t d = 0; d < dirs.size(); ++d) {
        diff = std::max(diff, std::abs(a[d][0] - b[d][0]));
        scale = std::max(scale, std::abs(b[d][0]));
      }
      if (diff <= 1e3 * quad_tol * scale || diff == 0.0) return run(t, s, q, make_rule(c, refine));
    }
    throw QuadratureError("direct_component: quadrature self-check failed");
  }
};

}  // namespace

std::vector<cplx> direct_component(const LayeredMedium &m, const ComponentKey &key, const std::vector<Vec3> &targets,
                                   const std::vector<Vec3> &sources, const std::vector<cplx> &q, double quad_tol) {
  if (q.size() != sources.size()) throw DomainError("direct_component: strength count mismatch");
  for (const auto &p : targets)
    if (!m.inside(key.l, p.z)) throw DomainError("direct_component: target not inside its layer");
  for (const auto &p : sources)
    if (!m.inside(key.lp, p.z)) throw DomainError("direct_component: source not inside its layer");
  if (!m.admissible(key.l, key.dir) || targets.empty() || sources.empty())
    return std::vector<cplx>(targets.size(), 0.0);
  PairOracle po{m, key.l, key.lp, {key.dir}, quad_tol};
  return po(targets, sources, q)[0];
}

std::vector<std::vector<int>> oracle_subset(const ParticleSet &ps, size_t per_block) {
  std::vector<std::vector<int>> out(ps.size());
  for (size_t b = 0; b < ps.size(); ++b) {
    const size_t n = ps[b].pos.size(), k = std::min(n, per_block);
    for (size_t i = 0; i < k; ++i) out[b].push_back(int(i * n / k));
  }
  return out;
}

OracleResult direct_total(const LayeredMedium &m, const ParticleSet &ps, const std::vector<std::vector<int>> &targets,
                          double quad_tol) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_particles(m, ps);
  if (targets.size() != ps.size()) throw DomainError("direct_total: one target list per block required");
  OracleResult r;
  r.targets = targets;
  auto zeros = [&]() {
    std::vector<std::vector<cplx>> z(ps.size());
    for (size_t b = 0; b < ps.size(); ++b) z[b].assign(targets[b].size(), 0.0);
    return z;
  };
  r.phi = zeros();
  r.parts["free"] = zeros();
  for (size_t tb = 0; tb < ps.size(); ++tb) {
    std::vector<Vec3> tp;
    for (int i : targets[tb]) tp.push_back(ps[tb].pos.at(i));
    if (tp.empty()) continue;
    const int l = ps[tb].layer;
    for (size_t sb = 0; sb < ps.size(); ++sb) {
      const int lp = ps[sb].layer;
      if (lp == l) {
        const double k = m.k(l);
        auto &fr = r.parts["free"][tb];
        for (size_t ii = 0; ii < tp.size(); ++ii) {
          cplx acc = 0.0;
          for (size_t j = 0; j < ps[sb].pos.size(); ++j) {
            if (sb == tb && int(j) == targets[tb][ii]) continue;
            acc += ps[sb].q[j] * hankel0(k * norm(tp[ii] - ps[sb].pos[j]));
          }
          fr[ii] += acc;
        }
      }
      std::vector<Direction> dirs;
      for (Direction d : {Direction::Up, Direction::Down})
        if (m.admissible(l, d)) dirs.push_back(d);
      if (dirs.empty()) continue;
      PairOracle po{m, l, lp, dirs, quad_tol};
      const auto v = po(tp, ps[sb].pos, ps[sb].q);
      for (size_t d = 0; d < dirs.size(); ++d) {
        const std::string label = ComponentKey{l, lp, dirs[d]}.label();
        auto &part = r.parts[label];
        if (part.empty()) part = zeros();
        for (size_t ii = 0; ii < tp.size(); ++ii) part[tb][ii] += v[d][ii];
      }
    }
  }
  for (const auto &[label, part] : r.parts)
    for (size_t b = 0; b < ps.size(); ++b)
      for (size_t i = 0; i < part[b].size(); ++i) r.phi[b][i] += part[b][i];
  r.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::vector<cplx> gather(const std::vector<std::vector<cplx>> &per_block, const std::vector<std::vector<int>> &targets) {
  std::vector<cplx> out;
  for (size_t b = 0; b < targets.size(); ++b)
    for (int i : targets[b]) out.push_back(per_block.at(b).at(i));
  return out;
}

std::vector<cplx> flatten(const std::vector<std::vector<cplx>> &per_block) {
  std::vector<cplx> out;
  for (const auto &v : per_block) out.insert(out.end(), v.begin(), v.end());
  return out;
}

namespace {

// Central-difference stencil of one axis: offsets (in units of h) and weights / h^m.
void axis_stencil(int m, std::vector<double> &off, std::vector<double> &w) {
  off.clear();
  w.clear();
  for (int i = 0; i <= m; ++i) {
    off.push_back(0.5 * m - i);
    w.push_back(((i % 2) ? -1.0 : 1.0) * binomial(m, i));
  }
}

cplx fd_level(const ScalarField &f, const Vec3 &x, const std::array<int, 3> &k, double h) {
  std::vector<double> o[3], w[3];
  for (int a = 0; a < 3; ++a) axis_stencil(k[a], o[a], w[a]);
  cplx acc = 0.0;
  for (size_t i = 0; i < o[0].size(); ++i)
    for (size_t j = 0; j < o[1].size(); ++j)
      for (size_t l = 0; l < o[2].size(); ++l)
        acc += w[0][i] * w[1][j] * w[2][l] * f(Vec3{x.x + o[0][i] * h, x.y + o[1][j] * h, x.z + o[2][l] * h});
  return acc / std::pow(h, k[0] + k[1] + k[2]);
}

}  // namespace

cplx finite_difference(const ScalarField &f, const Vec3 &x, const std::array<int, 3> &k, double h, double scale,
                       bool *warn) {
  if (k[0] < 0 || k[1] < 0 || k[2] < 0) throw DomainError("finite_difference: negative order");
  const int order = k[0] + k[1] + k[2];
  if (order == 0) return f(x);
  if (!(h > 0.0)) h = scale * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (order + 4));
  const cplx d1 = fd_level(f, x, k, h);
  const cplx d2 = fd_level(f, x, k, 0.5 * h);
  const cplx r = (4.0 * d2 - d1) / 3.0;
  const bool bad = std::abs(d1 - d2) > 0.1 * std::abs(r);
  if (warn) *warn = bad;
  if (bad) std::fprintf(stderr, "finite_difference: step-size warning (levels differ by more than 10%%)\n");
  return r;
}

cplx finite_difference_sym(const ScalarField &f, const Vec3 &x, int n, int m, int s, double h, double scale,
                           bool *warn) {
  if (!(0 <= s && s <= m && m <= n)) throw DomainError("finite_difference_sym: need 0 <= s <= m <= n");
  // Expand (dx - i dy)^s (dx + i dy)^{m-s} into monomials dx^a dy^{m-a}.
  std::vector<cplx> poly(m + 1, 0.0);
  for (int i = 0; i <= s; ++i)
    for (int j = 0; j <= m - s; ++j) {
      // dy powers: (s - i) from the first factor, (m - s - j) from the second.
      const cplx c = binomial(s, i) * std::pow(-I, s - i) * binomial(m - s, j) * std::pow(I, m - s - j);
      poly[i + j] += c;
    }
  cplx acc = 0.0;
  bool any = false;
  for (int a = 0; a <= m; ++a) {
    if (poly[a] == 0.0) continue;
    bool w = false;
    acc += poly[a] * finite_difference(f, x, {a, m - a, n - m}, h, scale, &w);
    any = any || w;
  }
  if (warn) *warn = any;
  return acc;
}

}  // namespace lmfmm
