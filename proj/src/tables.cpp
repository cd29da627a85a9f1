/// \file tables.cpp
/// \brief Near-field grids, S rho-lines, image-set store and the SWT1 file format.

#include "lmfmm/tables.hpp"

#include <openssl/evp.h>

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>

#include "lmfmm/special.hpp"

namespace lmfmm {

static_assert(std::endian::native == std::endian::little, "table files assume a little-endian host");

std::string ComponentKey::label() const {
  return "u" + std::to_string(l) + std::to_string(lp) + (dir == Direction::Up ? "_up" : "_down");
}

// ---------------------------------------------------------------- grid interpolation

namespace {

// Lagrange weights of `order` consecutive nodes starting at `start` for the fractional index t.
void lagrange_weights(double t, int start, int order, double *w) {
  for (int i = 0; i < order; ++i) {
    double num = 1.0, den = 1.0;
    for (int j = 0; j < order; ++j) {
      if (j == i) continue;
      num *= t - double(start + j);
      den *= double(i - j);
    }
    w[i] = num / den;
  }
}

int stencil(const GridTable &g, int axis, double x, double *w) {
  const double t = (x - g.origin[axis]) / g.step[axis];
  const int n = g.dims[axis];
  if (!(t >= -1e-9 && t <= n - 1 + 1e-9)) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "GridTable: coordinate %.6g outside axis %d range [%.6g, %.6g]", x, axis,
                  g.origin[axis], g.coord(axis, n - 1));
    throw TableError(msg);
  }
  const int s = std::clamp(int(std::floor(t)) - g.order / 2 + 1, 0, n - g.order);
  lagrange_weights(t, s, g.order, w);
  return s;
}

}  // namespace

cplx GridTable::eval(double x0, double x1, double x2) const {
  double w0[16], w1[16], w2[16];
  if (order > 16) throw TableError("GridTable: interpolation order above 16");
  const int s0 = stencil(*this, 0, x0, w0);
  const int s1 = stencil(*this, 1, x1, w1);
  if (ndim == 2) {
    cplx acc = 0.0;
    for (int j = 0; j < order; ++j) {
      const cplx *row = &v[s0 + size_t(dims[0]) * (s1 + j)];
      cplx a = 0.0;
      for (int i = 0; i < order; ++i) a += w0[i] * row[i];
      acc += w1[j] * a;
    }
    return acc;
  }
  const int s2 = stencil(*this, 2, x2, w2);
  cplx acc = 0.0;
  for (int kk = 0; kk < order; ++kk) {
    cplx b = 0.0;
    for (int j = 0; j < order; ++j) {
      const cplx *row = &v[s0 + size_t(dims[0]) * ((s1 + j) + size_t(dims[1]) * (s2 + kk))];
      cplx a = 0.0;
      for (int i = 0; i < order; ++i) a += w0[i] * row[i];
      b += w1[j] * a;
    }
    acc += w2[kk] * b;
  }
  return acc;
}

cplx NearTable::eval(const Vec3 &r, const Vec3 &rp) const {
  const double rho = std::hypot(r.x - rp.x, r.y - rp.y);
  if (!separable) return full.eval(rho, r.z, rp.z);
  cplx v = 0.0;
  if (has_sum) v += sum.eval(rho, r.z + rp.z);
  if (has_diff) v += diff.eval(rho, r.z - rp.z);
  return v;
}

// ---------------------------------------------------------------- near-field tables

namespace {

// One exponential term c_q e^{i k_z (a + s x)} of a separable kernel.
struct Term {
  std::vector<cplx> c;
  double a = 0.0, s = 1.0;
};

struct Spectral {
  QuadRule rule;
  std::vector<cplx> W;          // w k_rho / (k_z k_l)
  std::vector<cplx> kz, kpz;
  std::vector<ReactionCoeffs> coef;
};

Spectral spectral(const LayeredMedium &m, const ComponentKey &key, const ContourSpec &c, int refine) {
  Spectral s;
  s.rule = make_rule(c, refine);
  const size_t Q = s.rule.size();
  s.W.resize(Q);
  s.kz.resize(Q);
  s.kpz.resize(Q);
  s.coef.resize(Q);
  for (size_t q = 0; q < Q; ++q) {
    const cplx kr = s.rule.x[q];
    s.kz[q] = vertical_wavenumber(m.k(key.l), kr);
    s.kpz[q] = vertical_wavenumber(m.k(key.lp), kr);
    s.coef[q] = solve_reaction_coeffs_general(m, key.l, key.lp, kr);
    s.W[q] = s.rule.w[q] * kr / (s.kz[q] * m.k(key.l));
  }
  return s;
}

// Terms of the l == l' kernel: index 0 depends on z + z', index 1 on z - z'.
std::array<std::vector<Term>, 2> separable_terms(const LayeredMedium &m, const ComponentKey &key,
                                                 const Spectral &sp) {
  const int l = key.l;
  const size_t Q = sp.rule.size();
  const bool col_up = l < m.num_interfaces(), col_dn = l > 0;
  std::array<std::vector<Term>, 2> out;
  auto make = [&](auto pick, double a, double s) {
    Term t;
    t.a = a;
    t.s = s;
    t.c.resize(Q);
    for (size_t q = 0; q < Q; ++q) t.c[q] = pick(sp.coef[q]);
    return t;
  };
  if (key.dir == Direction::Up) {
    const double dl = m.depth(l);
    if (col_up) out[0].push_back(make([](const ReactionCoeffs &c) { return c.uu; }, -2.0 * dl, 1.0));
    if (col_dn) out[1].push_back(make([](const ReactionCoeffs &c) { return c.ud; }, m.depth(l - 1) - dl, 1.0));
  } else {
    const double du = m.depth(l - 1);
    if (col_up) out[1].push_back(make([](const ReactionCoeffs &c) { return c.du; }, du - m.depth(l), -1.0));
    if (col_dn) out[0].push_back(make([](const ReactionCoeffs &c) { return c.dd; }, 2.0 * du, -1.0));
  }
  return out;
}

Eigen::MatrixXcd bessel_rows(const Spectral &sp, const std::vector<double> &rhos) {
  const size_t Q = sp.rule.size();
  Eigen::MatrixXcd J(rhos.size(), Q);
  for (size_t i = 0; i < rhos.size(); ++i)
    for (size_t q = 0; q < Q; ++q) J(i, q) = sp.W[q] * bessel_j0(sp.rule.x[q] * rhos[i]);
  return J;
}

Eigen::MatrixXcd term_columns(const Spectral &sp, const std::vector<Term> &terms, const std::vector<double> &xs) {
  const size_t Q = sp.rule.size();
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(Q, xs.size());
  for (const auto &t : terms)
    for (size_t j = 0; j < xs.size(); ++j)
      for (size_t q = 0; q < Q; ++q) E(q, j) += t.c[q] * std::exp(I * sp.kz[q] * (t.a + t.s * xs[j]));
  return E;
}

Eigen::MatrixXcd target_columns(const LayeredMedium &m, const ComponentKey &key, const Spectral &sp,
                                const std::vector<double> &zs) {
  const size_t Q = sp.rule.size();
  Eigen::MatrixXcd T(Q, zs.size());
  for (size_t j = 0; j < zs.size(); ++j)
    for (size_t q = 0; q < Q; ++q)
      T(q, j) = key.dir == Direction::Up ? std::exp(I * sp.kz[q] * (zs[j] - m.depth(key.l)))
                                         : std::exp(I * sp.kz[q] * (m.depth(key.l - 1) - zs[j]));
  return T;
}

Eigen::MatrixXcd source_columns(const LayeredMedium &m, const ComponentKey &key, const Spectral &sp,
                                const std::vector<double> &zps) {
  const size_t Q = sp.rule.size();
  Eigen::MatrixXcd S(Q, zps.size());
  cplx buf[1];
  for (size_t j = 0; j < zps.size(); ++j)
    for (size_t q = 0; q < Q; ++q) {
      density_sigma_tilde_orders(m, sp.coef[q], key.lp, sp.kpz[q], zps[j], key.dir, 0, buf);
      S(q, j) = buf[0];
    }
  return S;
}

std::vector<double> axis_nodes(double lo, double hi, double h, int order, double &origin, int &n) {
  n = std::max(order, int(std::ceil((hi - lo) / h - 1e-9)) + 1);
  const double span = (n - 1) * h;
  origin = 0.5 * (lo + hi) - 0.5 * span;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = origin + h * i;
  return x;
}

std::vector<double> rho_nodes(double rho_max, double h, int order, double &origin, int &n) {
  // Extending below zero uses the evenness of J0 and keeps stencils centred near rho = 0.
  const int neg = order / 2;
  n = neg + std::max(order - neg, int(std::ceil(rho_max / h - 1e-9)) + 1);
  origin = -neg * h;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = origin + h * i;
  return x;
}

GridTable grid2(const Spectral &sp, const std::vector<Term> &terms, const std::vector<double> &rhos,
                const std::vector<double> &xs, double r0, double x0, double h, int order) {
  GridTable g;
  g.ndim = 2;
  g.dims = {int(rhos.size()), int(xs.size()), 1};
  g.origin = {r0, x0, 0.0};
  g.step = {h, h, 1.0};
  g.order = order;
  const Eigen::MatrixXcd V = bessel_rows(sp, rhos) * term_columns(sp, terms, xs);
  g.v.assign(V.data(), V.data() + V.size());  // column-major: rho fastest
  return g;
}

}  // namespace

NearTable build_near_table(const LayeredMedium &m, const ComponentKey &key, const NearRange &range, double tol,
                           double quad_tol, int order) {
  if (!m.admissible(key.l, key.dir)) throw DomainError("build_near_table: component not admissible");
  if (!(tol > 0.0) || order < 2 || order > 16) throw DomainError("build_near_table: bad tolerance or order");
  NearTable nt;
  nt.key = key;
  nt.tol = tol;
  nt.separable = key.l == key.lp;
  // same-layer kernels vanish in a medium with one wavenumber; grids would hold rounding noise
  if (nt.separable && m.homogeneous()) return nt;
  const double rho_max = std::max(range.rho_max, 1e-6);
  const double xs_lo = range.zt_min + range.zs_min, xs_hi = range.zt_max + range.zs_max;
  const double xd_lo = range.zt_min - range.zs_max, xd_hi = range.zt_max - range.zs_min;

  // Conservative decay bound over a slightly enlarged box (grids are centred on the ranges).
  const double pad = 0.05;
  double gap;
  ContourSpec probe_c;
  {
    ContourOptions o;
    if (nt.separable) {
      gap = 1e300;
      const int l = key.l;
      const bool col_up = l < m.num_interfaces(), col_dn = l > 0;
      if (key.dir == Direction::Up) {
        if (col_up) gap = std::min(gap, xs_lo - pad - 2.0 * m.depth(l));
        if (col_dn) gap = std::min(gap, m.depth(l - 1) - m.depth(l) + xd_lo - pad);
      } else {
        if (col_up) gap = std::min(gap, m.depth(l - 1) - m.depth(l) - xd_hi - pad);
        if (col_dn) gap = std::min(gap, 2.0 * m.depth(l - 1) - xs_hi - pad);
      }
    } else {
      gap = 1e300;
      for (double z : {range.zt_min - pad, range.zt_max + pad})
        for (double zp : {range.zs_min - pad, range.zs_max + pad})
          gap = std::min(gap, vertical_gap(m, key.l, key.lp, key.dir, z, zp));
    }
    if (!(gap > 0.0)) throw TableError("build_near_table: " + key.label() + " integrand does not decay on the grid");
    o.gap = gap;
    o.rho_max = rho_max + 0.5;
    probe_c = build_contour(m, quad_tol, o);
  }

  // Reference values on random probes use a twice-refined rule.
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  struct Probe {
    double rho, zt, zs;
  };
  std::vector<Probe> probes(100);
  for (auto &pr : probes)
    pr = {rho_max * U(rng), range.zt_min + (range.zt_max - range.zt_min) * U(rng),
          range.zs_min + (range.zs_max - range.zs_min) * U(rng)};

  for (int refine = 1; refine <= 4; refine *= 2) {
    const Spectral sp = spectral(m, key, probe_c, refine);
    const Spectral ref = spectral(m, key, probe_c, 2 * refine);
    std::vector<cplx> exact(probes.size());
    std::array<std::vector<Term>, 2> terms_sp, terms_ref;
    if (nt.separable) {
      terms_sp = separable_terms(m, key, sp);
      terms_ref = separable_terms(m, key, ref);
      nt.has_sum = !terms_sp[0].empty();
      nt.has_diff = !terms_sp[1].empty();
      for (size_t i = 0; i < probes.size(); ++i) {
        const auto &pr = probes[i];
        const Eigen::MatrixXcd J = bessel_rows(ref, {pr.rho});
        cplx v = 0.0;
        if (nt.has_sum) v += (J * term_columns(ref, terms_ref[0], {pr.zt + pr.zs}))(0, 0);
        if (nt.has_diff) v += (J * term_columns(ref, terms_ref[1], {pr.zt - pr.zs}))(0, 0);
        exact[i] = v;
      }
    } else {
      for (size_t i = 0; i < probes.size(); ++i) {
        const auto &pr = probes[i];
        const Eigen::MatrixXcd J = bessel_rows(ref, {pr.rho});
        const Eigen::MatrixXcd T = target_columns(m, key, ref, {pr.zt});
        const Eigen::MatrixXcd S = source_columns(m, key, ref, {pr.zs});
        exact[i] = (J * (T.array() * S.array()).matrix())(0, 0);
      }
    }
    double scale = 0.0;
    for (const auto &e : exact) scale = std::max(scale, std::abs(e));
    scale = std::max(scale, 1e-300);

    double prev_err = 1e300;
    for (double h = 0.1; h >= 0.1 / 64.0; h *= 0.5) {
      double r0;
      int nr;
      const std::vector<double> rhos = rho_nodes(rho_max, h, order, r0, nr);
      if (nt.separable) {
        double x0;
        int nx;
        if (nt.has_sum) {
          const auto xs = axis_nodes(xs_lo, xs_hi, h, order, x0, nx);
          nt.sum = grid2(sp, terms_sp[0], rhos, xs, r0, x0, h, order);
        }
        if (nt.has_diff) {
          const auto xs = axis_nodes(xd_lo, xd_hi, h, order, x0, nx);
          nt.diff = grid2(sp, terms_sp[1], rhos, xs, r0, x0, h, order);
        }
      } else {
        double z0, zp0;
        int nz, nzp;
        const auto zt = axis_nodes(range.zt_min, range.zt_max, h, order, z0, nz);
        const auto zs = axis_nodes(range.zs_min, range.zs_max, h, order, zp0, nzp);
        const Eigen::MatrixXcd J = bessel_rows(sp, rhos);
        const Eigen::MatrixXcd T = target_columns(m, key, sp, zt);
        const Eigen::MatrixXcd S = source_columns(m, key, sp, zs);
        GridTable &g = nt.full;
        g.ndim = 3;
        g.dims = {nr, nz, nzp};
        g.origin = {r0, z0, zp0};
        g.step = {h, h, h};
        g.order = order;
        g.v.assign(size_t(nr) * nz * nzp, 0.0);
        for (int k = 0; k < nzp; ++k) {
          const Eigen::MatrixXcd V = J * (T.array().colwise() * S.col(k).array()).matrix();
          for (int j = 0; j < nz; ++j)
            for (int i = 0; i < nr; ++i) g.v[i + size_t(nr) * (j + size_t(nz) * k)] = V(i, j);
        }
      }
      double err = 0.0;
      for (size_t i = 0; i < probes.size(); ++i) {
        const auto &pr = probes[i];
        const Vec3 r{pr.rho, 0.0, pr.zt}, rp{0.0, 0.0, pr.zs};
        err = std::max(err, std::abs(nt.eval(r, rp) - exact[i]));
      }
      nt.selftest_error = err / scale;
      if (nt.selftest_error <= tol) return nt;
      // Interpolation no longer improving means the quadrature is the limit.
      if (nt.selftest_error > 0.5 * prev_err) break;
      prev_err = nt.selftest_error;
    }
  }
  char msg[200];
  std::snprintf(msg, sizeof msg, "build_near_table: %s self-test error %.3e above %.3e", key.label().c_str(),
                nt.selftest_error, tol);
  throw TableError(msg);
}

cplx near_table_reference(const LayeredMedium &m, const ComponentKey &key, const Vec3 &r, const Vec3 &rp,
                          double quad_tol) {
  ContourOptions o;
  o.gap = vertical_gap(m, key.l, key.lp, key.dir, r.z, rp.z);
  o.rho_max = std::hypot(r.x - rp.x, r.y - rp.y) + 0.5;
  return eval_scattered_green(m, key.l, key.lp, r, rp, key.dir, build_contour(m, quad_tol, o)).value;
}

// ---------------------------------------------------------------- S tables

int STable::find(double rho) const {
  auto it = std::lower_bound(rhos.begin(), rhos.end(), rho - 1e-9 * (1.0 + rho));
  if (it == rhos.end() || std::abs(*it - rho) > 1e-9 * (1.0 + rho)) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "STable: rho %.12g not tabulated for (z, z') = (%.6g, %.6g)", rho, zt, zs);
    throw TableError(msg);
  }
  return int(it - rhos.begin());
}

STable build_s_table(const LayeredMedium &m, const ComponentKey &key, int p, double zt, double zs,
                     std::vector<double> rhos, double quad_tol, double h) {
  std::sort(rhos.begin(), rhos.end());
  rhos.erase(std::unique(rhos.begin(), rhos.end(), [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1 + a); }),
             rhos.end());
  if (rhos.empty()) throw DomainError("build_s_table: no rho values");
  STable t;
  t.p = p;
  t.zt = zt;
  t.zs = zs;
  t.rhos = rhos;
  if (key.l == key.lp && m.homogeneous()) {
    // same-layer kernels vanish; quadrature would only resolve rounding noise
    t.vals.assign(rhos.size(), std::vector<std::vector<cplx>>((p + 1) * (p + 1), std::vector<cplx>(mm_index(2 * p + 1, 0))));
    return t;
  }
  ContourOptions o;
  o.gap = vertical_gap(m, key.l, key.lp, key.dir, zt, zs);
  if (!(o.gap > 0.0)) throw TableError("build_s_table: " + key.label() + " integrand does not decay");
  o.power = 4 * p + 1;
  o.rho_max = rhos.back() + 0.5;
  ContourSpec c = build_contour(m, quad_tol, o);
  t.vals = table_integrals_batch(m, key.l, key.lp, key.dir, p, rhos, zt, zs, c);
  // Entry S[nn(i, j)][mm(M, .)] enters the translation with weight h^{i + j + M}.
  std::vector<double> wa(t.vals[0].size()), wb(t.vals[0][0].size());
  for (int i = 0; i <= p; ++i)
    for (int j = 0; j <= p; ++j) wa[nn_index(i, j, p)] = std::pow(h, i + j);
  for (int M = 0; M <= 2 * p; ++M)
    for (int s = 0; s <= M; ++s) wb[mm_index(M, s)] = std::pow(h, M);
  // Self-convergence on the largest rho in the weighted norm; refine the whole line if needed.
  for (int pass = 0; pass < 3; ++pass) {
    ContourSpec c2 = c;
    for (auto &s : c2.segments) s.panels *= 2;
    const auto chk = table_integrals_batch(m, key.l, key.lp, key.dir, p, {rhos.back()}, zt, zs, c2);
    double diff = 0.0, scale = 0.0;
    for (size_t a = 0; a < chk[0].size(); ++a)
      for (size_t b = 0; b < chk[0][a].size(); ++b) {
        diff = std::max(diff, wa[a] * wb[b] * std::abs(chk[0][a][b] - t.vals.back()[a][b]));
        scale = std::max(scale, wa[a] * wb[b] * std::abs(chk[0][a][b]));
      }
    if (diff <= 1e3 * quad_tol * scale || diff == 0.0) return t;
    c = c2;
    t.vals = table_integrals_batch(m, key.l, key.lp, key.dir, p, rhos, zt, zs, c);
  }
  throw QuadratureError("build_s_table: " + key.label() + " S integrals did not converge");
}

// ---------------------------------------------------------------- table set

const NearTable &TableSet::near_table(const ComponentKey &k) const {
  auto it = near.find(k);
  if (it == near.end()) throw TableError("TableSet: missing near-field table " + k.label());
  return it->second;
}

const DcimImageSet &TableSet::image_set(const ComponentKey &k, int order, double zp) const {
  auto it = images.find(ImageKey{k, order, zp});
  if (it == images.end()) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "TableSet: missing image set %s order %d z' %.12g", k.label().c_str(), order, zp);
    throw TableError(msg);
  }
  return it->second;
}

const STable &TableSet::s_table(const ComponentKey &k, double zt, double zs) const {
  auto it = stables.find(STableKey{k, zt, zs});
  if (it == stables.end()) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "TableSet: missing S table %s at (%.12g, %.12g)", k.label().c_str(), zt, zs);
    throw TableError(msg);
  }
  return it->second;
}

size_t TableSet::image_set_count(const ComponentKey &k) const {
  size_t n = 0;
  for (const auto &[key, set] : images) n += key.comp == k;
  return n;
}

std::array<uint8_t, 32> sha256(const std::string &data) {
  std::array<uint8_t, 32> out{};
  unsigned int len = 0;
  EVP_MD_CTX *ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 || EVP_DigestFinal_ex(ctx, out.data(), &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("sha256: OpenSSL digest failed");
  }
  EVP_MD_CTX_free(ctx);
  return out;
}

std::string hex(const std::array<uint8_t, 32> &h) {
  static const char *d = "0123456789abcdef";
  std::string s;
  for (uint8_t b : h) {
    s.push_back(d[b >> 4]);
    s.push_back(d[b & 15]);
  }
  return s;
}

namespace {

enum Kind : uint8_t { kNearSum = 0, kNearDiff = 1, kNearFull = 2, kSTable = 3, kImage = 4, kNearZero = 5 };
constexpr uint32_t kVersion = 1;

struct Writer {
  std::ofstream f;
  template <class T>
  void put(const T &v) {
    f.write(reinterpret_cast<const char *>(&v), sizeof(T));
  }
  void put_c(const std::vector<cplx> &v) {
    put<uint64_t>(v.size());
    f.write(reinterpret_cast<const char *>(v.data()), std::streamsize(v.size() * sizeof(cplx)));
  }
  void header(const ComponentKey &k, Kind kind, std::array<uint16_t, 4> idx, std::array<uint32_t, 3> dims,
              std::array<double, 3> origin, std::array<double, 3> step) {
    put<uint8_t>(uint8_t(k.l));
    put<uint8_t>(uint8_t(k.lp));
    put<uint8_t>(uint8_t(k.dir));
    put<uint8_t>(kind);
    for (auto i : idx) put(i);
    for (auto d : dims) put(d);
    for (auto o : origin) put(o);
    for (auto s : step) put(s);
  }
};

struct Reader {
  std::ifstream f;
  template <class T>
  T get() {
    T v{};
    f.read(reinterpret_cast<char *>(&v), sizeof(T));
    if (!f) throw TableError("TableSet::load: truncated file");
    return v;
  }
  std::vector<cplx> get_c() {
    const uint64_t n = get<uint64_t>();
    if (n > (uint64_t(1) << 34)) throw TableError("TableSet::load: corrupt payload length");
    std::vector<cplx> v(n);
    f.read(reinterpret_cast<char *>(v.data()), std::streamsize(n * sizeof(cplx)));
    if (!f) throw TableError("TableSet::load: truncated payload");
    return v;
  }
};

void put_grid(Writer &w, const ComponentKey &k, Kind kind, const GridTable &g, double tol, double err) {
  w.header(k, kind, {uint16_t(g.order), uint16_t(g.ndim), 0, 0},
           {uint32_t(g.dims[0]), uint32_t(g.dims[1]), uint32_t(g.dims[2])}, g.origin, g.step);
  std::vector<cplx> payload = g.v;
  payload.emplace_back(tol, err);
  w.put_c(payload);
}

}  // namespace

void TableSet::save(const std::string &path) const {
  Writer w;
  w.f.open(path, std::ios::binary | std::ios::trunc);
  if (!w.f) throw TableError("TableSet::save: cannot open " + path);
  w.f.write("SWT1", 4);
  w.put(kVersion);
  w.f.write(reinterpret_cast<const char *>(config_hash.data()), 32);
  uint64_t count = images.size() + stables.size();
  for (const auto &[k, t] : near) count += t.separable ? std::max(1, t.has_sum + t.has_diff) : 1;
  w.put(count);
  for (const auto &[k, t] : near) {
    if (!t.separable) {
      put_grid(w, k, kNearFull, t.full, t.tol, t.selftest_error);
      continue;
    }
    if (t.has_sum) put_grid(w, k, kNearSum, t.sum, t.tol, t.selftest_error);
    if (t.has_diff) put_grid(w, k, kNearDiff, t.diff, t.tol, t.selftest_error);
    if (!t.has_sum && !t.has_diff) {
      // identically zero kernel: a marker record without grid values
      w.header(k, kNearZero, {0, 0, 0, 0}, {0, 0, 0}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0});
      w.put_c({cplx(t.tol, t.selftest_error)});
    }
  }
  for (const auto &[k, s] : stables) {
    const uint32_t nn = s.vals.empty() ? 0 : uint32_t(s.vals[0].size());
    const uint32_t nm = nn == 0 ? 0 : uint32_t(s.vals[0][0].size());
    w.header(k.comp, kSTable, {uint16_t(s.p), 0, 0, 0}, {uint32_t(s.rhos.size()), nn, nm}, {0.0, s.zt, s.zs},
             {0.0, 0.0, 0.0});
    std::vector<cplx> payload;
    for (double r : s.rhos) payload.emplace_back(r, 0.0);
    for (const auto &a : s.vals)
      for (const auto &b : a) payload.insert(payload.end(), b.begin(), b.end());
    w.put_c(payload);
  }
  for (const auto &[k, s] : images) {
    w.header(k.comp, kImage, {uint16_t(s.order), 0, 0, 0}, {uint32_t(s.size()), 1, 1}, {s.zp, s.anchor, 0.0},
             {s.residual, s.dense_residual, 0.0});
    std::vector<cplx> payload = s.A;
    payload.insert(payload.end(), s.Z.begin(), s.Z.end());
    w.put_c(payload);
  }
  if (!w.f) throw TableError("TableSet::save: write failed for " + path);
}

TableSet TableSet::load(const std::string &path) {
  Reader r;
  r.f.open(path, std::ios::binary);
  if (!r.f) throw TableError("TableSet::load: cannot open " + path);
  char magic[4];
  r.f.read(magic, 4);
  if (!r.f || std::memcmp(magic, "SWT1", 4) != 0) throw TableError("TableSet::load: bad magic in " + path);
  if (r.get<uint32_t>() != kVersion) throw TableError("TableSet::load: unsupported version");
  TableSet ts;
  r.f.read(reinterpret_cast<char *>(ts.config_hash.data()), 32);
  const uint64_t count = r.get<uint64_t>();
  for (uint64_t e = 0; e < count; ++e) {
    ComponentKey k;
    k.l = r.get<uint8_t>();
    k.lp = r.get<uint8_t>();
    const uint8_t dir = r.get<uint8_t>();
    if (dir > 1) throw TableError("TableSet::load: bad direction");
    k.dir = Direction(dir);
    const uint8_t kind = r.get<uint8_t>();
    std::array<uint16_t, 4> idx;
    for (auto &i : idx) i = r.get<uint16_t>();
    std::array<uint32_t, 3> dims;
    for (auto &d : dims) d = r.get<uint32_t>();
    std::array<double, 3> origin, step;
    for (auto &o : origin) o = r.get<double>();
    for (auto &s : step) s = r.get<double>();
    std::vector<cplx> payload = r.get_c();
    const size_t grid = size_t(dims[0]) * dims[1] * dims[2];
    if (kind == kNearZero) {
      if (payload.size() != 1) throw TableError("TableSet::load: zero-table payload size mismatch");
      NearTable &t = ts.near[k];
      t.key = k;
      t.tol = payload[0].real();
      t.selftest_error = payload[0].imag();
    } else if (kind == kNearSum || kind == kNearDiff || kind == kNearFull) {
      if (payload.size() != grid + 1) throw TableError("TableSet::load: grid payload size mismatch");
      GridTable g;
      g.ndim = idx[1];
      g.order = idx[0];
      g.dims = {int(dims[0]), int(dims[1]), int(dims[2])};
      g.origin = origin;
      g.step = step;
      g.v.assign(payload.begin(), payload.end() - 1);
      NearTable &t = ts.near[k];
      t.key = k;
      t.tol = payload.back().real();
      t.selftest_error = payload.back().imag();
      if (kind == kNearFull) {
        t.separable = false;
        t.full = std::move(g);
      } else if (kind == kNearSum) {
        t.has_sum = true;
        t.sum = std::move(g);
      } else {
        t.has_diff = true;
        t.diff = std::move(g);
      }
    } else if (kind == kSTable) {
      STable s;
      s.p = idx[0];
      s.zt = origin[1];
      s.zs = origin[2];
      if (payload.size() != dims[0] + grid) throw TableError("TableSet::load: S payload size mismatch");
      for (uint32_t i = 0; i < dims[0]; ++i) s.rhos.push_back(payload[i].real());
      size_t pos = dims[0];
      s.vals.assign(dims[0], std::vector<std::vector<cplx>>(dims[1], std::vector<cplx>(dims[2])));
      for (auto &a : s.vals)
        for (auto &b : a)
          for (auto &c : b) c = payload[pos++];
      ts.stables[STableKey{k, s.zt, s.zs}] = std::move(s);
    } else if (kind == kImage) {
      if (payload.size() != 2 * size_t(dims[0])) throw TableError("TableSet::load: image payload size mismatch");
      DcimImageSet s;
      s.l = k.l;
      s.lp = k.lp;
      s.dir = k.dir;
      s.order = idx[0];
      s.zp = origin[0];
      s.anchor = origin[1];
      s.residual = step[0];
      s.dense_residual = step[1];
      s.A.assign(payload.begin(), payload.begin() + dims[0]);
      s.Z.assign(payload.begin() + dims[0], payload.end());
      ts.images[ImageKey{k, s.order, s.zp}] = std::move(s);
    } else {
      throw TableError("TableSet::load: unknown entry kind");
    }
  }
  return ts;
}

}  // namespace lmfmm
