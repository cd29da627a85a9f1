/// \file taylor_sym.cpp
/// \brief Symmetric (n, m, s) derivatives through spherical ladder operators and the
/// corresponding translation operators.

#include <map>
#include <memory>
#include <mutex>

#include "lmfmm/special.hpp"
#include "lmfmm/sommerfeld.hpp"
#include "lmfmm/taylor.hpp"

namespace lmfmm {

namespace {

inline int ylm_index(int n, int m) { return n * n + n + m; }

void cpowers(cplx w, int p, std::vector<cplx> &out) {
  out.resize(p + 1);
  out[0] = 1.0;
  for (int e = 1; e <= p; ++e) out[e] = out[e - 1] * w;
}

// Dense ladder composition table: coef[t][N] with D_nm^s Omega_0^0 prefactor-free
// expansion sum_N coef Omega_N^{m-2s}.
struct LadderTable {
  int P = 0;
  std::vector<std::vector<double>> coef;
};

std::shared_ptr<const LadderTable> build_ladder_table(int P) {
  auto tab = std::make_shared<LadderTable>();
  tab->P = P;
  const auto &list = sym_list(P);
  tab->coef.assign(list.size(), std::vector<double>(P + 1, 0.0));
  for (size_t t = 0; t < list.size(); ++t) {
    const int n = list[t][0], m = list[t][1], s = list[t][2];
    const int c = n - m, b = m - s, a = s;
    std::vector<double> v0(P + 1, 0.0), v1(P + 1, 0.0), v2(P + 1, 0.0);
    const auto c0 = ladder_power_coeffs(Ladder::Zero, 0, 0, c);
    for (int r = 0; r <= c; ++r)
      if (-c + 2 * r >= 0) v0[-c + 2 * r] += c0[r];
    for (int N0 = 0; N0 <= P; ++N0) {
      if (v0[N0] == 0.0) continue;
      const auto cp = ladder_power_coeffs(Ladder::Plus, N0, 0, b);
      for (int r = 0; r <= b; ++r) {
        const int N1 = N0 - b + 2 * r;
        if (N1 >= 0 && N1 <= P) v1[N1] += v0[N0] * cp[r];
      }
    }
    for (int N1 = 0; N1 <= P; ++N1) {
      if (v1[N1] == 0.0) continue;
      const auto cm = ladder_power_coeffs(Ladder::Minus, N1, b, a);
      for (int r = 0; r <= a; ++r) {
        const int N2 = N1 - a + 2 * r;
        if (N2 >= 0 && N2 <= P) v2[N2] += v1[N1] * cm[r];
      }
    }
    tab->coef[t] = v2;
  }
  return tab;
}

std::shared_ptr<const LadderTable> ladder_table(int P) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const LadderTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(P);
  if (it != cache.end()) return it->second;
  auto tab = build_ladder_table(P);
  cache[P] = tab;
  return tab;
}

}  // namespace

std::vector<cplx> spherical_harmonics(double theta, double phi, int P) {
  std::vector<cplx> Y((P + 1) * (P + 1), 0.0);
  const double x = std::cos(theta), sx = std::sin(theta);
  // P_n^m without the Condon-Shortley phase.
  std::vector<double> Pm((P + 1) * (P + 1), 0.0);
  auto at = [&](int n, int m) -> double & { return Pm[n * (P + 1) + m]; };
  double pmm = 1.0;
  for (int m = 0; m <= P; ++m) {
    if (m > 0) pmm *= double(2 * m - 1) * sx;
    at(m, m) = pmm;
    if (m + 1 <= P) at(m + 1, m) = x * double(2 * m + 1) * pmm;
    for (int n = m + 2; n <= P; ++n)
      at(n, m) = (x * double(2 * n - 1) * at(n - 1, m) - double(n + m - 1) * at(n - 2, m)) / double(n - m);
  }
  for (int n = 0; n <= P; ++n)
    for (int m = 0; m <= n; ++m) {
      const double nrm = std::sqrt((2.0 * n + 1.0) / (4.0 * PI) * factorial(n - m) / factorial(n + m));
      const double sg = (m % 2) ? -1.0 : 1.0;
      const cplx y = sg * nrm * at(n, m) * std::exp(I * double(m) * phi);
      Y[ylm_index(n, m)] = y;
      if (m > 0) Y[ylm_index(n, -m)] = sg * std::conj(y);
    }
  return Y;
}

std::vector<cplx> omega_table(double k, const Vec3 &off, int P) {
  const double R = norm(off);
  if (R == 0.0) throw DomainError("omega_table: zero offset");
  const double theta = std::acos(std::clamp(off.z / R, -1.0, 1.0));
  const double phi = std::atan2(off.y, off.x);
  std::vector<cplx> Y = spherical_harmonics(theta, phi, P);
  const std::vector<cplx> h = spherical_hankel_all(P, cplx(k * R, 0.0));
  for (int n = 0; n <= P; ++n)
    for (int m = -n; m <= n; ++m) Y[ylm_index(n, m)] *= h[n];
  return Y;
}

void ladder_step(Ladder op, int n, int m, double &A, double &B) {
  const double dn = n, dm = m;
  const double den_a = (2.0 * dn + 1.0) * (2.0 * dn + 3.0);
  const double den_b = 4.0 * dn * dn - 1.0;
  int mt = m;
  switch (op) {
    case Ladder::Plus:
      A = std::sqrt((dn + dm + 2.0) * (dn + dm + 1.0) / den_a);
      B = (n >= 1) ? std::sqrt(std::max(0.0, (dn - dm) * (dn - dm - 1.0) / den_b)) : 0.0;
      mt = m + 1;
      break;
    case Ladder::Minus:
      A = -std::sqrt((dn - dm + 2.0) * (dn - dm + 1.0) / den_a);
      B = (n >= 1) ? -std::sqrt(std::max(0.0, (dn + dm) * (dn + dm - 1.0) / den_b)) : 0.0;
      mt = m - 1;
      break;
    case Ladder::Zero:
      // Signs fixed by D0 Omega_n^{+-n} = Omega_{n+1}^{+-n}/sqrt(2n+3) with D0 = -(1/k) d/dz.
      A = std::sqrt(((dn + 1.0) * (dn + 1.0) - dm * dm) / den_a);
      B = (n >= 1) ? -std::sqrt(std::max(0.0, (dn * dn - dm * dm) / den_b)) : 0.0;
      break;
  }
  if (n - 1 < std::abs(mt)) B = 0.0;
}

std::vector<double> ladder_power_coeffs(Ladder op, int n, int m, int s) {
  if (s < 0 || std::abs(m) > n) throw DomainError("ladder_power_coeffs: invalid indices");
  const int dm = (op == Ladder::Plus) ? 1 : (op == Ladder::Minus ? -1 : 0);
  std::vector<double> prev{1.0}, cur;
  for (int t = 1; t <= s; ++t) {
    cur.assign(t + 1, 0.0);
    const int mprev = m + (t - 1) * dm;
    const int mcur = m + t * dm;
    for (int r = 0; r <= t; ++r) {
      if (n - t + 2 * r < std::abs(mcur)) continue;
      double A, B, v = 0.0;
      if (r >= 1) {
        ladder_step(op, n - t + 2 * r - 1, mprev, A, B);
        v += A * prev[r - 1];
      }
      if (r <= t - 1) {
        ladder_step(op, n - t + 2 * r + 1, mprev, A, B);
        v += B * prev[r];
      }
      cur[r] = v;
    }
    prev.swap(cur);
  }
  return prev;
}

void sym_derivs(double k, const Vec3 &offset, int P, cplx *out) {
  if (norm(offset) == 0.0) throw DomainError("sym_derivs: zero offset");
  const auto tab = ladder_table(P);
  const std::vector<cplx> Om = omega_table(k, offset, P);
  const auto &list = sym_list(P);
  const double root4pi = std::sqrt(4.0 * PI);
  double kn = 1.0;
  int last_n = 0;
  for (size_t t = 0; t < list.size(); ++t) {
    const int n = list[t][0], m = list[t][1], s = list[t][2];
    while (last_n < n) {
      kn *= k;
      ++last_n;
    }
    const int M = m - 2 * s;
    cplx acc = 0.0;
    const auto &c = tab->coef[t];
    for (int N = std::abs(M); N <= n; ++N)
      if (c[N] != 0.0) acc += c[N] * Om[ylm_index(N, M)];
    out[t] = (((n - m) % 2) ? -1.0 : 1.0) * kn * root4pi * acc;
  }
}

std::vector<cplx> sym_derivs(double k, const Vec3 &offset, int P) {
  std::vector<cplx> out(sym_count(P));
  sym_derivs(k, offset, P, out.data());
  return out;
}

std::vector<cplx> sym_from_nonsym(const std::vector<cplx> &a, int P) {
  const auto &list = sym_list(P);
  std::vector<cplx> out(list.size());
  for (size_t t = 0; t < list.size(); ++t) {
    const int n = list[t][0], m = list[t][1], s = list[t][2];
    // (1 - i u)^s (1 + i u)^{m-s}; the power of u counts y-derivatives.
    std::vector<cplx> poly{1.0};
    auto mul = [&](cplx c1) {
      std::vector<cplx> nxt(poly.size() + 1, 0.0);
      for (size_t j = 0; j < poly.size(); ++j) {
        nxt[j] += poly[j];
        nxt[j + 1] += c1 * poly[j];
      }
      poly.swap(nxt);
    };
    for (int i = 0; i < s; ++i) mul(-I);
    for (int i = 0; i < m - s; ++i) mul(I);
    cplx acc = 0.0;
    for (int j = 0; j <= m; ++j)
      acc += poly[j] * factorial(m - j) * factorial(j) * factorial(n - m) * a[mi_index(m - j, j, n - m)];
    out[t] = acc;
  }
  return out;
}

void accumulate_moments_sym(const Vec3 *pts, const cplx *q, size_t n, const Vec3 &center, double scale, int p,
                            cplx *c) {
  const auto &list = sym_list(p);
  std::vector<cplx> pw, pwb, pz;
  for (size_t i = 0; i < n; ++i) {
    const double x = (pts[i].x - center.x) / scale, y = (pts[i].y - center.y) / scale,
                 z = (pts[i].z - center.z) / scale;
    cpowers(cplx(x, y), p, pw);
    cpowers(cplx(x, -y), p, pwb);
    cpowers(cplx(z, 0.0), p, pz);
    for (size_t t = 0; t < list.size(); ++t) {
      const int nn = list[t][0], m = list[t][1], s = list[t][2];
      c[t] += q[i] * pw[s] * pwb[m - s] * pz[nn - m];
    }
  }
}

SymCoeffs source_te_sym(const std::vector<Vec3> &pts, const std::vector<cplx> &q, const Vec3 &center, int p,
                        double scale) {
  if (pts.size() != q.size()) throw DomainError("source_te_sym: size mismatch");
  SymCoeffs out{p, center, scale, ExpansionRole::Source, std::vector<cplx>(sym_count(p), 0.0)};
  accumulate_moments_sym(pts.data(), q.data(), pts.size(), center, scale, p, out.c.data());
  return out;
}

MatrixXcd m2m_matrix_sym(const Vec3 &d, double hc, double hp, int p) {
  const auto &list = sym_list(p);
  const int nn = int(list.size());
  std::vector<cplx> pw, pwb, pz;
  cpowers(cplx(d.x, d.y) / hp, p, pw);
  cpowers(cplx(d.x, -d.y) / hp, p, pwb);
  cpowers(cplx(d.z, 0.0) / hp, p, pz);
  const double r = hc / hp;
  MatrixXcd M = MatrixXcd::Zero(nn, nn);
  for (int t = 0; t < nn; ++t) {
    const int n = list[t][0], m = list[t][1], s = list[t][2];
    for (int a = 0; a <= s; ++a)
      for (int b = 0; b <= m - s; ++b)
        for (int c = 0; c <= n - m; ++c) {
          const double bin = binomial(s, a) * binomial(m - s, b) * binomial(n - m, c);
          M(t, sym_index(a + b + c, a + b, a)) +=
              bin * pw[s - a] * pwb[m - s - b] * pz[n - m - c] * std::pow(r, a + b + c);
        }
  }
  return M;
}

MatrixXcd l2l_matrix_sym(const Vec3 &d, double hp, double hc, int p) {
  return m2m_matrix_sym(d, hc, hp, p).transpose();
}

MatrixXcd m2l_matrix_sym(const cplx *D, int p, double hs, double ht) {
  const auto &list = sym_list(p);
  const int nn = int(list.size());
  MatrixXcd M(nn, nn);
  for (int b = 0; b < nn; ++b) {
    const int np = list[b][0], mp = list[b][1], sp = list[b][2];
    const double fb = std::pow(2.0, mp) * factorial(np - mp) * factorial(sp) * factorial(mp - sp);
    const double sg = (np % 2) ? -1.0 : 1.0;
    const double hsn = std::pow(hs, np);
    for (int a = 0; a < nn; ++a) {
      const int n = list[a][0], m = list[a][1], s = list[a][2];
      const double fa = std::pow(2.0, m) * factorial(n - m) * factorial(s) * factorial(m - s);
      M(a, b) = sg * D[sym_index(n + np, m + mp, s + sp)] * (std::pow(ht, n) * hsn / (fa * fb));
    }
  }
  return M;
}

MatrixXcd m2l_matrix_layered_sym(const std::vector<std::vector<cplx>> &S, int p, double phi, double hs, double ht) {
  const auto &list = sym_list(p);
  const int nn = int(list.size());
  std::vector<cplx> ph(4 * p + 1);
  for (int q = -2 * p; q <= 2 * p; ++q) ph[q + 2 * p] = std::exp(I * double(q) * phi);
  MatrixXcd M(nn, nn);
  for (int b = 0; b < nn; ++b) {
    const int np = list[b][0], mp = list[b][1], sp = list[b][2];
    const double hsn = std::pow(hs, np);
    for (int a = 0; a < nn; ++a) {
      const int n = list[a][0], m = list[a][1], s = list[a][2];
      const double sg = ((m + s + sp) % 2) ? -1.0 : 1.0;
      const double f = sg * factorial(m + mp) / (factorial(s) * factorial(m - s) * factorial(sp) * factorial(mp - sp));
      const cplx sv = S[nn_index(n - m, np - mp, p)][mm_index(m + mp, s + sp)];
      M(a, b) = f * ph[m + mp - 2 * (s + sp) + 2 * p] * sv * (std::pow(ht, n) * hsn);
    }
  }
  return M;
}

SymCoeffs m2m_sym(const SymCoeffs &child, const Vec3 &new_center, double new_scale) {
  const MatrixXcd M = m2m_matrix_sym(child.center - new_center, child.scale, new_scale, child.p);
  SymCoeffs out{child.p, new_center, new_scale, ExpansionRole::Source, {}};
  const VectorXcd v = M * Eigen::Map<const VectorXcd>(child.c.data(), child.c.size());
  out.c.assign(v.data(), v.data() + v.size());
  return out;
}

SymCoeffs m2l_free_sym(const SymCoeffs &src, const Vec3 &target_center, double k, double target_scale) {
  const std::vector<cplx> D = sym_derivs(k, target_center - src.center, 2 * src.p);
  const MatrixXcd M = m2l_matrix_sym(D.data(), src.p, src.scale, target_scale);
  SymCoeffs out{src.p, target_center, target_scale, ExpansionRole::Target, {}};
  const VectorXcd v = M * Eigen::Map<const VectorXcd>(src.c.data(), src.c.size());
  out.c.assign(v.data(), v.data() + v.size());
  return out;
}

SymCoeffs l2l_sym(const SymCoeffs &parent, const Vec3 &child_center, double child_scale) {
  const MatrixXcd L = l2l_matrix_sym(child_center - parent.center, parent.scale, child_scale, parent.p);
  SymCoeffs out{parent.p, child_center, child_scale, ExpansionRole::Target, {}};
  const VectorXcd v = L * Eigen::Map<const VectorXcd>(parent.c.data(), parent.c.size());
  out.c.assign(v.data(), v.data() + v.size());
  return out;
}

void eval_local_sym(const cplx *c, int p, const Vec3 &ctr, double h, const Vec3 *pts, size_t n, cplx *out) {
  const auto &list = sym_list(p);
  std::vector<cplx> pw, pwb, pz;
  for (size_t i = 0; i < n; ++i) {
    const double x = (pts[i].x - ctr.x) / h, y = (pts[i].y - ctr.y) / h, z = (pts[i].z - ctr.z) / h;
    cpowers(cplx(x, y), p, pw);
    cpowers(cplx(x, -y), p, pwb);
    cpowers(cplx(z, 0.0), p, pz);
    cplx acc = 0.0;
    for (size_t t = 0; t < list.size(); ++t) {
      const int nn = list[t][0], m = list[t][1], s = list[t][2];
      acc += c[t] * pw[s] * pwb[m - s] * pz[nn - m];
    }
    out[i] += acc;
  }
}

cplx eval_local(const SymCoeffs &coeffs, const Vec3 &point) {
  cplx out = 0.0;
  eval_local_sym(coeffs.c.data(), coeffs.p, coeffs.center, coeffs.scale, &point, 1, &out);
  return out;
}

}  // namespace lmfmm
