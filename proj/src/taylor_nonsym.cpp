/// \file taylor_nonsym.cpp
/// \brief Cartesian derivative recurrence and the multi-index translation operators.

#include <algorithm>

#include "lmfmm/special.hpp"
#include "lmfmm/taylor.hpp"

namespace lmfmm {

namespace {

// Product of componentwise binomials C(k, j).
double multi_binomial(const std::array<int, 3> &k, const std::array<int, 3> &j) {
  return binomial(k[0], j[0]) * binomial(k[1], j[1]) * binomial(k[2], j[2]);
}

// pw[i][e] = v_i^e for e <= p.
template <class T>
void powers(const T *v, int p, std::vector<std::array<T, 3>> &pw) {
  pw.assign(p + 1, {T(1), T(1), T(1)});
  for (int e = 1; e <= p; ++e)
    for (int i = 0; i < 3; ++i) pw[e][i] = pw[e - 1][i] * v[i];
}

}  // namespace

void nonsym_derivs(double k, const CVec3 &off, int P, cplx *a) {
  if (P < 0) throw DomainError("nonsym_derivs: negative order");
  const cplx x[3] = {off.x, off.y, off.z};
  const cplx R2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
  const cplx R = std::sqrt(R2);
  if (std::abs(R) == 0.0) throw DomainError("nonsym_derivs: zero offset");
  const auto &list = mi_list(P);
  const int n_all = int(list.size());
  std::vector<cplx> b(n_all);
  const cplx ik = I * k;
  a[0] = hankel0(k * R);
  b[0] = R * a[0];
  for (int idx = 1; idx < n_all; ++idx) {
    const auto &kk = list[idx];
    const int n = kk[0] + kk[1] + kk[2];
    cplx xa = 0.0, aa = 0.0, xb = 0.0, bb = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (kk[j] >= 1) {
        auto m = kk;
        --m[j];
        const int id = mi_index(m[0], m[1], m[2]);
        xa += x[j] * a[id];
        xb += x[j] * b[id];
      }
      if (kk[j] >= 2) {
        auto m = kk;
        m[j] -= 2;
        const int id = mi_index(m[0], m[1], m[2]);
        aa += a[id];
        bb += b[id];
      }
    }
    b[idx] = ik * (xa + aa) / double(n);
    a[idx] = (-double(2 * n - 1) * xa - double(n - 1) * aa + ik * (xb + bb)) / (double(n) * R2);
  }
}

std::vector<cplx> nonsym_derivs(double k, const CVec3 &offset, int P) {
  std::vector<cplx> out(mi_count(P));
  nonsym_derivs(k, offset, P, out.data());
  return out;
}

void accumulate_moments_nonsym(const Vec3 *pts, const cplx *q, size_t n, const Vec3 &center, double scale, int p,
                               cplx *c) {
  const auto &list = mi_list(p);
  std::vector<std::array<double, 3>> pw;
  for (size_t i = 0; i < n; ++i) {
    const double v[3] = {(pts[i].x - center.x) / scale, (pts[i].y - center.y) / scale,
                         (pts[i].z - center.z) / scale};
    powers(v, p, pw);
    for (size_t t = 0; t < list.size(); ++t) {
      const auto &k = list[t];
      c[t] += q[i] * (pw[k[0]][0] * pw[k[1]][1] * pw[k[2]][2]);
    }
  }
}

NonSymCoeffs source_te_nonsym(const std::vector<Vec3> &pts, const std::vector<cplx> &q, const Vec3 &center,
                              int p, double scale) {
  if (pts.size() != q.size()) throw DomainError("source_te_nonsym: size mismatch");
  NonSymCoeffs out{p, center, scale, ExpansionRole::Source, std::vector<cplx>(mi_count(p), 0.0)};
  accumulate_moments_nonsym(pts.data(), q.data(), pts.size(), center, scale, p, out.c.data());
  return out;
}

MatrixXcd m2m_matrix_nonsym(const Vec3 &d, double hc, double hp, int p) {
  const auto &list = mi_list(p);
  const int n = int(list.size());
  const double dv[3] = {d.x / hp, d.y / hp, d.z / hp};
  std::vector<std::array<double, 3>> pw;
  powers(dv, p, pw);
  const double r = hc / hp;
  MatrixXcd M = MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    const auto &k = list[a];
    for (int b = 0; b <= a; ++b) {
      const auto &j = list[b];
      if (j[0] > k[0] || j[1] > k[1] || j[2] > k[2]) continue;
      M(a, b) = multi_binomial(k, j) * pw[k[0] - j[0]][0] * pw[k[1] - j[1]][1] * pw[k[2] - j[2]][2] *
                std::pow(r, j[0] + j[1] + j[2]);
    }
  }
  return M;
}

MatrixXcd l2l_matrix_nonsym(const Vec3 &d, double hp, double hc, int p) {
  // The local shift is the transpose pattern of the moment shift.
  return m2m_matrix_nonsym(d, hc, hp, p).transpose();
}

MatrixXcd m2l_matrix_nonsym(const cplx *a, int p, double hs, double ht) {
  const auto &list = mi_list(p);
  const int n = int(list.size());
  MatrixXcd M(n, n);
  std::vector<double> hsp(p + 1), htp(p + 1);
  for (int e = 0; e <= p; ++e) {
    hsp[e] = std::pow(hs, e);
    htp[e] = std::pow(ht, e);
  }
  for (int bcol = 0; bcol < n; ++bcol) {
    const auto &kp = list[bcol];
    const int np = kp[0] + kp[1] + kp[2];
    const double sgn = (np % 2) ? -1.0 : 1.0;
    for (int arow = 0; arow < n; ++arow) {
      const auto &k = list[arow];
      const std::array<int, 3> K = {k[0] + kp[0], k[1] + kp[1], k[2] + kp[2]};
      M(arow, bcol) = sgn * multi_binomial(K, k) * a[mi_index(K[0], K[1], K[2])] *
                      (htp[k[0] + k[1] + k[2]] * hsp[np]);
    }
  }
  return M;
}

MatrixXcd m2l_matrix_layered_nonsym(const std::vector<std::vector<cplx>> &T, int p, double hs, double ht) {
  if (int(T.size()) < p + 1) throw TableError("m2l_matrix_layered_nonsym: missing image tensors");
  const auto &list = mi_list(p);
  const int n = int(list.size());
  MatrixXcd M(n, n);
  for (int bcol = 0; bcol < n; ++bcol) {
    const auto &kp = list[bcol];
    const int np = kp[0] + kp[1] + kp[2];
    const double sgn = ((kp[0] + kp[1]) % 2) ? -1.0 : 1.0;
    const std::vector<cplx> &t = T[kp[2]];
    for (int arow = 0; arow < n; ++arow) {
      const auto &k = list[arow];
      const std::array<int, 3> K = {k[0] + kp[0], k[1] + kp[1], k[2]};
      M(arow, bcol) = sgn * multi_binomial(K, k) * t[mi_index(K[0], K[1], K[2])] *
                      (std::pow(ht, k[0] + k[1] + k[2]) * std::pow(hs, np));
    }
  }
  return M;
}

NonSymCoeffs m2m_nonsym(const NonSymCoeffs &child, const Vec3 &new_center, double new_scale) {
  const MatrixXcd M = m2m_matrix_nonsym(child.center - new_center, child.scale, new_scale, child.p);
  NonSymCoeffs out{child.p, new_center, new_scale, ExpansionRole::Source, {}};
  const VectorXcd v = M * Eigen::Map<const VectorXcd>(child.c.data(), child.c.size());
  out.c.assign(v.data(), v.data() + v.size());
  return out;
}

NonSymCoeffs m2l_free_nonsym(const NonSymCoeffs &src, const Vec3 &target_center, double k, double target_scale) {
  const Vec3 d = target_center - src.center;
  const std::vector<cplx> a = nonsym_derivs(k, CVec3{d.x, d.y, d.z}, 2 * src.p);
  const MatrixXcd M = m2l_matrix_nonsym(a.data(), src.p, src.scale, target_scale);
  NonSymCoeffs out{src.p, target_center, target_scale, ExpansionRole::Target, {}};
  const VectorXcd v = M * Eigen::Map<const VectorXcd>(src.c.data(), src.c.size());
  out.c.assign(v.data(), v.data() + v.size());
  return out;
}

NonSymCoeffs l2l_nonsym(const NonSymCoeffs &parent, const Vec3 &child_center, double child_scale) {
  const MatrixXcd L = l2l_matrix_nonsym(child_center - parent.center, parent.scale, child_scale, parent.p);
  NonSymCoeffs out{parent.p, child_center, child_scale, ExpansionRole::Target, {}};
  const VectorXcd v = L * Eigen::Map<const VectorXcd>(parent.c.data(), parent.c.size());
  out.c.assign(v.data(), v.data() + v.size());
  return out;
}

void eval_local_nonsym(const cplx *c, int p, const Vec3 &ctr, double h, const Vec3 *pts, size_t n, cplx *out) {
  const auto &list = mi_list(p);
  std::vector<std::array<double, 3>> pw;
  for (size_t i = 0; i < n; ++i) {
    const double v[3] = {(pts[i].x - ctr.x) / h, (pts[i].y - ctr.y) / h, (pts[i].z - ctr.z) / h};
    powers(v, p, pw);
    cplx acc = 0.0;
    for (size_t t = 0; t < list.size(); ++t) {
      const auto &k = list[t];
      acc += c[t] * (pw[k[0]][0] * pw[k[1]][1] * pw[k[2]][2]);
    }
    out[i] += acc;
  }
}

cplx eval_local(const NonSymCoeffs &coeffs, const Vec3 &point) {
  cplx out = 0.0;
  eval_local_nonsym(coeffs.c.data(), coeffs.p, coeffs.center, coeffs.scale, &point, 1, &out);
  return out;
}

cplx eval_multipole(const NonSymCoeffs &src, double k, const Vec3 &point) {
  const Vec3 d = point - src.center;
  const std::vector<cplx> a = nonsym_derivs(k, CVec3{d.x, d.y, d.z}, src.p);
  const auto &list = mi_list(src.p);
  cplx acc = 0.0;
  for (size_t t = 0; t < list.size(); ++t) {
    const int n = list[t][0] + list[t][1] + list[t][2];
    acc += src.c[t] * a[t] * (((n % 2) ? -1.0 : 1.0) * std::pow(src.scale, n));
  }
  return acc;
}

}  // namespace lmfmm
