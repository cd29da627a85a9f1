/// \file taylor.hpp
/// \brief Taylor-expansion coefficients, derivative generators and translation operators.
///
/// Nonsymmetric variant: coefficients over multi-indices k with |k| <= p stored in
/// graded lexicographic order. Symmetric variant: coefficients over triples
/// 0 <= s <= m <= n <= p packed by n, then m, then s. Both variants support a
/// per-box length scale h: moments use (r - c)/h and local coefficients multiply
/// (r - c)^k / h^|k|, which keeps high orders representable for small boxes.
#pragma once

#include <Eigen/Dense>
#include <array>

#include "lmfmm/common.hpp"

namespace lmfmm {

using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

// ---------------------------------------------------------------- indexing

/// Number of multi-indices (or (n,m,s) triples) of total order <= p.
inline int mi_count(int p) { return (p + 1) * (p + 2) * (p + 3) / 6; }
/// Graded lexicographic position of (k1, k2, k3).
inline int mi_index(int k1, int k2, int k3) {
  const int n = k1 + k2 + k3, m = k2 + k3;
  return n * (n + 1) * (n + 2) / 6 + m * (m + 1) / 2 + k3;
}
/// All multi-indices of order <= p in storage order.
const std::vector<std::array<int, 3>> &mi_list(int p);

inline int sym_count(int p) { return mi_count(p); }
inline int sym_index(int n, int m, int s) { return n * (n + 1) * (n + 2) / 6 + m * (m + 1) / 2 + s; }
/// All (n, m, s) triples with n <= p in storage order.
const std::vector<std::array<int, 3>> &sym_list(int p);

// ---------------------------------------------------------------- containers

enum class ExpansionRole { Source, Target };

/// \brief Dense multi-index coefficients of one box.
struct NonSymCoeffs {
  int p = 0;
  Vec3 center;
  double scale = 1.0;
  ExpansionRole role = ExpansionRole::Source;
  std::vector<cplx> c;
};

/// \brief (n, m, s)-triangular coefficients of one box.
struct SymCoeffs {
  int p = 0;
  Vec3 center;
  double scale = 1.0;
  ExpansionRole role = ExpansionRole::Source;
  std::vector<cplx> c;
};

// ---------------------------------------------------------------- derivatives

/// \brief a_k = D^k h0(k|r|)/k! at offset r (complex z allowed) for |k| <= P.
///
/// Uses the coupled recurrence for a_k and b_k = D^k(R h0)/k! with
/// a_0 = h0(kR) and b_0 = R h0(kR). R is the principal complex root.
void nonsym_derivs(double k, const CVec3 &offset, int P, cplx *out);
std::vector<cplx> nonsym_derivs(double k, const CVec3 &offset, int P);

/// \brief Omega_n^m(r) = h_n(k|r|) Y_n^m for n <= P, stored at n*n + n + m.
std::vector<cplx> omega_table(double k, const Vec3 &offset, int P);
/// \brief Y_n^m(theta, phi) with the (-1)^m prefactor, n <= P, stored at n*n + n + m.
std::vector<cplx> spherical_harmonics(double theta, double phi, int P);

enum class Ladder { Plus, Minus, Zero };
/// \brief Single-step ladder coefficients: D Omega_n^m = A Omega_{n+1}^{m'} + B Omega_{n-1}^{m'}.
void ladder_step(Ladder op, int n, int m, double &A, double &B);
/// \brief C_rs, r = 0..s, such that D^s Omega_n^m = sum_r C_rs Omega_{n-s+2r}^{m+ds}.
std::vector<double> ladder_power_coeffs(Ladder op, int n, int m, int s);

/// \brief D_nm^s h0(k|r|) = (dx - i dy)^s (dx + i dy)^{m-s} dz^{n-m} h0 for n <= P, sym layout.
void sym_derivs(double k, const Vec3 &offset, int P, cplx *out);
std::vector<cplx> sym_derivs(double k, const Vec3 &offset, int P);

/// \brief D_nm^s expressed through the nonsymmetric tensor a_k (binomial recombination).
std::vector<cplx> sym_from_nonsym(const std::vector<cplx> &a, int P);

// ---------------------------------------------------------------- nonsymmetric operators

NonSymCoeffs source_te_nonsym(const std::vector<Vec3> &pts, const std::vector<cplx> &q, const Vec3 &center,
                              int p, double scale = 1.0);
/// Accumulate moments of n points into c (length mi_count(p)).
void accumulate_moments_nonsym(const Vec3 *pts, const cplx *q, size_t n, const Vec3 &center, double scale, int p,
                               cplx *c);
/// Matrix mapping child moments (scale hc) to parent moments (scale hp); d = child - parent center.
MatrixXcd m2m_matrix_nonsym(const Vec3 &d, double hc, double hp, int p);
/// Matrix mapping parent local (scale hp) to child local (scale hc); d = child - parent center.
MatrixXcd l2l_matrix_nonsym(const Vec3 &d, double hp, double hc, int p);
/// Free-space M2L matrix from a_K (|K| <= 2p) at offset target - source.
MatrixXcd m2l_matrix_nonsym(const cplx *a, int p, double hs, double ht);
/// Layered M2L matrix from T^{k3'}_K tensors (one per k3' = 0..p, each of order 2p).
MatrixXcd m2l_matrix_layered_nonsym(const std::vector<std::vector<cplx>> &T, int p, double hs, double ht);
NonSymCoeffs m2m_nonsym(const NonSymCoeffs &child, const Vec3 &new_center, double new_scale = 1.0);
NonSymCoeffs m2l_free_nonsym(const NonSymCoeffs &src, const Vec3 &target_center, double k,
                             double target_scale = 1.0);
NonSymCoeffs l2l_nonsym(const NonSymCoeffs &parent, const Vec3 &child_center, double child_scale = 1.0);
cplx eval_local(const NonSymCoeffs &coeffs, const Vec3 &point);
/// Evaluate local coefficients c (scale h, center ctr) at n points, adding into out.
void eval_local_nonsym(const cplx *c, int p, const Vec3 &ctr, double h, const Vec3 *pts, size_t n, cplx *out);
/// Far-field value of source moments: sum_k alpha_k (-1)^{|k|} a_k k!/k! evaluated at point.
cplx eval_multipole(const NonSymCoeffs &src, double k, const Vec3 &point);

// ---------------------------------------------------------------- symmetric operators

SymCoeffs source_te_sym(const std::vector<Vec3> &pts, const std::vector<cplx> &q, const Vec3 &center, int p,
                        double scale = 1.0);
void accumulate_moments_sym(const Vec3 *pts, const cplx *q, size_t n, const Vec3 &center, double scale, int p,
                            cplx *c);
MatrixXcd m2m_matrix_sym(const Vec3 &d, double hc, double hp, int p);
MatrixXcd l2l_matrix_sym(const Vec3 &d, double hp, double hc, int p);
/// Free-space symmetric M2L matrix from D values (order 2p) at offset target - source.
MatrixXcd m2l_matrix_sym(const cplx *D, int p, double hs, double ht);
/// Layered symmetric M2L matrix from S values S[nn_index][mm_index] and azimuth phi.
MatrixXcd m2l_matrix_layered_sym(const std::vector<std::vector<cplx>> &S, int p, double phi, double hs, double ht);
SymCoeffs m2m_sym(const SymCoeffs &child, const Vec3 &new_center, double new_scale = 1.0);
SymCoeffs m2l_free_sym(const SymCoeffs &src, const Vec3 &target_center, double k, double target_scale = 1.0);
SymCoeffs l2l_sym(const SymCoeffs &parent, const Vec3 &child_center, double child_scale = 1.0);
cplx eval_local(const SymCoeffs &coeffs, const Vec3 &point);
void eval_local_sym(const cplx *c, int p, const Vec3 &ctr, double h, const Vec3 *pts, size_t n, cplx *out);

}  // namespace lmfmm
