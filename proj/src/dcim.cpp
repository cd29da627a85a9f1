/// \file dcim.cpp
/// \brief Density sampling, GPOF exponential fitting and complex image evaluation.

#include "lmfmm/dcim.hpp"
#include "lmfmm/sommerfeld.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <limits>

#include "lmfmm/special.hpp"
#include "lmfmm/taylor.hpp"

namespace lmfmm {

DcimPath default_dcim_path(const LayeredMedium &m, int l) {
  DcimPath p;
  const double r = (m.k_max() + m.k_min()) / m.k(l);
  p.T0 = std::sqrt(std::max(r * r - 1.0, 1e-2));
  return p;
}

namespace {

cplx theta_at(const LayeredMedium &m, int l, int lp, int order, double zp, double anchor, Direction dir, cplx kz) {
  const double kl = m.k(l);
  const cplx krho = std::sqrt(kl * kl - kz * kz);
  const ReactionCoeffs c = solve_reaction_coeffs_general(m, l, lp, krho);
  const cplx kpz = (lp == l) ? kz : vertical_wavenumber(m.k(lp), krho);
  std::vector<cplx> sig(order + 1);
  density_sigma_tilde_orders(m, c, lp, kpz, zp, dir, order, sig.data());
  const cplx ph = dir == Direction::Up ? std::exp(I * kz * (anchor - m.depth(l)))
                                       : std::exp(I * kz * (m.depth(l - 1) - anchor));
  return ph * sig[order];
}

// Max that propagates NaN so a broken model can never look exact.
double nan_max(double a, double b) { return (std::isnan(b) || b > a) ? b : a; }

cplx kz_level1(double k, const DcimPath &p, double t) { return I * k * (p.T0 + t); }
cplx kz_level2(double k, const DcimPath &p, double t) { return k * (1.0 - t / p.T0 + I * t); }

}  // namespace

DcimSamples sample_theta(const LayeredMedium &m, int l, int lp, int order, double zp, double anchor,
                         const DcimPath &path, Direction dir) {
  if (path.T0 <= 0.0 || path.T1 <= 0.0 || path.samples_per_level < 4) throw DomainError("sample_theta: bad path");
  if (!m.admissible(l, dir)) throw DomainError("sample_theta: direction not admissible in this layer");
  if (lp < 0 || lp >= m.num_layers()) throw DomainError("sample_theta: bad source layer");
  if (!(vertical_gap(m, l, lp, dir, anchor, zp) > 0.0))
    throw DomainError("sample_theta: density does not decay for this source height and anchor");
  const int n = path.samples_per_level;
  const double k = m.k(l);
  DcimSamples s;
  s.dt1 = path.T1 / (n - 1);
  s.dt2 = path.T0 / (n - 1);
  for (int i = 0; i < n; ++i) {
    const cplx kz1 = kz_level1(k, path, i * s.dt1);
    const cplx kz2 = kz_level2(k, path, i * s.dt2);
    s.kz1.push_back(kz1);
    s.kz2.push_back(kz2);
    s.theta1.push_back(theta_at(m, l, lp, order, zp, anchor, dir, kz1));
    s.theta2.push_back(theta_at(m, l, lp, order, zp, anchor, dir, kz2));
  }
  return s;
}

cplx eval_exp_model(const ExpModel &m, double t) {
  cplx acc = 0.0;
  for (size_t j = 0; j < m.size(); ++j) acc += m.c[j] * std::exp(m.s[j] * t);
  return acc;
}

namespace {

// Smallest model meeting tol, or the best-residual model when none does.
ExpModel gpof_core(const std::vector<cplx> &y, double step, double tol, int max_terms, int &tried) {
  const int N = int(y.size());
  if (max_terms < 0 || N < 2 * std::max(max_terms, 1)) throw DomainError("gpof_fit: not enough samples");
  ExpModel best;
  best.residual = 1e300;
  double ymax = 0.0;
  for (const auto &v : y) ymax = std::max(ymax, std::abs(v));
  tried = 0;
  if (ymax <= tol) {
    best.residual = ymax;
    return best;
  }
  const int L = N / 2;
  Eigen::MatrixXcd Y(N - L, L + 1);
  for (int i = 0; i < N - L; ++i)
    for (int j = 0; j <= L; ++j) Y(i, j) = y[i + j];
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(Y, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > 1e-15 * sv(0) * std::sqrt(double(N))) ++rank;
  const int Mmax = std::min(max_terms, rank);
  const Eigen::MatrixXcd Vh = svd.matrixV().adjoint();
  Eigen::VectorXcd yv(N);
  for (int i = 0; i < N; ++i) yv(i) = y[i];
  double best_res = 1e300;
  for (int M = 1; M <= Mmax; ++M) {
    const Eigen::MatrixXcd A = Vh.topRows(M).leftCols(L);
    const Eigen::MatrixXcd B = Vh.topRows(M).rightCols(L);
    const Eigen::MatrixXcd W = B * A.completeOrthogonalDecomposition().pseudoInverse();
    const Eigen::VectorXcd zall = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(W, false).eigenvalues();
    // Vanishing or non-finite poles only touch the first sample and are dropped.
    std::vector<cplx> z;
    for (int j = 0; j < M; ++j)
      if (std::isfinite(std::abs(zall(j))) && std::abs(zall(j)) > 1e-12) z.push_back(zall(j));
    const int Mz = int(z.size());
    if (Mz == 0) continue;
    Eigen::MatrixXcd V(N, Mz);
    for (int j = 0; j < Mz; ++j) {
      cplx zz = 1.0;
      for (int i = 0; i < N; ++i) {
        V(i, j) = zz;
        zz *= z[j];
      }
    }
    const Eigen::VectorXcd c = V.colPivHouseholderQr().solve(yv);
    const double res = (V * c - yv).cwiseAbs().maxCoeff();
    if (!std::isfinite(res)) continue;
    if (res < best_res) {
      best_res = res;
      best.c.assign(c.data(), c.data() + Mz);
      best.s.resize(Mz);
      for (int j = 0; j < Mz; ++j) best.s[j] = std::log(z[j]) / step;
      best.residual = res;
    }
    if (res <= tol) break;
  }
  tried = Mmax;
  return best;
}

}  // namespace

ExpModel gpof_fit(const std::vector<cplx> &y, double step, double tol, int max_terms) {
  int tried = 0;
  ExpModel best = gpof_core(y, step, tol, max_terms, tried);
  if (best.residual <= tol) return best;
  const double best_res = best.residual;
  const int Mmax = tried;
  char msg[160];
  std::snprintf(msg, sizeof msg, "gpof_fit: residual %.3e above tolerance %.3e with %d terms", best_res, tol, Mmax);
  throw FitError(msg);
}

DcimImageSet two_level_dcim_auto(const LayeredMedium &m, int l, int lp, int order, double zp, double anchor, double tol,
                                 Direction dir, int max_terms) {
  const DcimPath base = default_dcim_path(m, l);
  std::vector<double> t0s;
  for (double f : {1.0, 1.5, 2.0, 3.0}) t0s.push_back(f * base.T0);
  for (double t : {2.0, 4.0, 6.0}) t0s.push_back(t);
  DcimImageSet best;
  double best_err = std::numeric_limits<double>::infinity();
  std::string last_error = "no candidate path";
  // Denser sampling is only tried when the default count cannot reach tol.
  for (int ns : {base.samples_per_level, 2 * base.samples_per_level - 1}) {
    for (double t0 : t0s) {
      DcimPath path = base;
      path.T0 = t0;
      path.samples_per_level = ns;
      try {
        DcimImageSet s = two_level_dcim(m, l, lp, order, zp, anchor, path, tol, dir, max_terms);
        const double e = std::max(s.residual, s.dense_residual);
        if (e < best_err) {
          best_err = e;
          best = std::move(s);
        }
      } catch (const FitError &e) {
        last_error = e.what();
      }
    }
    if (best_err <= 0.1 * tol) break;
  }
  if (!(best_err <= tol)) {
    char msg[320];
    std::snprintf(msg, sizeof msg, "two_level_dcim_auto: best residual %.3e above %.3e (l=%d l'=%d order=%d; %s)",
                  best_err, tol, l, lp, order, last_error.c_str());
    throw FitError(msg);
  }
  return best;
}

cplx eval_image_spectrum(const DcimImageSet &set, cplx kz) {
  cplx acc = 0.0;
  for (size_t j = 0; j < set.size(); ++j) acc += set.A[j] * std::exp(-I * kz * set.Z[j]);
  return acc;
}

DcimImageSet two_level_dcim(const LayeredMedium &m, int l, int lp, int order, double zp, double anchor,
                            const DcimPath &path, double tol, Direction dir, int max_terms) {
  const DcimSamples s = sample_theta(m, l, lp, order, zp, anchor, path, dir);
  const double k = m.k(l);
  DcimImageSet set;
  set.l = l;
  set.lp = lp;
  set.dir = dir;
  set.order = order;
  set.zp = zp;
  set.anchor = anchor;
  double scale = 0.0;
  for (const auto &v : s.theta1) scale = std::max(scale, std::abs(v));
  for (const auto &v : s.theta2) scale = std::max(scale, std::abs(v));
  // A medium with one wavenumber scatters nothing; its samples are rounding noise.
  if (scale == 0.0 || m.homogeneous()) return set;
  // GPOF aims well below the acceptance tolerance; the final check uses tol itself.
  const double atol = 1e-4 * tol * scale;
  const int cap = std::min(max_terms, path.samples_per_level / 4);
  // Level 1: k_z = i k (T0 + t) so e^{-i k_z Z} = e^{k T0 Z} e^{k Z t}.
  int tried = 0;
  const ExpModel m1 = gpof_core(s.theta1, s.dt1, atol, cap, tried);
  for (size_t j = 0; j < m1.size(); ++j) {
    const cplx Z = m1.s[j] / k;
    set.Z.push_back(Z);
    set.A.push_back(m1.c[j] * std::exp(-k * path.T0 * Z));
  }
  // Level 2: k_z = k - k t (1/T0 - i) so e^{-i k_z Z} = e^{-i k Z} e^{k Z (1 + i/T0) t}.
  std::vector<cplx> rem(s.theta2.size());
  for (size_t i = 0; i < rem.size(); ++i) rem[i] = s.theta2[i] - eval_image_spectrum(set, s.kz2[i]);
  const ExpModel m2 = gpof_core(rem, s.dt2, atol, cap, tried);
  for (size_t j = 0; j < m2.size(); ++j) {
    const cplx Z = m2.s[j] / (k * (1.0 + I / path.T0));
    set.Z.push_back(Z);
    set.A.push_back(m2.c[j] * std::exp(I * k * Z));
  }
  // Drop terms whose conversion over- or underflowed.
  {
    std::vector<cplx> A2, Z2;
    for (size_t j = 0; j < set.size(); ++j)
      if (std::isfinite(std::abs(set.A[j])) && std::isfinite(std::abs(set.Z[j])) && set.A[j] != 0.0) {
        A2.push_back(set.A[j]);
        Z2.push_back(set.Z[j]);
      }
    set.A.swap(A2);
    set.Z.swap(Z2);
  }
  // Joint least-squares refit of all amplitudes over both levels with offsets fixed.
  const int M = int(set.size());
  if (M > 0) {
    const int ns = int(s.kz1.size() + s.kz2.size());
    Eigen::MatrixXcd E(ns, M);
    Eigen::VectorXcd rhs(ns);
    for (int i = 0; i < ns; ++i) {
      const bool lv1 = i < int(s.kz1.size());
      const cplx kz = lv1 ? s.kz1[i] : s.kz2[i - s.kz1.size()];
      rhs(i) = lv1 ? s.theta1[i] : s.theta2[i - s.kz1.size()];
      for (int j = 0; j < M; ++j) E(i, j) = std::exp(-I * kz * set.Z[j]);
    }
    Eigen::VectorXd cn = E.colwise().norm().transpose();
    for (int j = 0; j < M; ++j)
      if (cn(j) > 0.0) E.col(j) /= cn(j);
    Eigen::VectorXcd A = E.colPivHouseholderQr().solve(rhs);
    double old_res = 0.0, new_res = 0.0;
    for (int i = 0; i < ns; ++i) {
      const bool lv1 = i < int(s.kz1.size());
      const cplx kz = lv1 ? s.kz1[i] : s.kz2[i - s.kz1.size()];
      old_res = nan_max(old_res, std::abs(rhs(i) - eval_image_spectrum(set, kz)));
      new_res = nan_max(new_res, std::abs(rhs(i) - (E.row(i) * A)(0)));
    }
    if (new_res < old_res || std::isnan(old_res))
      for (int j = 0; j < M; ++j) set.A[j] = A(j) / cn(j);
  }
  double res = 0.0;
  for (size_t i = 0; i < s.theta1.size(); ++i)
    res = nan_max(res, std::abs(s.theta1[i] - eval_image_spectrum(set, s.kz1[i])));
  for (size_t i = 0; i < s.theta2.size(); ++i)
    res = nan_max(res, std::abs(s.theta2[i] - eval_image_spectrum(set, s.kz2[i])));
  set.residual = res / scale;
  DcimPath dense = path;
  dense.samples_per_level = 2 * path.samples_per_level - 1;
  const DcimSamples d = sample_theta(m, l, lp, order, zp, anchor, dense, dir);
  double dres = 0.0;
  for (size_t i = 0; i < d.theta1.size(); ++i)
    dres = nan_max(dres, std::abs(d.theta1[i] - eval_image_spectrum(set, d.kz1[i])));
  for (size_t i = 0; i < d.theta2.size(); ++i)
    dres = nan_max(dres, std::abs(d.theta2[i] - eval_image_spectrum(set, d.kz2[i])));
  set.dense_residual = dres / scale;
  if (!(set.residual <= tol) || !std::isfinite(set.dense_residual)) {
    char msg[200];
    std::snprintf(msg, sizeof msg, "two_level_dcim: relative residual %.3e above %.3e (l=%d l'=%d order=%d)",
                  set.residual, tol, l, lp, order);
    throw FitError(msg);
  }
  return set;
}

cplx eval_images(const DcimImageSet &set, double kl, const Vec3 &r, const Vec3 &rp) {
  const double dx = r.x - rp.x, dy = r.y - rp.y;
  cplx acc = 0.0;
  for (size_t j = 0; j < set.size(); ++j) {
    const cplx dz = r.z - set.image_z(j);
    const cplx R = std::sqrt(dx * dx + dy * dy + dz * dz);
    acc += set.A[j] * hankel0(kl * R);
  }
  return acc;
}

std::vector<cplx> eval_image_derivatives(const DcimImageSet &set, double kl, const Vec3 &r, const Vec3 &rp,
                                         int P) {
  const int n = mi_count(P);
  std::vector<cplx> out(n, 0.0), a(n);
  for (size_t j = 0; j < set.size(); ++j) {
    nonsym_derivs(kl, CVec3{r.x - rp.x, r.y - rp.y, r.z - set.image_z(j)}, P, a.data());
    for (int i = 0; i < n; ++i) out[i] += set.A[j] * a[i];
  }
  return out;
}

}  // namespace lmfmm
