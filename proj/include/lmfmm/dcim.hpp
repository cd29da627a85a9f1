/// \file dcim.hpp
/// \brief Two-level discrete complex images for the z'-derivative densities.
///
/// For the up-going component the sampled density is
///   Theta(k_z) = e^{i k_z (z_anchor - d_l)} (1/n'!) d^{n'} sigma~^up / dz'^{n'}
/// and after fitting Theta ~ sum_j A_j e^{-i k_z Z_j} each term becomes a spherical
/// Hankel function centred at the complex image height z_anchor + Z_j. For the
/// down-going component the anchor is the largest target height, the exponent is
/// e^{i k_z (d_{l-1} - z_anchor)} and images sit at z_anchor - Z_j.
#pragma once

#include "lmfmm/medium.hpp"

namespace lmfmm {

/// \brief Sampling paths in the k_lz plane.
struct DcimPath {
  double T0 = 1.0;
  double T1 = 10.0;
  int samples_per_level = 101;
};

/// \brief Default path: T0 = sqrt(((k_max + k_min)/k_l)^2 - 1), T1 = 10, 101 samples.
DcimPath default_dcim_path(const LayeredMedium &m, int l);

/// \brief Complex exponential model f(t) = sum_j c_j e^{s_j t}.
struct ExpModel {
  std::vector<cplx> c, s;
  double residual = 0.0;
  size_t size() const { return c.size(); }
};

/// \brief Samples of Theta along both levels.
struct DcimSamples {
  std::vector<cplx> kz1, theta1;  ///< level 1: k_z = i k (T0 + t), t in [0, T1]
  std::vector<cplx> kz2, theta2;  ///< level 2: k_z = k (1 - t/T0 + i t), t in [0, T0]
  double dt1 = 0.0, dt2 = 0.0;
};

/// \brief One fitted image set.
struct DcimImageSet {
  int l = 0, lp = 0;
  Direction dir = Direction::Up;
  int order = 0;         ///< z'-derivative order n'
  double zp = 0.0;       ///< source height the densities were sampled at
  double anchor = 0.0;   ///< z_min (up) or z_max (down) of the target layer
  std::vector<cplx> A;   ///< amplitudes
  std::vector<cplx> Z;   ///< complex offsets
  double residual = 0.0;        ///< max fit deviation on the fitting samples
  double dense_residual = 0.0;  ///< max deviation on a 2x denser verification grid
  size_t size() const { return A.size(); }
  /// Complex height of image j.
  cplx image_z(size_t j) const { return dir == Direction::Up ? anchor + Z[j] : anchor - Z[j]; }
};

/// \brief Theta sampled along both levels.
DcimSamples sample_theta(const LayeredMedium &m, int l, int lp, int order, double zp, double anchor,
                         const DcimPath &path, Direction dir = Direction::Up);

/// \brief Generalized pencil-of-function fit of uniform samples.
///
/// The model order is the smallest M (among singular values above a noise
/// threshold, capped by max_terms) whose max sample residual is <= tol.
ExpModel gpof_fit(const std::vector<cplx> &samples, double step, double tol, int max_terms);
/// \brief Evaluate an exponential model at t.
cplx eval_exp_model(const ExpModel &m, double t);

/// \brief Two-level fit: level 1 first, then level 2 on the remainder.
///
/// tol is relative to the largest sampled |Theta|.
DcimImageSet two_level_dcim(const LayeredMedium &m, int l, int lp, int order, double zp, double anchor,
                            const DcimPath &path, double tol, Direction dir = Direction::Up,
                            int max_terms = 25);

/// \brief Fit over several level-2 path lengths, keeping the smallest max(residual, dense_residual).
///
/// Candidates are T0 of the default path scaled by 1, 1.5, 2 and 3, plus T0 = 2, 4, 6; if none
/// reaches tol/10 the same paths are retried with 2n-1 samples per level.
/// Throws FitError when no candidate reaches tol on both sample grids.
DcimImageSet two_level_dcim_auto(const LayeredMedium &m, int l, int lp, int order, double zp, double anchor, double tol,
                                 Direction dir = Direction::Up, int max_terms = 25);

/// \brief sum_j A_j e^{-i k_z Z_j}.
cplx eval_image_spectrum(const DcimImageSet &set, cplx kz);

/// \brief sum_j A_j h0(k_l R_j) with R_j the complex distance from r to image j above r'.
cplx eval_images(const DcimImageSet &set, double kl, const Vec3 &r, const Vec3 &rp);

/// \brief D_r^k (image sum)/k! for |k| <= P (multi-index layout). Source-side horizontal
/// derivatives follow from D_{x'} = -D_x, D_{y'} = -D_y.
std::vector<cplx> eval_image_derivatives(const DcimImageSet &set, double kl, const Vec3 &r, const Vec3 &rp,
                                         int P);

}  // namespace lmfmm
