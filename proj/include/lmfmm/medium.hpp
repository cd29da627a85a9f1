/// \file medium.hpp
/// \brief Layered medium description and spectral reaction densities.
///
/// Conventions. Layers are numbered 0..L from the top; interface d_l separates
/// layer l (above) from layer l+1 (below). In target layer l the reaction field
/// is written with decaying exponentials referenced at the nearest interface:
///   up-going   U e^{i k_lz (z - d_l)}       (absent in the bottom layer L)
///   down-going D e^{i k_lz (d_{l-1} - z)}   (absent in the top layer 0)
/// The source-side factors are e^{i k'_z (z' - d_l')} for the "up" column and
/// e^{i k'_z (d_{l'-1} - z')} for the "down" column.
#pragma once

#include "lmfmm/common.hpp"

namespace lmfmm {

enum class Direction { Up = 0, Down = 1 };

/// \brief Horizontally stratified medium with real positive wavenumbers.
class LayeredMedium {
 public:
  LayeredMedium() = default;
  /// \param depths interface depths d_0 > d_1 > ... > d_{L-1}
  /// \param wavenumbers k_0 ... k_L
  LayeredMedium(std::vector<double> depths, std::vector<double> wavenumbers);

  int num_interfaces() const { return int(depths_.size()); }
  int num_layers() const { return int(k_.size()); }
  double k(int layer) const { return k_.at(layer); }
  const std::vector<double> &wavenumbers() const { return k_; }
  const std::vector<double> &depths() const { return depths_; }
  double depth(int i) const { return depths_.at(i); }
  /// Upper boundary of a layer (+inf for the top layer).
  double top(int layer) const;
  /// Lower boundary of a layer (-inf for the bottom layer).
  double bottom(int layer) const;
  /// Thickness d_{l-1} - d_l for interior layers.
  double thickness(int layer) const;
  /// Layer containing z; throws DomainError when z lies on an interface.
  int layer_of(double z) const;
  /// True when z is strictly inside the given layer.
  bool inside(int layer, double z) const;
  double k_min() const;
  double k_max() const;
  /// True when the (target layer, direction) pair carries a component.
  bool admissible(int layer, Direction dir) const;
  /// True when every layer has the same wavenumber (no reflected field).
  bool homogeneous() const;

 private:
  std::vector<double> depths_;
  std::vector<double> k_;
};

/// \brief sqrt(k^2 - krho^2) on the branch with nonnegative imaginary part.
cplx vertical_wavenumber(double k, cplx krho);
cplx vertical_wavenumber(const LayeredMedium &m, int layer, cplx krho);

/// \brief Reaction densities sigma^{ab} for one (target, source) layer pair.
///
/// First index: target wave direction; second: source-side column.
struct ReactionCoeffs {
  cplx uu = 0, ud = 0, du = 0, dd = 0;
  bool up_zero = false;    ///< target layer is the bottom layer
  bool down_zero = false;  ///< target layer is the top layer
  bool col_up_zero = false;    ///< source layer is the bottom layer
  bool col_down_zero = false;  ///< source layer is the top layer
};

/// \brief General L-layer solver (global banded interface system).
ReactionCoeffs solve_reaction_coeffs_general(const LayeredMedium &m, int l, int lp, cplx krho);

/// \brief All target layers for one source layer in a single solve.
std::vector<ReactionCoeffs> solve_reaction_coeffs_all(const LayeredMedium &m, int lp, cplx krho);

/// \brief Explicit two-layer formulas (L = 1), in the conventions above.
ReactionCoeffs closed_form_two_layer(const LayeredMedium &m, int l, int lp, cplx krho);

/// \brief Intermediate quantities of the explicit three-layer formulas.
struct ThreeLayerKappas {
  cplx k11, k12, k21, k21p, k22, k23, k31, k32;
  cplx den_top;     ///< k0 k0z kappa11 - i k1 k1z kappa12
  cplx den_bottom;  ///< k2 k2z kappa31 - i k1 k1z kappa32
};
ThreeLayerKappas three_layer_kappas(const LayeredMedium &m, cplx krho, double zp);

/// \brief Explicit three-layer formulas (L = 2), in the conventions above.
ReactionCoeffs closed_form_three_layer(const LayeredMedium &m, int l, int lp, cplx krho);

/// \brief (1/n!) d^n/dz'^n of the assembled density sigma-tilde^{dir}_{l l'}(krho, z').
cplx density_sigma_tilde(const LayeredMedium &m, int l, int lp, cplx krho, double zp, Direction dir,
                         int n);

/// \brief Same quantity from precomputed coefficients; fills out[0..nmax].
void density_sigma_tilde_orders(const LayeredMedium &m, const ReactionCoeffs &c, int lp, cplx kpz,
                                double zp, Direction dir, int nmax, cplx *out);

}  // namespace lmfmm
