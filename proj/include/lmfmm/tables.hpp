/// \file tables.hpp
/// \brief Precomputed near-field kernel tables, layered translation tables and image sets.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>

#include "lmfmm/dcim.hpp"
#include "lmfmm/sommerfeld.hpp"

namespace lmfmm {

/// \brief (target layer, source layer, direction) of one scattered component.
struct ComponentKey {
  int l = 0, lp = 0;
  Direction dir = Direction::Up;
  auto operator<=>(const ComponentKey &) const = default;
  std::string label() const;
};

/// \brief Complex values on a uniform tensor grid of up to three dimensions.
///
/// Interpolation is tensor-product Lagrange with `order` points per axis; the
/// stencil is shifted inward at the grid edges so no value outside is touched.
struct GridTable {
  int ndim = 2;
  std::array<int, 3> dims{1, 1, 1};
  std::array<double, 3> origin{0, 0, 0};
  std::array<double, 3> step{1, 1, 1};
  int order = 6;
  std::vector<cplx> v;  ///< v[i0 + dims0 * (i1 + dims1 * i2)]

  double coord(int axis, int i) const { return origin[axis] + step[axis] * i; }
  cplx at(int i0, int i1, int i2 = 0) const { return v[i0 + size_t(dims[0]) * (i1 + size_t(dims[1]) * i2)]; }
  /// Interpolated value; throws TableError outside the covered box.
  cplx eval(double x0, double x1, double x2 = 0.0) const;
};

/// \brief Near-field table of one scattered component.
///
/// For l == l' the kernel splits into G_sum(rho, z + z') + G_diff(rho, z - z');
/// otherwise a full (rho, z, z') grid is stored.
struct NearTable {
  ComponentKey key;
  bool separable = true;
  bool has_sum = false, has_diff = false;
  GridTable sum, diff, full;
  double tol = 0.0;             ///< declared relative interpolation tolerance
  double selftest_error = 0.0;  ///< measured max relative error at off-grid probes
  cplx eval(const Vec3 &r, const Vec3 &rp) const;
};

/// \brief Ranges of the near-pair geometry a NearTable must cover.
struct NearRange {
  double rho_max = 0.0;
  double zt_min = 0.0, zt_max = 0.0, zs_min = 0.0, zs_max = 0.0;
};

/// \brief Build and self-test a near-field table; spacing halves until the probe error meets tol.
NearTable build_near_table(const LayeredMedium &m, const ComponentKey &key, const NearRange &range, double tol,
                           double quad_tol, int order = 6);
/// \brief Exact value of the quantity tabulated by build_near_table (same quadrature rule family).
cplx near_table_reference(const LayeredMedium &m, const ComponentKey &key, const Vec3 &r, const Vec3 &rp,
                          double quad_tol);

/// \brief S integrals of the symmetric layered translation at exact lattice rho values.
struct STable {
  int p = 0;
  double zt = 0.0, zs = 0.0;
  std::vector<double> rhos;                          ///< sorted
  std::vector<std::vector<std::vector<cplx>>> vals;  ///< vals[ir][nn_index][mm_index]
  /// Index of rho within a relative tolerance; throws TableError when absent.
  int find(double rho) const;
};

/// \brief S integrals on one lattice line. h is the box half-width: convergence is judged on
/// entries weighted as in the translation matrix, so roundoff in entries the translation
/// scales by h^{i+j+M} does not block the check.
STable build_s_table(const LayeredMedium &m, const ComponentKey &key, int p, double zt, double zs,
                     std::vector<double> rhos, double quad_tol, double h = 1.0);

struct ImageKey {
  ComponentKey comp;
  int order = 0;
  double zp = 0.0;
  auto operator<=>(const ImageKey &) const = default;
};
struct STableKey {
  ComponentKey comp;
  double zt = 0.0, zs = 0.0;
  auto operator<=>(const STableKey &) const = default;
};

/// \brief All precomputed data of one run, with the hash of the configuration that produced it.
class TableSet {
 public:
  std::array<uint8_t, 32> config_hash{};
  std::map<ComponentKey, NearTable> near;
  std::map<ImageKey, DcimImageSet> images;
  std::map<STableKey, STable> stables;

  const NearTable &near_table(const ComponentKey &k) const;
  const DcimImageSet &image_set(const ComponentKey &k, int order, double zp) const;
  const STable &s_table(const ComponentKey &k, double zt, double zs) const;
  size_t image_set_count(const ComponentKey &k) const;

  /// Binary little-endian "SWT1" file.
  void save(const std::string &path) const;
  static TableSet load(const std::string &path);
};

/// \brief SHA-256 of an arbitrary byte string.
std::array<uint8_t, 32> sha256(const std::string &data);
std::string hex(const std::array<uint8_t, 32> &h);

}  // namespace lmfmm
