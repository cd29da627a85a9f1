/// \file oracle.hpp
/// \brief Brute-force reference sums, error metrics and finite-difference derivative oracles.
#pragma once

#include <functional>
#include <map>

#include "lmfmm/fmm.hpp"

namespace lmfmm {

/// \brief Relative L2 and maximum errors of approx against exact.
struct ErrorReport {
  double err2 = 0.0;
  double errmax = 0.0;
  size_t n = 0;
  size_t skipped = 0;  ///< entries below the Err_max floor
  std::string label;
  double time_s = 0.0;
};

/// \brief Err2 = sqrt(sum|e - a|^2 / sum|e|^2); Err_max over entries with |e| >= floor_rel * max|e|.
ErrorReport error_metrics(const std::vector<cplx> &exact, const std::vector<cplx> &approx, double floor_rel = 1e-14);

/// \brief sum_j q_j h0(k|r_i - r_j|); with exclude_self the pair i == j is skipped (targets alias sources).
std::vector<cplx> direct_free(const std::vector<Vec3> &targets, const std::vector<Vec3> &sources,
                              const std::vector<cplx> &q, double k, bool exclude_self);

/// \brief sum_j q_j u^{dir}_{l l'}(r_i, r_j) by Sommerfeld quadrature with one shared contour.
std::vector<cplx> direct_component(const LayeredMedium &m, const ComponentKey &key, const std::vector<Vec3> &targets,
                                   const std::vector<Vec3> &sources, const std::vector<cplx> &q,
                                   double quad_tol = 1e-12);

/// \brief Reference values of a layered run at selected targets of every block.
struct OracleResult {
  std::vector<std::vector<int>> targets;                        ///< per block: indices into the block
  std::vector<std::vector<cplx>> phi;                           ///< total per block at those targets
  std::map<std::string, std::vector<std::vector<cplx>>> parts;  ///< "free" and component labels
  double time_s = 0.0;
};

/// \brief Evenly spaced target subset of size min(per_block, N_b) in each block.
std::vector<std::vector<int>> oracle_subset(const ParticleSet &ps, size_t per_block);

/// \brief Direct sums for all parts of the total field at the chosen targets.
OracleResult direct_total(const LayeredMedium &m, const ParticleSet &ps, const std::vector<std::vector<int>> &targets,
                          double quad_tol = 1e-12);

/// \brief Gather FMM values at oracle targets.
std::vector<cplx> gather(const std::vector<std::vector<cplx>> &per_block, const std::vector<std::vector<int>> &targets);
std::vector<cplx> flatten(const std::vector<std::vector<cplx>> &per_block);

using ScalarField = std::function<cplx(const Vec3 &)>;

/// \brief D^k f at x by central differences with one Richardson step (h and h/2).
///
/// h <= 0 selects h = scale * eps^{1/(|k|+4)}, which balances rounding against the
/// O(h^4) remainder left after extrapolation. warn is set when the two levels
/// differ by more than 10% of the extrapolated value.
cplx finite_difference(const ScalarField &f, const Vec3 &x, const std::array<int, 3> &k, double h = 0.0,
                       double scale = 1.0, bool *warn = nullptr);

/// \brief (dx - i dy)^s (dx + i dy)^{m-s} dz^{n-m} f at x via finite_difference.
cplx finite_difference_sym(const ScalarField &f, const Vec3 &x, int n, int m, int s, double h = 0.0,
                           double scale = 1.0, bool *warn = nullptr);

}  // namespace lmfmm
