/// \file sommerfeld.hpp
/// \brief Sommerfeld integrals along a deformed contour in the complex k_rho plane.
///
/// All kernels are in h0 units: the layered Green's function divided by i k_l/(4 pi).
#pragma once

#include "lmfmm/medium.hpp"

namespace lmfmm {

/// \brief Straight contour piece with composite Gauss-Legendre panels.
struct ContourSegment {
  cplx start, end;
  int panels = 1;
  int order = 16;
};

/// \brief Gamma_1 (0 -> -ib along the imaginary axis) then Gamma_2 (-ib -> t_max - ib).
struct ContourSpec {
  double b = 0.0;
  double t_max = 0.0;
  double tol = 1e-14;
  std::vector<ContourSegment> segments;
};

/// \brief Flattened nodes k_rho and weights (weights include dk_rho/dt).
struct QuadRule {
  std::vector<cplx> x, w;
  size_t size() const { return x.size(); }
};

/// \brief Value with a self-convergence error estimate.
struct SommerfeldValue {
  cplx value = 0.0;
  double error = 0.0;
  int nodes = 0;
};

/// \brief Options controlling contour construction.
struct ContourOptions {
  double gap = 1.0;       ///< smallest total vertical decay distance of the integrand
  int power = 0;          ///< algebraic growth t^power of the integrand envelope
  double rho_max = 1.0;   ///< largest horizontal distance (sets panel width on the tail)
  double b = -1.0;        ///< imaginary offset; negative selects min(k)/2
  double fine_width = 0.25;
  double tail_width = 2.0;
};

/// \brief Envelope-based contour: t_max solves t^P e^{-t gap} = tol * peak.
ContourSpec build_contour(const LayeredMedium &m, double tol, const ContourOptions &opt = {});
/// \brief Flatten a contour; refine multiplies every panel count.
QuadRule make_rule(const ContourSpec &c, int refine = 1);

/// \brief Smallest decay distance of the (l, l', dir) integrand for heights z, z'.
double vertical_gap(const LayeredMedium &m, int l, int lp, Direction dir, double z, double zp);

/// \brief Per-node spectral data of one (l, l', dir) component on a rule.
struct ComponentNodes {
  int l = 0, lp = 0;
  Direction dir = Direction::Up;
  QuadRule rule;
  std::vector<cplx> kz, kpz;        ///< k_lz and k_l'z per node
  std::vector<ReactionCoeffs> coef;  ///< reaction densities per node
};
ComponentNodes component_nodes(const LayeredMedium &m, int l, int lp, Direction dir, const QuadRule &rule);

/// \brief Scattered component u^{dir}_{l l'}(r, r') by quadrature.
SommerfeldValue eval_scattered_green(const LayeredMedium &m, int l, int lp, const Vec3 &r, const Vec3 &rp,
                                     Direction dir, const ContourSpec &contour);

/// \brief (dx + i dy)^s dz^k3 dz'^k3' u^{dir} / (s! k3! k3'!).
SommerfeldValue eval_scattered_derivative(const LayeredMedium &m, int l, int lp, const Vec3 &r,
                                          const Vec3 &rp, Direction dir, int s, int k3, int k3p,
                                          const ContourSpec &contour);

/// \brief General horizontal derivative (dx - i dy)^a (dx + i dy)^b dz^n dz'^np u^{dir}, no factorials.
SommerfeldValue eval_scattered_mixed(const LayeredMedium &m, int l, int lp, const Vec3 &r, const Vec3 &rp,
                                     Direction dir, int a, int b, int n, int np, const ContourSpec &contour);

/// \brief Table integral S^{m m'}_{n n'}(rho, z, z') of the symmetric translation.
SommerfeldValue eval_table_integral(const LayeredMedium &m, int l, int lp, Direction dir, int n, int np,
                                    int mm, int mp, double rho, double z, double zp,
                                    const ContourSpec &contour);

/// \brief All S^{m m'}_{n n'} for n, n' <= p, m <= 2p, m' <= m at several rho values.
///
/// Result layout: out[ir][nn_index(n, n', p)][mm_index(m, m')].
std::vector<std::vector<std::vector<cplx>>> table_integrals_batch(const LayeredMedium &m, int l, int lp,
                                                                  Direction dir, int p,
                                                                  const std::vector<double> &rhos, double z,
                                                                  double zp, const ContourSpec &contour);
inline int nn_index(int n, int np, int p) { return n * (p + 1) + np; }
inline int mm_index(int mm, int mp) { return mm * (mm + 1) / 2 + mp; }

/// \brief |h0(k|r|) - (1/k) int k_rho J0(k_rho rho) e^{i k_z |z|}/k_z dk_rho|.
double verify_sommerfeld_identity(double k, const Vec3 &r, const ContourSpec &contour);

}  // namespace lmfmm
