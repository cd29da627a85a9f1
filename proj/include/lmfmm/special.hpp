/// \file special.hpp
/// \brief Bessel and spherical Hankel functions of complex argument, Gauss-Legendre rules.
#pragma once

#include "lmfmm/common.hpp"

namespace lmfmm {

/// Largest |Im z| accepted by the Bessel routines before overflow is reported.
inline constexpr double kBesselMaxImag = 600.0;

/// \brief J_n(z) for integer n (negative orders via J_{-n} = (-1)^n J_n).
cplx bessel_j(int order, cplx z);

/// \brief J_0(z), ..., J_nmax(z) in one pass (Miller backward recurrence).
std::vector<cplx> bessel_j_all(int nmax, cplx z);
/// \brief Same as bessel_j_all but writes into a caller buffer of size nmax+1.
void bessel_j_all(int nmax, cplx z, cplx *out);

/// \brief Fast J_0(z) (power series, Miller, or Hankel asymptotics by |z|).
cplx bessel_j0(cplx z);

/// \brief Spherical Hankel function of the first kind h_n^{(1)}(z).
cplx spherical_hankel(int n, cplx z);
/// \brief h_0^{(1)}(z), ..., h_nmax^{(1)}(z) by upward recurrence.
std::vector<cplx> spherical_hankel_all(int nmax, cplx z);
/// \brief h_0^{(1)}(z) = -i e^{iz}/z.
inline cplx hankel0(cplx z) { return -I * std::exp(I * z) / z; }

/// \brief Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

}  // namespace lmfmm
