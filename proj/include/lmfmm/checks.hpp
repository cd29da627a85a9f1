/// \file checks.hpp
/// \brief Reference checks shared by the verify command and the acceptance binary.
#pragma once

#include <cstdint>

#include "lmfmm/medium.hpp"

namespace lmfmm {

/// \brief Outcome of one scalar check.
///
/// value/reference are the compared quantities when a reference value exists;
/// otherwise value is the measured error and reference is 0. error is the
/// quantity compared against tolerance.
struct CheckResult {
  std::string check;
  bool pass = false;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  double error = 0.0;
};

/// \brief One tabulated derivative (dx + i dy)^s dz^k3 dz'^k3' u^up_11 / (s! k3! k3'!).
struct GoldenCase {
  Vec3 r, rp;
  int k3 = 0, k3p = 0, s = 0;
  cplx ref;
};

/// Three-layer medium k = (0.8, 1.5, 2.0), interfaces 0 and -2.
LayeredMedium golden_medium();
/// Ten complex reference values (twenty real entries).
const std::vector<GoldenCase> &golden_cases();
/// Target height below every golden target, used as the image anchor.
inline constexpr double kGoldenAnchor = -1.5;

/// Quadrature against the twenty real entries, relative per entry.
std::vector<CheckResult> check_golden_quadrature(double rel_tol = 1e-6);
/// Two-level images on the default path (101 samples per level), absolute per entry.
std::vector<CheckResult> check_golden_dcim(double abs_tol = 1e-6, double fit_tol = 1e-6);
/// Sommerfeld identity residual at random (k, r) probes.
std::vector<CheckResult> check_sommerfeld_identity(int probes = 10, uint64_t seed = 20240611, double tol = 1e-10);
/// General interface solver against the two- and three-layer closed forms at random contour points.
std::vector<CheckResult> check_spectral_equivalence(int points = 50, uint64_t seed = 7, double tol = 1e-12);
/// Three-layer denominator identity and the kappa22 sum/difference pair.
std::vector<CheckResult> check_kappa_identities(int points = 50, uint64_t seed = 11, double tol = 1e-13);
/// Nonsymmetric derivative recurrence against finite differences, orders <= max_order.
///
/// The error of a_k is measured relative to the largest |a_j| with |j| = |k|.
std::vector<CheckResult> check_nonsym_vs_fd(int max_order = 4, double tol = 1e-6);
/// D0 Omega_n^{+-n} = Omega_{n+1}^{+-n}/sqrt(2n+3) for n <= n_max through the ladder coefficients.
std::vector<CheckResult> check_ladder_special_case(int n_max = 6, double tol = 1e-12);
/// Exponential fit of a synthetic three-term signal, checked off the sample grid.
std::vector<CheckResult> check_gpof_roundtrip(double tol = 1e-10);
/// Symmetric derivatives from the ladder path against the nonsymmetric recombination.
std::vector<CheckResult> check_sym_nonsym(int P = 8, double tol = 1e-9);

/// All of the above with their default tolerances.
std::vector<CheckResult> run_verify_suite();

bool all_pass(const std::vector<CheckResult> &r);
/// Largest error / tolerance ratio over a group (<= 1 means the group passes).
double worst_ratio(const std::vector<CheckResult> &r);
/// JSON array of {check, status, value, reference, tolerance, error}.
std::string checks_to_json(const std::vector<CheckResult> &r);

}  // namespace lmfmm
