/// \file generators.hpp
/// \brief Deterministic particle generators for the cube and quartic-surface test geometries.
#pragma once

#include <cstdint>

#include "lmfmm/common.hpp"

namespace lmfmm {

/// \brief N uniform points in the axis-aligned cube of edge `size` around center.
std::vector<Vec3> generate_cube(const Vec3 &center, double size, size_t N, uint64_t seed);

/// \brief Radius of the quartic surface r(theta) = 0.5 - a + (a/8)(35 cos^4 - 30 cos^2 + 3).
double quartic_radius(double a, double cos_theta);
/// \brief True when p lies inside the quartic body centred at center.
bool inside_quartic(const Vec3 &center, double a, const Vec3 &p);

/// \brief N uniform points inside the quartic body (rejection from the enclosing cube of edge 1).
///
/// accepted_fraction, when given, receives accepted / drawn.
std::vector<Vec3> generate_quartic(const Vec3 &center, double a, size_t N, uint64_t seed,
                                   double *accepted_fraction = nullptr);

/// \brief N strengths uniform in [0, 1).
std::vector<cplx> generate_strengths(size_t N, uint64_t seed);

}  // namespace lmfmm
