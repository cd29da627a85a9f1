/// \file generators.cpp
/// \brief Seeded uniform sampling of cubes and quartic bodies.

#include "lmfmm/generators.hpp"

#include <random>

namespace lmfmm {

std::vector<Vec3> generate_cube(const Vec3 &center, double size, size_t N, uint64_t seed) {
  if (N < 1) throw DomainError("generate_cube: N must be >= 1");
  if (!(size > 0.0)) throw DomainError("generate_cube: size must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  std::vector<Vec3> out(N);
  for (auto &p : out) {
    const double x = U(rng), y = U(rng), z = U(rng);
    p = {center.x + size * x, center.y + size * y, center.z + size * z};
  }
  return out;
}

double quartic_radius(double a, double c) {
  const double c2 = c * c;
  return 0.5 - a + a / 8.0 * (35.0 * c2 * c2 - 30.0 * c2 + 3.0);
}

bool inside_quartic(const Vec3 &center, double a, const Vec3 &p) {
  const Vec3 d = p - center;
  const double r = norm(d);
  if (r == 0.0) return true;
  return r <= quartic_radius(a, d.z / r);
}

std::vector<Vec3> generate_quartic(const Vec3 &center, double a, size_t N, uint64_t seed, double *accepted_fraction) {
  if (N < 1) throw DomainError("generate_quartic: N must be >= 1");
  if (!(a > 0.0 && a < 0.5)) throw DomainError("generate_quartic: a must lie in (0, 0.5)");
  std::mt19937_64 rng(seed);
  // The largest radius is 0.5 (at the poles), so the unit cube encloses the body.
  std::uniform_real_distribution<double> U(-0.5, 0.5);
  std::vector<Vec3> out;
  out.reserve(N);
  size_t drawn = 0;
  while (out.size() < N) {
    const Vec3 p{center.x + U(rng), center.y + U(rng), center.z + U(rng)};
    ++drawn;
    if (inside_quartic(center, a, p)) out.push_back(p);
    if (drawn > 1000 * N + 1000000) throw DomainError("generate_quartic: acceptance rate too small");
  }
  if (accepted_fraction) *accepted_fraction = double(N) / double(drawn);
  return out;
}

std::vector<cplx> generate_strengths(size_t N, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<cplx> q(N);
  for (auto &v : q) v = U(rng);
  return q;
}

}  // namespace lmfmm
