/// \file common.hpp
/// \brief Shared scalar types, small vector helpers and error classes.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmfmm {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double PI = 3.141592653589793238462643383279502884;

/// \brief Plain 3-vector of doubles.
struct Vec3 {
  double x = 0, y = 0, z = 0;
  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double &operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};
inline Vec3 operator-(const Vec3 &a, const Vec3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator+(const Vec3 &a, const Vec3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator*(double s, const Vec3 &a) { return {s * a.x, s * a.y, s * a.z}; }
inline double norm(const Vec3 &a) { return std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z); }

/// \brief Offset whose z component may be complex (used by complex images).
struct CVec3 {
  double x = 0, y = 0;
  cplx z = 0;
};

/// \brief Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};
/// \brief Linear solve with a vanishing pivot (contour touching a pole).
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// \brief Quadrature failed to reach the requested tolerance within its node budget.
class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// \brief Exponential fit could not meet its residual tolerance.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// \brief Missing, out-of-range or corrupt precomputed table data.
class TableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// \brief n! as double for small n.
double factorial(int n);
/// \brief Binomial coefficient as double.
double binomial(int n, int k);

}  // namespace lmfmm
