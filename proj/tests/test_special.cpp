// Bessel, spherical Hankel and Gauss-Legendre routines.

#include <cmath>

#include "doctest.h"
#include "lmfmm/special.hpp"

using namespace lmfmm;

namespace {

// Power series sum_m (-1)^m (z/2)^{2m+n} / (m! (m+n)!), fine for |z| of order one.
cplx bessel_series(int n, cplx z) {
  cplx term = std::pow(0.5 * z, n);
  for (int i = 1; i <= n; ++i) term /= double(i);
  cplx sum = term;
  for (int m = 1; m < 60; ++m) {
    term *= -(0.25 * z * z) / (double(m) * double(m + n));
    sum += term;
  }
  return sum;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("bessel_j at zero argument") {
  CHECK(std::abs(bessel_j(0, 0.0) - 1.0) < 1e-15);
  for (int n = 1; n < 6; ++n) CHECK(std::abs(bessel_j(n, 0.0)) < 1e-15);
}

TEST_CASE("bessel_j negative orders follow the parity rule") {
  const cplx zs[] = {0.3, {1.5, 0.1}, {4.0, -2.0}, {12.0, 0.5}};
  for (cplx z : zs)
    for (int n = 1; n <= 6; ++n) {
      const cplx jp = bessel_j(n, z), jm = bessel_j(-n, z);
      CHECK(std::abs(jm - ((n % 2) ? -jp : jp)) <= 1e-14 * std::max(1.0, std::abs(jp)));
    }
}

TEST_CASE("bessel_j matches the power series") {
  const cplx zs[] = {{1.5, 0.1}, {0.7, -0.4}, {2.0, 1.0}};
  for (cplx z : zs)
    for (int n = 0; n <= 8; ++n) CHECK(rel(bessel_j(n, z), bessel_series(n, z)) < 1e-12);
}

TEST_CASE("bessel_j_all agrees with single orders and J0 fast path") {
  const cplx zs[] = {{0.2, 0.0}, {3.0, 0.5}, {25.0, -1.0}, {60.0, 3.0}};
  for (cplx z : zs) {
    const auto all = bessel_j_all(10, z);
    for (int n = 0; n <= 10; ++n) CHECK(std::abs(all[n] - bessel_j(n, z)) <= 1e-12 * std::max(1.0, std::abs(all[0])));
    CHECK(rel(bessel_j0(z), bessel_j(0, z)) < 1e-12);
  }
}

TEST_CASE("spherical_hankel zero order closed form") {
  for (double x : {0.3, 1.0, 2.5, 10.0}) {
    const cplx expect = std::sin(x) / x - I * std::cos(x) / x;
    CHECK(rel(spherical_hankel(0, x), expect) < 1e-14);
    CHECK(rel(hankel0(x), expect) < 1e-14);
  }
}

TEST_CASE("spherical_hankel derivative and recurrence") {
  const cplx z{1.3, 0.2};
  const double h = 1e-5;
  const cplx d0 = (spherical_hankel(0, z + h) - spherical_hankel(0, z - h)) / (2 * h);
  CHECK(rel(d0, -spherical_hankel(1, z)) < 1e-8);
  const auto hs = spherical_hankel_all(21, z);
  for (int n = 1; n <= 20; ++n) {
    const cplx resid = hs[n - 1] + hs[n + 1] - double(2 * n + 1) / z * hs[n];
    CHECK(std::abs(resid) <= 1e-12 * std::abs(hs[n + 1]));
  }
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(16, x, w);
  REQUIRE(x.size() == 16);
  double sw = 0.0;
  for (double v : w) sw += v;
  CHECK(sw == doctest::Approx(2.0).epsilon(1e-14));
  for (int d = 0; d <= 31; ++d) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], d);
    const double exact = (d % 2) ? 0.0 : 2.0 / (d + 1);
    CHECK(std::abs(s - exact) < 1e-14);
  }
}
