/// \file special.cpp
/// \brief Bessel J_n and spherical Hankel h_n^{(1)} for complex arguments; Gauss-Legendre rules.

#include "lmfmm/special.hpp"

#include <algorithm>

namespace lmfmm {

double factorial(int n) {
  static const std::vector<double> table = [] {
    std::vector<double> t(171);
    t[0] = 1.0;
    for (int i = 1; i < 171; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (n < 0 || n > 170) throw DomainError("factorial: argument out of range");
  return table[n];
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return factorial(n) / (factorial(k) * factorial(n - k));
}

namespace {

void check_imag(cplx z) {
  if (std::abs(z.imag()) > kBesselMaxImag)
    throw DomainError("bessel: |Im z| exceeds the supported bound");
}

// Power series for J_0 and J_1; accurate while |z| - |Im z| stays moderate.
void series_j01(cplx z, cplx &j0, cplx &j1) {
  const cplx q = -0.25 * z * z;
  cplx t0 = 1.0, t1 = 0.5 * z;
  j0 = t0;
  j1 = t1;
  for (int k = 1; k < 300; ++k) {
    t0 *= q * (1.0 / double(k * k));
    t1 *= q * (1.0 / double(k * (k + 1)));
    j0 += t0;
    j1 += t1;
    if (k > 2 && std::norm(t0) < 1e-34 * std::norm(j0) && std::norm(t1) < 1e-34 * std::norm(j1)) break;
  }
}

// Hankel asymptotic expansion of J_nu for large |z|.
cplx asymptotic_j(int nu, cplx z) {
  const double mu = 4.0 * nu * nu;
  cplx p = 1.0, q = 0.0;
  cplx term = 1.0;
  const cplx iz = 1.0 / z;
  double last = 1e300;
  for (int k = 1; k < 60; ++k) {
    const double a = (mu - double((2 * k - 1) * (2 * k - 1))) / (k * 8.0);
    term *= a * iz;
    const double mag = std::abs(term);
    if (mag > last) break;
    last = mag;
    // odd k contributes to Q, even k to P, with alternating signs per pair
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    } else {
      p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
    }
    if (mag < 1e-17) break;
  }
  const cplx omega = z - 0.5 * nu * PI - 0.25 * PI;
  return std::sqrt(2.0 / (PI * z)) * (p * std::cos(omega) - q * std::sin(omega));
}

// Miller backward recurrence normalised by the Neumann sum 1 = J0 + 2 sum J_2k.
void miller_sum(int nmax, cplx z, cplx *out) {
  const double az = std::abs(z);
  const int base = std::max(nmax, int(az));
  int m = base + 20 + int(std::sqrt(40.0 * (base + 1)));
  if (m % 2) ++m;
  const cplx two_over_z = 2.0 / z;
  cplx fp1 = 0.0, f = 1e-280;
  cplx sum = 0.0;
  for (int n = m; n >= 1; --n) {
    // f holds f_n, fp1 holds f_{n+1}
    if (n <= nmax) out[n] = f;
    if (n % 2 == 0) sum += 2.0 * f;
    const cplx fm1 = (double(n) * two_over_z) * f - fp1;
    fp1 = f;
    f = fm1;
    if (std::abs(f.real()) + std::abs(f.imag()) > 1e250) {
      const double s = 1e-250;
      f *= s;
      fp1 *= s;
      sum *= s;
      for (int j = n; j <= nmax; ++j) out[j] *= s;
    }
  }
  out[0] = f;
  sum += f;
  const cplx inv = 1.0 / sum;
  for (int n = 0; n <= nmax; ++n) out[n] *= inv;
}

}  // namespace

static void j01(cplx z, cplx &j0, cplx &j1) {
  const double az = std::abs(z);
  if (az <= 12.0 || std::abs(z.imag()) > 0.5 * az) {
    series_j01(z, j0, j1);
  } else if (az >= 25.0) {
    if (z.real() < 0) {
      // J_n(-z) = (-1)^n J_n(z) keeps the expansion in its sector
      j0 = asymptotic_j(0, -z);
      j1 = -asymptotic_j(1, -z);
    } else {
      j0 = asymptotic_j(0, z);
      j1 = asymptotic_j(1, z);
    }
  } else {
    cplx buf[2];
    miller_sum(1, z, buf);
    j0 = buf[0];
    j1 = buf[1];
  }
}

cplx bessel_j0(cplx z) {
  check_imag(z);
  const double az = std::abs(z);
  if (az <= 12.0 || std::abs(z.imag()) > 0.5 * az) {
    const cplx q = -0.25 * z * z;
    cplx t = 1.0, s = 1.0;
    for (int k = 1; k < 300; ++k) {
      t *= q * (1.0 / double(k * k));
      s += t;
      if (k > 2 && std::norm(t) < 1e-34 * std::norm(s)) break;
    }
    return s;
  }
  if (az >= 25.0) return asymptotic_j(0, z.real() < 0 ? -z : z);
  cplx buf[1];
  miller_sum(0, z, buf);
  return buf[0];
}

void bessel_j_all(int nmax, cplx z, cplx *out) {
  if (nmax < 0) return;
  check_imag(z);
  if (z == cplx(0.0)) {
    out[0] = 1.0;
    for (int n = 1; n <= nmax; ++n) out[n] = 0.0;
    return;
  }
  cplx j0, j1;
  j01(z, j0, j1);
  if (nmax == 0) {
    out[0] = j0;
    return;
  }
  // Unnormalised Miller sequence, then scale to whichever of J0, J1 is larger.
  const double az = std::abs(z);
  const int base = std::max(nmax, int(az));
  int m = base + 20 + int(std::sqrt(40.0 * (base + 1)));
  std::vector<cplx> buf(nmax + 1);
  cplx fp1 = 0.0, f = 1e-280;
  for (int n = m; n >= 1; --n) {
    if (n <= nmax) buf[n] = f;
    const cplx fm1 = (2.0 * n / z) * f - fp1;
    fp1 = f;
    f = fm1;
    if (std::abs(f) > 1e250) {
      const double s = 1e-250;
      f *= s;
      fp1 *= s;
      for (int j = n; j <= nmax; ++j) buf[j] *= s;
    }
  }
  buf[0] = f;
  const cplx scale = std::abs(j0) >= std::abs(j1) ? j0 / buf[0] : j1 / buf[1];
  for (int n = 0; n <= nmax; ++n) out[n] = buf[n] * scale;
  out[0] = j0;
  out[1] = j1;
}

std::vector<cplx> bessel_j_all(int nmax, cplx z) {
  std::vector<cplx> out(std::max(nmax, 0) + 1);
  bessel_j_all(nmax, z, out.data());
  return out;
}

cplx bessel_j(int order, cplx z) {
  const int n = std::abs(order);
  cplx v;
  if (n == 0) {
    v = bessel_j0(z);
  } else {
    v = bessel_j_all(n, z)[n];
  }
  if (order < 0 && (n % 2)) v = -v;
  return v;
}

std::vector<cplx> spherical_hankel_all(int nmax, cplx z) {
  if (z == cplx(0.0)) throw DomainError("spherical_hankel: z = 0");
  std::vector<cplx> h(std::max(nmax, 1) + 1);
  const cplx e = std::exp(I * z);
  h[0] = -I * e / z;
  h[1] = -(1.0 + I / z) * e / z;
  for (int n = 1; n < nmax; ++n) h[n + 1] = (2.0 * n + 1.0) / z * h[n] - h[n - 1];
  h.resize(nmax + 1);
  return h;
}

cplx spherical_hankel(int n, cplx z) {
  if (n < 0) throw DomainError("spherical_hankel: negative order");
  return spherical_hankel_all(n, z)[n];
}

void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights) {
  if (n < 1) throw DomainError("gauss_legendre: n < 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n == 1) {
    nodes[0] = 0.0;
    weights[0] = 2.0;
  }
}

}  // namespace lmfmm
