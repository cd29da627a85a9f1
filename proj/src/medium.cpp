/// \file medium.cpp
/// \brief Layered medium, interface solver and the explicit two/three layer densities.

#include "lmfmm/medium.hpp"

#include <algorithm>

#include <Eigen/Dense>
#include <limits>

namespace lmfmm {

LayeredMedium::LayeredMedium(std::vector<double> depths, std::vector<double> wavenumbers)
    : depths_(std::move(depths)), k_(std::move(wavenumbers)) {
  if (k_.empty()) throw DomainError("LayeredMedium: need at least one layer");
  if (k_.size() != depths_.size() + 1)
    throw DomainError("LayeredMedium: need one wavenumber per layer (interfaces + 1)");
  for (size_t i = 1; i < depths_.size(); ++i)
    if (!(depths_[i] < depths_[i - 1]))
      throw DomainError("LayeredMedium: interface depths must be strictly decreasing");
  for (double v : depths_)
    if (!std::isfinite(v)) throw DomainError("LayeredMedium: non-finite interface depth");
  for (double v : k_)
    if (!(v > 0.0) || !std::isfinite(v))
      throw DomainError("LayeredMedium: wavenumbers must be positive and finite");
}

double LayeredMedium::top(int layer) const {
  return layer == 0 ? std::numeric_limits<double>::infinity() : depths_.at(layer - 1);
}

double LayeredMedium::bottom(int layer) const {
  return layer == num_interfaces() ? -std::numeric_limits<double>::infinity() : depths_.at(layer);
}

double LayeredMedium::thickness(int layer) const {
  if (layer <= 0 || layer >= num_interfaces())
    throw DomainError("LayeredMedium::thickness: not an interior layer");
  return depths_[layer - 1] - depths_[layer];
}

int LayeredMedium::layer_of(double z) const {
  for (int i = 0; i < num_interfaces(); ++i) {
    if (z == depths_[i]) throw DomainError("LayeredMedium::layer_of: point lies on an interface");
    if (z > depths_[i]) return i;
  }
  return num_interfaces();
}

bool LayeredMedium::inside(int layer, double z) const { return z < top(layer) && z > bottom(layer); }

double LayeredMedium::k_min() const {
  double v = k_[0];
  for (double x : k_) v = std::min(v, x);
  return v;
}

double LayeredMedium::k_max() const {
  double v = k_[0];
  for (double x : k_) v = std::max(v, x);
  return v;
}

bool LayeredMedium::homogeneous() const {
  return std::all_of(k_.begin(), k_.end(), [&](double x) { return x == k_.front(); });
}

bool LayeredMedium::admissible(int layer, Direction dir) const {
  if (dir == Direction::Up) return layer < num_interfaces();
  return layer > 0;
}

cplx vertical_wavenumber(double k, cplx krho) {
  cplx r = std::sqrt(cplx(k * k, 0.0) - krho * krho);
  if (r.imag() < 0.0) r = -r;
  return r;
}

cplx vertical_wavenumber(const LayeredMedium &m, int layer, cplx krho) {
  if (layer < 0 || layer >= m.num_layers()) throw DomainError("vertical_wavenumber: bad layer");
  return vertical_wavenumber(m.k(layer), krho);
}

std::vector<ReactionCoeffs> solve_reaction_coeffs_all(const LayeredMedium &m, int lp, cplx krho) {
  const int L = m.num_interfaces();
  if (lp < 0 || lp > L) throw DomainError("solve_reaction_coeffs: bad source layer");
  std::vector<cplx> kz(L + 1), E(L + 1, 0.0);
  for (int j = 0; j <= L; ++j) kz[j] = vertical_wavenumber(m.k(j), krho);
  for (int j = 1; j < L; ++j) E[j] = std::exp(I * kz[j] * m.thickness(j));
  // Unknowns: U_0..U_{L-1} at columns 0..L-1, D_1..D_L at columns L..2L-1.
  // Rows 2j, 2j+1: continuity of the field and of k times its z-derivative at d_j.
  const int n = 2 * L;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(n, 2);
  const auto ucol = [](int j) { return j; };
  const auto dcol = [L](int j) { return L + j - 1; };
  for (int j = 0; j < L; ++j) {
    const int r0 = 2 * j, r1 = 2 * j + 1;
    // layer j evaluated at its bottom d_j
    A(r0, ucol(j)) += 1.0 / kz[j];
    A(r1, ucol(j)) += I * m.k(j);
    if (j > 0) {
      A(r0, dcol(j)) += E[j] / kz[j];
      A(r1, dcol(j)) += -I * m.k(j) * E[j];
    }
    // layer j+1 evaluated at its top d_j
    A(r0, dcol(j + 1)) -= 1.0 / kz[j + 1];
    A(r1, dcol(j + 1)) -= -I * m.k(j + 1);
    if (j + 1 < L) {
      A(r0, ucol(j + 1)) -= E[j + 1] / kz[j + 1];
      A(r1, ucol(j + 1)) -= I * m.k(j + 1) * E[j + 1];
    }
  }
  // Column 0: free wave reaching the interface below the source (unit amplitude).
  if (lp < L) {
    rhs(2 * lp, 0) -= 1.0 / kz[lp];
    rhs(2 * lp + 1, 0) -= -I * m.k(lp);
  }
  // Column 1: free wave reaching the interface above the source.
  if (lp > 0) {
    rhs(2 * (lp - 1), 1) += 1.0 / kz[lp];
    rhs(2 * (lp - 1) + 1, 1) += I * m.k(lp);
  }
  // Row equilibration makes the pivot test scale free.
  for (int i = 0; i < n; ++i) {
    const double rn = A.row(i).norm();
    A.row(i) /= rn;
    rhs.row(i) /= rn;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  double min_piv = 1e300;
  for (int i = 0; i < n; ++i) min_piv = std::min(min_piv, std::abs(lu.matrixLU()(i, i)));
  if (!(min_piv > 1e-13))
    throw SingularSystemError("solve_reaction_coeffs: singular interface system (pole on contour)");
  Eigen::MatrixXcd x = lu.solve(rhs);
  std::vector<ReactionCoeffs> out(L + 1);
  for (int l = 0; l <= L; ++l) {
    ReactionCoeffs &c = out[l];
    c.up_zero = (l == L);
    c.down_zero = (l == 0);
    c.col_up_zero = (lp == L);
    c.col_down_zero = (lp == 0);
    if (l < L) {
      c.uu = c.col_up_zero ? 0.0 : x(ucol(l), 0);
      c.ud = c.col_down_zero ? 0.0 : x(ucol(l), 1);
    }
    if (l > 0) {
      c.du = c.col_up_zero ? 0.0 : x(dcol(l), 0);
      c.dd = c.col_down_zero ? 0.0 : x(dcol(l), 1);
    }
  }
  return out;
}

ReactionCoeffs solve_reaction_coeffs_general(const LayeredMedium &m, int l, int lp, cplx krho) {
  if (l < 0 || l >= m.num_layers()) throw DomainError("solve_reaction_coeffs: bad target layer");
  return solve_reaction_coeffs_all(m, lp, krho)[l];
}

ReactionCoeffs closed_form_two_layer(const LayeredMedium &m, int l, int lp, cplx krho) {
  if (m.num_interfaces() != 1) throw DomainError("closed_form_two_layer: requires L = 1");
  if (l < 0 || l > 1 || lp < 0 || lp > 1) throw DomainError("closed_form_two_layer: bad layer");
  const double k0 = m.k(0), k1 = m.k(1);
  const cplx k0z = vertical_wavenumber(k0, krho), k1z = vertical_wavenumber(k1, krho);
  const cplx den = k0 * k0z + k1 * k1z;
  ReactionCoeffs c;
  c.up_zero = (l == 1);
  c.down_zero = (l == 0);
  c.col_up_zero = (lp == 1);
  c.col_down_zero = (lp == 0);
  if (lp == 0) {
    if (l == 0) c.uu = (k0 * k0z - k1 * k1z) / den;
    else c.du = 2.0 * k0 * k1z / den;
  } else {
    if (l == 0) c.ud = 2.0 * k1 * k0z / den;
    else c.dd = (k1 * k1z - k0 * k0z) / den;
  }
  return c;
}

ThreeLayerKappas three_layer_kappas(const LayeredMedium &m, cplx krho, double zp) {
  if (m.num_interfaces() != 2) throw DomainError("three_layer_kappas: requires L = 2");
  const double k0 = m.k(0), k1 = m.k(1), k2 = m.k(2);
  const double d = m.depth(0) - m.depth(1);
  const cplx a0 = k0 * vertical_wavenumber(k0, krho);
  const cplx a1 = k1 * vertical_wavenumber(k1, krho);
  const cplx a2 = k2 * vertical_wavenumber(k2, krho);
  const cplx k1z = vertical_wavenumber(k1, krho);
  const cplx e = std::exp(I * d * k1z);
  const cplx em = std::exp(-I * d * k1z);
  ThreeLayerKappas K;
  K.k11 = 0.5 * (a1 - a2) * e * e + 0.5 * (a1 + a2);
  K.k12 = I * (0.5 * (a2 - a1) * e * e + 0.5 * (a1 + a2));
  // z' enters only the middle-source quantities; measured from the top interface.
  const double z = zp - m.depth(0);
  K.k21 = (a1 - a2) * (0.5 * (a1 - a0) * e + 0.5 * (a0 + a1) * em);
  K.k21p = (a1 - a2) * (0.5 * (a0 - a1) * e + 0.5 * (a0 + a1) * em);
  K.k22 = 0.5 * (a1 + a0) * std::exp(I * k1z * z) + 0.5 * (a1 - a0) * std::exp(-I * k1z * z);
  K.k23 = 0.5 * (a1 - a2) * std::exp(I * k1z * (2.0 * d + z)) + 0.5 * (a1 + a2) * std::exp(-I * k1z * z);
  K.k31 = 0.5 * (a1 - a0) * e * e + 0.5 * (a1 + a0);
  K.k32 = I * (0.5 * (a0 - a1) * e * e + 0.5 * (a0 + a1));
  K.den_top = a0 * K.k11 - I * a1 * K.k12;
  K.den_bottom = a2 * K.k31 - I * a1 * K.k32;
  return K;
}

ReactionCoeffs closed_form_three_layer(const LayeredMedium &m, int l, int lp, cplx krho) {
  if (m.num_interfaces() != 2) throw DomainError("closed_form_three_layer: requires L = 2");
  if (l < 0 || l > 2 || lp < 0 || lp > 2) throw DomainError("closed_form_three_layer: bad layer");
  const double k0 = m.k(0), k1 = m.k(1), k2 = m.k(2);
  const double d = m.depth(0) - m.depth(1);
  const cplx k0z = vertical_wavenumber(k0, krho), k1z = vertical_wavenumber(k1, krho),
             k2z = vertical_wavenumber(k2, krho);
  const cplx a0 = k0 * k0z, a1 = k1 * k1z, a2 = k2 * k2z;
  const cplx e = std::exp(I * d * k1z);
  const ThreeLayerKappas K = three_layer_kappas(m, krho, m.depth(0) - 0.5 * d);
  const cplx den = K.den_top, den3 = K.den_bottom;
  ReactionCoeffs c;
  c.up_zero = (l == 2);
  c.down_zero = (l == 0);
  c.col_up_zero = (lp == 2);
  c.col_down_zero = (lp == 0);
  // The printed middle-layer down-going entries are referenced at the lower
  // interface; dividing by e^{i k1z d} moves them to the upper one.
  if (lp == 0) {
    if (l == 0) c.uu = (a0 * K.k11 + I * a1 * K.k12) / den;
    if (l == 1) {
      c.uu = k0 * k1z * (a1 - a2) * e / den;
      c.du = k0 * k1z * (a1 + a2) * e / den / e;
    }
    if (l == 2) c.du = 2.0 * k0 * k1 * k1z * k2z * e / den;
  } else if (lp == 1) {
    if (l == 0) {
      c.uu = k1 * k0z * (a1 - a2) * e / den;
      c.ud = k1 * k0z * (a1 + a2) / den;
    }
    if (l == 1) {
      c.uu = (a1 - a2) * (a1 + a0) / (2.0 * den);
      c.ud = (a1 - a2) * (a1 - a0) * e / (2.0 * den);
      c.du = (a1 - a0) * e * (a1 - a2) * e / (2.0 * den) / e;
      c.dd = (a1 - a0) * e * (a1 + a2) / (2.0 * den) / e;
    }
    if (l == 2) {
      // printed with an extra e^{-i k2z d}; removed to reference the upper interface
      c.du = k1 * k2z * (a1 + a0) / den;
      c.dd = k1 * k2z * (a1 - a0) * e / den;
    }
  } else {
    if (l == 0) c.ud = 2.0 * a1 * k2 * k0z * e / den3;
    if (l == 1) {
      c.ud = k2 * k1z * (a1 + a0) / den3;
      c.dd = k2 * k1z * (a1 - a0) * e * e / den3 / e;
    }
    if (l == 2) c.dd = (a2 * K.k31 + I * a1 * K.k32) / den3;
  }
  return c;
}

void density_sigma_tilde_orders(const LayeredMedium &m, const ReactionCoeffs &c, int lp, cplx kpz,
                                double zp, Direction dir, int nmax, cplx *out) {
  const cplx s_up = (dir == Direction::Up) ? c.uu : c.du;
  const cplx s_dn = (dir == Direction::Up) ? c.ud : c.dd;
  cplx e_up = 0.0, e_dn = 0.0;
  if (lp < m.num_interfaces()) e_up = std::exp(I * kpz * (zp - m.depth(lp))) * s_up;
  if (lp > 0) e_dn = std::exp(I * kpz * (m.depth(lp - 1) - zp)) * s_dn;
  const cplx f = I * kpz;
  for (int n = 0; n <= nmax; ++n) {
    out[n] = e_up + e_dn;
    e_up *= f / double(n + 1);
    e_dn *= -f / double(n + 1);
  }
}

cplx density_sigma_tilde(const LayeredMedium &m, int l, int lp, cplx krho, double zp, Direction dir,
                         int n) {
  if (n < 0) throw DomainError("density_sigma_tilde: negative order");
  if (lp < 0 || lp >= m.num_layers() || !m.inside(lp, zp))
    throw DomainError("density_sigma_tilde: z' not strictly inside the source layer");
  if (!m.admissible(l, dir)) return 0.0;
  const ReactionCoeffs c = solve_reaction_coeffs_general(m, l, lp, krho);
  std::vector<cplx> buf(n + 1);
  density_sigma_tilde_orders(m, c, lp, vertical_wavenumber(m.k(lp), krho), zp, dir, n, buf.data());
  return buf[n];
}

}  // namespace lmfmm
