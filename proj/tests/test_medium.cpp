// Layered medium geometry, vertical wavenumbers and reaction densities.

#include <cmath>

#include "doctest.h"
#include "lmfmm/checks.hpp"
#include "lmfmm/medium.hpp"

using namespace lmfmm;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("vertical_wavenumber branch") {
  CHECK(std::abs(vertical_wavenumber(1.5, 0.0) - cplx(1.5, 0.0)) < 1e-15);
  // at the branch point the root resolves a rounding-level radicand, so only sqrt(eps) is meaningful
  CHECK(std::abs(vertical_wavenumber(0.8, 0.8)) < 1e-7);
  CHECK(std::abs(vertical_wavenumber(1.5, 2.5) - cplx(0.0, 2.0)) < 1e-14);
  // below the real axis the root keeps a nonnegative imaginary part
  for (cplx kr : {cplx(0.5, -0.4), cplx(3.0, -0.4), cplx(20.0, -0.4)}) CHECK(vertical_wavenumber(1.5, kr).imag() >= 0.0);
}

TEST_CASE("medium geometry and layer lookup") {
  const LayeredMedium m({0.0, -2.0}, {0.8, 1.5, 2.0});
  CHECK(m.num_layers() == 3);
  CHECK(m.layer_of(1.0) == 0);
  CHECK(m.layer_of(-1.0) == 1);
  CHECK(m.layer_of(-3.0) == 2);
  CHECK(m.thickness(1) == doctest::Approx(2.0));
  CHECK_THROWS_AS(m.layer_of(0.0), DomainError);
  CHECK_THROWS_AS(m.layer_of(-2.0), DomainError);
  CHECK(m.k_min() == doctest::Approx(0.8));
  CHECK(m.k_max() == doctest::Approx(2.0));
  CHECK_FALSE(m.admissible(0, Direction::Down));
  CHECK_FALSE(m.admissible(2, Direction::Up));
  CHECK(m.admissible(1, Direction::Up));
  CHECK(m.admissible(1, Direction::Down));
  CHECK_THROWS_AS(LayeredMedium({0.0, 1.0}, {1.0, 1.0, 1.0}), DomainError);
  CHECK_THROWS_AS(LayeredMedium({0.0}, {1.0}), DomainError);
}

TEST_CASE("two-layer transmission at normal incidence") {
  const LayeredMedium m({0.0}, {0.8, 1.5});
  // 2 k0 k1z / (k0 k0z + k1 k1z) at krho = 0
  const cplx t = closed_form_two_layer(m, 1, 0, 0.0).du;
  CHECK(std::abs(t - 2.0 * 0.8 * 1.5 / (0.8 * 0.8 + 1.5 * 1.5)) < 1e-12);
  CHECK(t.real() == doctest::Approx(0.830450).epsilon(1e-6));
}

TEST_CASE("homogeneous medium has no reflection") {
  const LayeredMedium two({0.0}, {1.5, 1.5});
  const LayeredMedium three({0.0, -2.0}, {1.5, 1.5, 1.5});
  for (cplx kr : {cplx(0.3, 0.0), cplx(1.2, -0.75), cplx(4.0, -0.75)}) {
    const ReactionCoeffs c = closed_form_two_layer(two, 0, 0, kr);
    CHECK(std::abs(c.uu) < 1e-14);
    CHECK(std::abs(closed_form_two_layer(two, 1, 0, kr).du - 1.0) < 1e-14);
    for (int l = 0; l < 3; ++l) {
      const ReactionCoeffs g = solve_reaction_coeffs_general(three, l, l, kr);
      CHECK(std::abs(g.uu) + std::abs(g.ud) + std::abs(g.du) + std::abs(g.dd) < 1e-13);
    }
  }
}

TEST_CASE("general solver equals the closed forms") {
  const auto r = check_spectral_equivalence(50, 7, 1e-12);
  REQUIRE_FALSE(r.empty());
  for (const auto &c : r) {
    INFO(c.check << " error " << c.error);
    CHECK(c.pass);
  }
}

TEST_CASE("three-layer denominator identity and kappa22 pair") {
  for (const auto &c : check_kappa_identities(50, 11, 1e-13)) {
    INFO(c.check << " error " << c.error);
    CHECK(c.pass);
  }
}

TEST_CASE("solve_reaction_coeffs_all matches single solves") {
  const LayeredMedium m({0.0, -2.0}, {0.8, 1.5, 2.0});
  const cplx kr{1.1, -0.4};
  for (int lp = 0; lp < 3; ++lp) {
    const auto all = solve_reaction_coeffs_all(m, lp, kr);
    for (int l = 0; l < 3; ++l) {
      const ReactionCoeffs one = solve_reaction_coeffs_general(m, l, lp, kr);
      CHECK(std::abs(all[l].uu - one.uu) < 1e-14);
      CHECK(std::abs(all[l].ud - one.ud) < 1e-14);
      CHECK(std::abs(all[l].du - one.du) < 1e-14);
      CHECK(std::abs(all[l].dd - one.dd) < 1e-14);
    }
  }
}

TEST_CASE("density derivative orders against finite differences") {
  const LayeredMedium m({0.0, -2.0}, {0.8, 1.5, 2.0});
  const cplx kr{1.3, -0.4};
  const double zp = -0.7, h = 1e-4;
  for (Direction dir : {Direction::Up, Direction::Down}) {
    const cplx f = [&] {
      const cplx a = density_sigma_tilde(m, 1, 1, kr, zp + h, dir, 0);
      const cplx b = density_sigma_tilde(m, 1, 1, kr, zp - h, dir, 0);
      return (a - b) / (2 * h);
    }();
    CHECK(rel(density_sigma_tilde(m, 1, 1, kr, zp, dir, 1), f) < 1e-7);
  }
  // top source layer: only the up-going column exists and it carries e^{i k0z (z' - d0)}
  const cplx k0z = vertical_wavenumber(m, 0, kr);
  const ReactionCoeffs c = solve_reaction_coeffs_general(m, 0, 0, kr);
  const cplx s = density_sigma_tilde(m, 0, 0, kr, 0.6, Direction::Up, 0);
  CHECK(rel(s, c.uu * std::exp(I * k0z * 0.6)) < 1e-13);
}
