// Derivative recurrences and the Taylor translation operators.

#include <cmath>
#include <random>

#include "doctest.h"
#include "lmfmm/checks.hpp"
#include "lmfmm/generators.hpp"
#include "lmfmm/oracle.hpp"
#include "lmfmm/special.hpp"
#include "lmfmm/taylor.hpp"

using namespace lmfmm;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<Vec3> points_in_box(const Vec3 &c, double half, size_t n, uint64_t seed) {
  return generate_cube(c, 2.0 * half, n, seed);
}

}  // namespace

TEST_CASE("recurrence suite") {
  for (const auto &c : check_nonsym_vs_fd(4, 1e-6)) {
    INFO(c.check << " error " << c.error);
    CHECK(c.pass);
  }
  for (const auto &c : check_ladder_special_case(6, 1e-12)) {
    INFO(c.check << " error " << c.error);
    CHECK(c.pass);
  }
  for (const auto &c : check_sym_nonsym(8, 1e-9)) {
    INFO(c.check << " error " << c.error);
    CHECK(c.pass);
  }
}

TEST_CASE("first nonsymmetric derivative closed form") {
  const double k = 1.5;
  const Vec3 r{0.4, -0.3, 0.9};
  const double R = norm(r);
  const auto a = nonsym_derivs(k, CVec3{r.x, r.y, r.z}, 1);
  CHECK(rel(a[mi_index(0, 0, 0)], spherical_hankel(0, k * R)) < 1e-14);
  const cplx dh = -k * spherical_hankel(1, k * R);
  CHECK(rel(a[mi_index(1, 0, 0)], dh * r.x / R) < 1e-13);
  CHECK(rel(a[mi_index(0, 1, 0)], dh * r.y / R) < 1e-13);
  CHECK(rel(a[mi_index(0, 0, 1)], dh * r.z / R) < 1e-13);
}

TEST_CASE("source expansion basics") {
  const Vec3 c{0.2, -0.1, 0.4};
  const auto one = source_te_nonsym({c}, {1.0}, c, 4);
  CHECK(std::abs(one.c[0] - 1.0) < 1e-15);
  for (size_t t = 1; t < one.c.size(); ++t) CHECK(std::abs(one.c[t]) == 0.0);
  // a +q/-q pair symmetric about the centre has no even-order moments
  const Vec3 d{0.1, 0.05, -0.07};
  const auto pair = source_te_nonsym({c + d, c - d}, {1.0, -1.0}, c, 5, 0.5);
  const auto &list = mi_list(5);
  for (size_t t = 0; t < list.size(); ++t)
    if ((list[t][0] + list[t][1] + list[t][2]) % 2 == 0) CHECK(std::abs(pair.c[t]) < 1e-15);
  CHECK_THROWS_AS(source_te_nonsym({c}, {1.0, 2.0}, c, 2), DomainError);
}

TEST_CASE("multipole to multipole composes and matches recomputation") {
  const auto pts = points_in_box({0.25, 0.25, 0.25}, 0.25, 40, 3);
  const auto q = generate_strengths(40, 4);
  const int p = 6;
  const auto child = source_te_nonsym(pts, q, {0.25, 0.25, 0.25}, p, 0.25);
  const auto mid = m2m_nonsym(child, {0.5, 0.5, 0.5}, 0.5);
  const auto top = m2m_nonsym(mid, {1.0, 1.0, 1.0}, 1.0);
  const auto direct = m2m_nonsym(child, {1.0, 1.0, 1.0}, 1.0);
  const auto fresh = source_te_nonsym(pts, q, {1.0, 1.0, 1.0}, p, 1.0);
  for (size_t t = 0; t < top.c.size(); ++t) {
    CHECK(std::abs(top.c[t] - direct.c[t]) < 1e-12 * (1.0 + std::abs(direct.c[t])));
    CHECK(std::abs(top.c[t] - fresh.c[t]) < 1e-12 * (1.0 + std::abs(fresh.c[t])));
  }
  const auto schild = source_te_sym(pts, q, {0.25, 0.25, 0.25}, p, 0.25);
  const auto sup = m2m_sym(schild, {1.0, 1.0, 1.0}, 1.0);
  const auto sfresh = source_te_sym(pts, q, {1.0, 1.0, 1.0}, p, 1.0);
  for (size_t t = 0; t < sup.c.size(); ++t) CHECK(std::abs(sup.c[t] - sfresh.c[t]) < 1e-12 * (1.0 + std::abs(sfresh.c[t])));
}

TEST_CASE("multipole to local at order zero") {
  const double k = 1.2;
  const Vec3 cs{0.0, 0.0, 0.0}, ct{3.0, -1.0, 2.0};
  const auto src = source_te_nonsym({{0.05, -0.02, 0.01}}, {2.5}, cs, 0, 0.5);
  const auto loc = m2l_free_nonsym(src, ct, k, 0.5);
  CHECK(rel(loc.c[0], 2.5 * spherical_hankel(0, k * norm(ct - cs))) < 1e-14);
}

TEST_CASE("local to local reproduces polynomials") {
  NonSymCoeffs parent{3, {0.0, 0.0, 0.0}, 1.0, ExpansionRole::Target, std::vector<cplx>(mi_count(3))};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto &v : parent.c) v = {u(rng), u(rng)};
  const auto child = l2l_nonsym(parent, {0.3, -0.2, 0.1}, 0.5);
  for (const Vec3 &x : {Vec3{0.3, -0.2, 0.1}, Vec3{0.5, 0.0, 0.2}, Vec3{0.1, -0.4, -0.1}})
    CHECK(std::abs(eval_local(child, x) - eval_local(parent, x)) < 1e-13);
}

TEST_CASE("far-field translation chain converges to direct sums") {
  const double k = 1.5;
  const auto pts = points_in_box({0.0, 0.0, 0.0}, 0.25, 30, 8);
  const auto q = generate_strengths(30, 9);
  const Vec3 ct{1.25, 0.25, -0.25};
  const auto tgt = points_in_box(ct, 0.25, 10, 10);
  const auto exact = direct_free(tgt, pts, q, k, false);
  double prev = 1e300;
  for (int p : {2, 4, 6, 8}) {
    const auto src = source_te_nonsym(pts, q, {0.0, 0.0, 0.0}, p, 0.25);
    const auto loc = m2l_free_nonsym(src, ct, k, 0.25);
    const auto ssrc = source_te_sym(pts, q, {0.0, 0.0, 0.0}, p, 0.25);
    const auto sloc = m2l_free_sym(ssrc, ct, k, 0.25);
    double err = 0.0, serr = 0.0, merr = 0.0, nrm = 0.0;
    for (size_t i = 0; i < tgt.size(); ++i) {
      err = std::max(err, std::abs(eval_local(loc, tgt[i]) - exact[i]));
      serr = std::max(serr, std::abs(eval_local(sloc, tgt[i]) - exact[i]));
      merr = std::max(merr, std::abs(eval_multipole(src, k, tgt[i]) - exact[i]));
      nrm = std::max(nrm, std::abs(exact[i]));
    }
    INFO("p=" << p);
    CHECK(err < prev);
    CHECK(std::abs(serr - err) <= 1e-8 * nrm + 0.5 * err);
    prev = err;
    if (p == 8) {
      CHECK(err < 1e-6 * nrm);
      CHECK(merr < 1e-6 * nrm);
    }
  }
}

TEST_CASE("matrix forms equal the coefficient operators") {
  const auto pts = points_in_box({0.25, -0.25, 0.25}, 0.25, 12, 12);
  const auto q = generate_strengths(12, 13);
  const int p = 4;
  const auto child = source_te_sym(pts, q, {0.25, -0.25, 0.25}, p, 0.25);
  const MatrixXcd M = m2m_matrix_sym(Vec3{0.25, -0.25, 0.25} - Vec3{0.5, -0.5, 0.5}, 0.25, 0.5, p);
  const VectorXcd v = M * Eigen::Map<const VectorXcd>(child.c.data(), child.c.size());
  const auto ref = m2m_sym(child, {0.5, -0.5, 0.5}, 0.5);
  for (size_t t = 0; t < ref.c.size(); ++t) CHECK(std::abs(v[t] - ref.c[t]) < 1e-14 * (1.0 + std::abs(ref.c[t])));
}
