// Reference sums, error metrics, finite differences, generators, configuration and the CLI.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "lmfmm/config.hpp"
#include "lmfmm/generators.hpp"
#include "lmfmm/oracle.hpp"
#include "lmfmm/sommerfeld.hpp"
#include "lmfmm/special.hpp"

using namespace lmfmm;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) out.push_back(l);
  return out;
}

int run_cli(const std::string &args) {
  const std::string cmd = std::string(LMFMM_BENCH_EXE) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

const char *kSmallConfig = R"({
  "medium": {"interfaces": [0.0], "wavenumbers": [0.8, 1.5]},
  "blocks": [
    {"shape": "cube", "center": [0.5, 0.5, 1.0], "N": 120, "seed": 10},
    {"shape": "quartic", "center": [0.5, 0.5, -1.0], "a": 0.1, "N": 120, "seed": 11}
  ],
  "solver": {"p": 2, "capacity": 30},
  "converge": {"p_min": 1, "p_max": 2, "variants": ["TEFMM-I", "TEFMM-II"], "oracle_targets": 10},
  "bench": {"N": [40, 80], "variants": ["TEFMM-II"]}
})";

}  // namespace

TEST_CASE("error metrics") {
  const std::vector<cplx> e{1.0, 2.0, cplx(0.0, 2.0)};
  const ErrorReport same = error_metrics(e, e);
  CHECK(same.err2 == 0.0);
  CHECK(same.errmax == 0.0);
  const std::vector<cplx> a{1.1, 2.0, cplx(0.0, 2.0)};
  const ErrorReport r = error_metrics(e, a);
  CHECK(r.err2 == doctest::Approx(0.1 / 3.0));
  CHECK(r.errmax == doctest::Approx(0.1));
  // the tiny entry is ignored by Err_max but still counts in Err2
  const ErrorReport f = error_metrics({1.0, 1e-20}, {1.0, 1e-10});
  CHECK(f.skipped == 1);
  CHECK(f.errmax == 0.0);
  CHECK_THROWS_AS(error_metrics({0.0}, {1.0}), DomainError);
  CHECK_THROWS_AS(error_metrics({1.0}, {1.0, 2.0}), DomainError);
}

TEST_CASE("finite differences of known functions") {
  const ScalarField f = [](const Vec3 &x) { return std::exp(cplx(0.3, 0.1) * x.x + 0.7 * x.y - 0.2 * x.z); };
  const Vec3 x{0.2, -0.1, 0.4};
  const cplx f0 = f(x);
  for (const std::array<int, 3> &k : {std::array<int, 3>{1, 0, 0}, {0, 2, 1}, {1, 1, 2}, {0, 0, 4}}) {
    const cplx expect = f0 * std::pow(cplx(0.3, 0.1), k[0]) * std::pow(0.7, k[1]) * std::pow(-0.2, k[2]);
    CHECK(std::abs(finite_difference(f, x, k) - expect) <= 1e-6 * std::abs(f0));
  }
  const ScalarField g = [](const Vec3 &x) { return cplx(x.x * x.x * x.y, 0.0); };
  // (dx - i dy)(dx + i dy) x^2 y = 2y
  CHECK(std::abs(finite_difference_sym(g, x, 2, 2, 1) - cplx(2.0 * x.y, 0.0)) < 1e-7);
}

TEST_CASE("generators") {
  const auto a = generate_cube({0.5, 0.5, 0.5}, 1.0, 1000, 1);
  const auto b = generate_cube({0.5, 0.5, 0.5}, 1.0, 1000, 1);
  CHECK(a.size() == 1000);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x == b[i].x);
    CHECK(a[i].x >= 0.0);
    CHECK(a[i].z < 1.0);
  }
  double frac = 0.0;
  const auto q = generate_quartic({0.0, 0.0, 0.0}, 0.1, 2000, 3, &frac);
  for (const Vec3 &p : q) CHECK(inside_quartic({0.0, 0.0, 0.0}, 0.1, p));
  CHECK(frac > 0.2);
  CHECK(frac < 0.6);
  CHECK(quartic_radius(0.1, 1.0) == doctest::Approx(0.5));
  const auto s = generate_strengths(5000, 4);
  double mean = 0.0;
  for (cplx v : s) {
    CHECK(v.imag() == 0.0);
    CHECK(v.real() >= 0.0);
    CHECK(v.real() < 1.0);
    mean += v.real() / 5000.0;
  }
  CHECK(mean == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("direct sums") {
  const std::vector<Vec3> s{{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  const std::vector<cplx> q{1.0, 2.0};
  const auto d = direct_free(s, s, q, 1.5, true);
  CHECK(std::abs(d[0] - 2.0 * hankel0(1.5)) < 1e-15);
  CHECK(std::abs(d[1] - hankel0(1.5)) < 1e-15);
  const auto d2 = direct_free({{0.0, 0.0, 2.0}}, s, q, 1.5, false);
  CHECK(std::abs(d2[0] - (hankel0(3.0) + 2.0 * hankel0(1.5 * std::sqrt(5.0)))) < 1e-15);

  const LayeredMedium m({0.0}, {0.8, 1.5});
  const ComponentKey key{0, 0, Direction::Up};
  const Vec3 r{0.3, 0.1, 0.8}, rp{0.0, 0.2, 1.1};
  ContourOptions o;
  o.gap = vertical_gap(m, 0, 0, Direction::Up, r.z, rp.z);
  o.power = 1;
  const cplx g = eval_scattered_green(m, 0, 0, r, rp, Direction::Up, build_contour(m, 1e-14, o)).value;
  const auto c = direct_component(m, key, {r}, {rp}, {cplx(0.5, 0.0)});
  CHECK(std::abs(c[0] - 0.5 * g) <= 1e-10 * std::abs(g));
}

TEST_CASE("oracle subset spacing") {
  ParticleSet ps{{0, std::vector<Vec3>(1000), std::vector<cplx>(1000)}, {1, std::vector<Vec3>(7), std::vector<cplx>(7)}};
  const auto t = oracle_subset(ps, 100);
  CHECK(t[0].size() == 100);
  CHECK(t[0][1] - t[0][0] == 10);
  CHECK(t[1].size() == 7);
}

TEST_CASE("configuration parsing and validation") {
  const RunConfig c = parse_config(kSmallConfig);
  CHECK(c.blocks.size() == 2);
  CHECK(c.solver.p == 2);
  CHECK(c.converge.variants.size() == 2);
  const ParticleSet ps = c.particles();
  CHECK(ps[0].layer == 0);
  CHECK(ps[1].layer == 1);
  CHECK(ps[1].pos.size() == 120);
  // the resolved dump parses back to the same configuration
  CHECK(dump_config(parse_config(dump_config(c))) == dump_config(c));

  nlohmann::json j = nlohmann::json::parse(kSmallConfig);
  SUBCASE("particles on an interface are rejected") {
    j["blocks"][0]["center"] = {0.5, 0.5, 0.4};
    CHECK_THROWS_AS(parse_config(j.dump()), DomainError);
    j["blocks"][0]["center"] = {0.5, 0.5, 0.0};
    CHECK_THROWS_AS(parse_config(j.dump()), DomainError);
  }
  SUBCASE("unknown keys are rejected") {
    j["solver"]["order"] = 3;
    CHECK_THROWS_AS(parse_config(j.dump()), DomainError);
  }
  SUBCASE("bad solver values are rejected") {
    j["solver"]["p"] = -1;
    CHECK_THROWS_AS(parse_config(j.dump()), DomainError);
  }
  SUBCASE("bad variant name") {
    j["converge"]["variants"] = {"TEFMM-III"};
    CHECK_THROWS_AS(parse_config(j.dump()), DomainError);
  }
}

TEST_CASE("command-line front end") {
  const fs::path dir = fs::temp_directory_path() / "lmfmm_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "small.json";
  std::ofstream(cfg) << kSmallConfig;

  SUBCASE("converge writes the CSV table") {
    REQUIRE(run_cli("converge --config " + cfg.string() + " --out " + (dir / "conv").string() + " --deterministic") == 0);
    const auto rows = lines_of(read_file(dir / "conv" / "converge.csv"));
    REQUIRE(rows.size() > 1);
    CHECK(rows[0] == "N,p,variant,component,err2,errmax,time_s");
    // 2 variants x 2 orders x (total + free + 4 components)
    CHECK(rows.size() == 1 + 2 * 2 * 6);
    CHECK(rows[1].rfind("240,1,TEFMM-I,total,", 0) == 0);
    CHECK(fs::exists(dir / "conv" / "config.resolved.json"));
  }
  SUBCASE("bench writes timings") {
    REQUIRE(run_cli("bench --config " + cfg.string() + " --out " + (dir / "bench").string() + " --threads 1") == 0);
    const auto rows = lines_of(read_file(dir / "bench" / "bench.csv"));
    REQUIRE(rows.size() > 1);
    CHECK(rows[0] == "N,p,variant,component,err2,errmax,time_s");
    CHECK(rows.back().rfind("160,2,TEFMM-II,total,,,", 0) == 0);
  }
  SUBCASE("verify writes the JSON report") {
    REQUIRE(run_cli("verify --out " + (dir / "verify").string()) == 0);
    const auto rep = nlohmann::json::parse(read_file(dir / "verify" / "verify.json"));
    REQUIRE(rep.is_array());
    CHECK(rep.size() > 20);
    for (const auto &e : rep) {
      CHECK(e.contains("check"));
      CHECK(e.contains("value"));
      CHECK(e.contains("reference"));
      CHECK(e.contains("tolerance"));
      CHECK(e.at("status") == "PASS");
    }
  }
  SUBCASE("tables reports image counts") {
    REQUIRE(run_cli("tables --config " + cfg.string() + " --out " + (dir / "tab").string()) == 0);
    CHECK(fs::file_size(dir / "tab" / "tables.swt") > 0);
  }
  SUBCASE("an interface particle stops the run before any output") {
    nlohmann::json j = nlohmann::json::parse(kSmallConfig);
    j["blocks"][1]["center"] = {0.5, 0.5, -0.3};
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << j.dump();
    CHECK(run_cli("converge --config " + bad.string() + " --out " + (dir / "bad").string()) == 2);
    CHECK_FALSE(fs::exists(dir / "bad" / "converge.csv"));
  }
  SUBCASE("missing arguments are usage errors") {
    CHECK(run_cli("converge --out " + (dir / "x").string()) != 0);
    CHECK(run_cli("") != 0);
  }
  fs::remove_all(dir);
}
