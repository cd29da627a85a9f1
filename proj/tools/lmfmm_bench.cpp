// Command-line front end: verify, converge, bench and tables.
//
//   lmfmm_bench verify   [--config c.json] --out dir
//   lmfmm_bench converge --config c.json --out dir [--threads N] [--deterministic]
//   lmfmm_bench bench    --config c.json --out dir [--threads N] [--deterministic]
//   lmfmm_bench tables   --config c.json --out dir [--threads N] [--deterministic]

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "lmfmm/checks.hpp"
#include "lmfmm/config.hpp"
#include "lmfmm/oracle.hpp"

using namespace lmfmm;
namespace fs = std::filesystem;

namespace {

constexpr const char *kCsvHeader = "N,p,variant,component,err2,errmax,time_s";

double now() { return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count(); }

struct Options {
  std::string config;
  std::string out = "out";
  int threads = -1;
  bool deterministic = false;
};

RunConfig resolve(const Options &o, const std::string &mode) {
  RunConfig cfg = load_config(o.config);
  cfg.mode = mode;
  if (o.threads >= 0) cfg.solver.threads = o.threads;
  if (o.deterministic) cfg.solver.deterministic = true;
  cfg.out_dir = o.out;
  cfg.validate();
  return cfg;
}

std::string out_path(const RunConfig &cfg, const std::string &file, const std::string &fallback) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / (file.empty() ? fallback : file)).string();
}

void write_resolved(const RunConfig &cfg) {
  std::ofstream(out_path(cfg, "config.resolved.json", "")) << dump_config(cfg) << "\n";
}

std::string csv_row(size_t N, int p, Variant v, const std::string &comp, const ErrorReport *e, double t) {
  char buf[256];
  if (e)
    std::snprintf(buf, sizeof buf, "%zu,%d,%s,%s,%.6e,%.6e,%.6f", N, p, variant_name(v).c_str(), comp.c_str(), e->err2,
                  e->errmax, t);
  else
    std::snprintf(buf, sizeof buf, "%zu,%d,%s,%s,,,%.6f", N, p, variant_name(v).c_str(), comp.c_str(), t);
  return buf;
}

size_t total_particles(const ParticleSet &ps) {
  size_t n = 0;
  for (const auto &b : ps) n += b.pos.size();
  return n;
}

int cmd_verify(const Options &o) {
  RunConfig cfg;
  if (!o.config.empty()) cfg = resolve(o, "verify");
  cfg.out_dir = o.out;
  const double t0 = now();
  const std::vector<CheckResult> r = run_verify_suite();
  const std::string path = out_path(cfg, cfg.report_file, "verify.json");
  std::ofstream(path) << checks_to_json(r) << "\n";
  size_t failed = 0;
  for (const auto &c : r) {
    if (!c.pass) {
      ++failed;
      std::printf("FAIL %s: error %.3e > tolerance %.1e\n", c.check.c_str(), c.error, c.tolerance);
    }
  }
  std::printf("verify: %zu checks, %zu failed, %.2f s, report %s\n", r.size(), failed, now() - t0, path.c_str());
  return failed == 0 ? 0 : 1;
}

int cmd_converge(const Options &o) {
  const RunConfig cfg = resolve(o, "converge");
  const ParticleSet ps = cfg.particles();
  const LayeredMedium m = cfg.medium();
  write_resolved(cfg);
  const auto targets = oracle_subset(ps, cfg.converge.oracle_targets);
  std::printf("converge: computing reference sums at %zu targets per block\n", cfg.converge.oracle_targets);
  const OracleResult orc = direct_total(m, ps, targets, cfg.solver.quad_tol);
  std::printf("converge: reference done in %.1f s\n", orc.time_s);
  const size_t N = total_particles(ps);
  const std::string path = out_path(cfg, cfg.csv_file, "converge.csv");
  std::ofstream csv(path);
  csv << kCsvHeader << "\n";
  for (Variant v : cfg.converge.variants)
    for (int p = cfg.converge.p_min; p <= cfg.converge.p_max; ++p) {
      FmmConfig fc = cfg.solver;
      fc.p = p;
      fc.variant = v;
      const double t0 = now();
      LayeredFmm fmm(m, ps, fc);
      const TotalResult res = fmm.run_total();
      const double t = now() - t0;
      const ErrorReport tot = error_metrics(flatten(orc.phi), gather(res.phi, targets));
      csv << csv_row(N, p, v, "total", &tot, t) << "\n";
      for (const auto &[label, part] : orc.parts) {
        const ErrorReport e = error_metrics(flatten(part), gather(res.parts.at(label), targets));
        csv << csv_row(N, p, v, label, &e, res.seconds(label)) << "\n";
      }
      csv.flush();
      std::printf("converge: %s p=%d Err2=%.3e Errmax=%.3e (%.2f s)\n", variant_name(v).c_str(), p, tot.err2, tot.errmax,
                  t);
    }
  std::printf("converge: wrote %s\n", path.c_str());
  return 0;
}

int cmd_bench(const Options &o) {
  const RunConfig cfg = resolve(o, "bench");
  const LayeredMedium m = cfg.medium();
  write_resolved(cfg);
  std::vector<size_t> sizes = cfg.bench.N;
  if (sizes.empty()) sizes.push_back(0);
  const std::string path = out_path(cfg, cfg.csv_file, "bench.csv");
  std::ofstream csv(path);
  csv << kCsvHeader << "\n";
  for (size_t n : sizes) {
    const ParticleSet ps = cfg.particles(n);
    const size_t N = total_particles(ps);
    for (Variant v : cfg.bench.variants) {
      FmmConfig fc = cfg.solver;
      fc.variant = v;
      const double t0 = now();
      LayeredFmm fmm(m, ps, fc);
      const double t_tree = now() - t0;
      const TotalResult res = fmm.run_total();
      const double t = now() - t0;
      csv << csv_row(N, fc.p, v, "tree", nullptr, t_tree) << "\n";
      for (const auto &[label, secs] : res.timings) csv << csv_row(N, fc.p, v, label, nullptr, secs) << "\n";
      csv << csv_row(N, fc.p, v, "total", nullptr, t) << "\n";
      csv.flush();
      std::printf("bench: N=%zu %s p=%d total %.2f s (free %.2f s)\n", N, variant_name(v).c_str(), fc.p, t,
                  res.seconds("free"));
    }
  }
  std::printf("bench: wrote %s\n", path.c_str());
  return 0;
}

int cmd_tables(const Options &o) {
  const RunConfig cfg = resolve(o, "tables");
  const ParticleSet ps = cfg.particles();
  write_resolved(cfg);
  const double t0 = now();
  LayeredFmm fmm(cfg.medium(), ps, cfg.solver);
  fmm.precompute();
  const TableSet &t = fmm.tables();
  const std::string path = out_path(cfg, cfg.tables_file, "tables.swt");
  t.save(path);
  std::printf("tables: %zu near-field, %zu image sets, %zu S tables in %.2f s\n", t.near.size(), t.images.size(),
              t.stables.size(), now() - t0);
  for (const auto &c : fmm.components())
    if (cfg.solver.variant == Variant::TEFMM_I)
      std::printf("tables: %s image sets %zu = %zu heights x %d orders\n", c.key.label().c_str(),
                  t.image_set_count(c.key), fmm.distinct_source_heights(c), cfg.solver.p + 1);
  std::printf("tables: hash %s, wrote %s\n", hex(t.config_hash).c_str(), path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Layered-media Taylor-expansion FMM: checks, accuracy sweeps, timings and table precompute"};
  app.require_subcommand(1);
  Options o;
  auto add_common = [&](CLI::App *sub, bool need_config) {
    auto *c = sub->add_option("--config", o.config, "JSON run configuration");
    if (need_config) c->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory")->required();
    sub->add_option("--threads", o.threads, "worker threads (0 keeps the OpenMP default)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--deterministic", o.deterministic, "single thread, fixed reduction order");
  };
  auto *verify = app.add_subcommand("verify", "reference checks; writes a JSON report");
  auto *converge = app.add_subcommand("converge", "error against direct sums over a range of p");
  auto *bench = app.add_subcommand("bench", "per-part wall times over particle counts");
  auto *tables = app.add_subcommand("tables", "precompute and save tables");
  add_common(verify, false);
  add_common(converge, true);
  add_common(bench, true);
  add_common(tables, true);
  CLI11_PARSE(app, argc, argv);
  try {
    if (verify->parsed()) return cmd_verify(o);
    if (converge->parsed()) return cmd_converge(o);
    if (bench->parsed()) return cmd_bench(o);
    if (tables->parsed()) return cmd_tables(o);
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
