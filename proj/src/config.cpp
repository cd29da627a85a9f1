#include "lmfmm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "lmfmm/generators.hpp"

namespace lmfmm {

using nlohmann::json;

namespace {

void check_keys(const json &j, const char *where, const std::set<std::string> &allowed) {
  if (!j.is_object()) throw DomainError(std::string("config: '") + where + "' must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw DomainError(std::string("config: unknown key '") + it.key() + "' in " + where);
}

Vec3 parse_vec3(const json &j, const char *what) {
  if (!j.is_array() || j.size() != 3) throw DomainError(std::string("config: ") + what + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <class T>
void get_opt(const json &j, const char *key, T &out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

std::vector<Variant> parse_variants(const json &j) {
  std::vector<Variant> v;
  for (const auto &s : j) v.push_back(parse_variant(s.get<std::string>()));
  if (v.empty()) throw DomainError("config: variant list is empty");
  return v;
}

json variants_json(const std::vector<Variant> &v) {
  json a = json::array();
  for (auto x : v) a.push_back(variant_name(x));
  return a;
}

}  // namespace

std::pair<double, double> BlockSpec::z_extent() const {
  // the quartic radius is largest (0.5) along the axis, so the body spans center.z +- 0.5
  const double h = shape == "quartic" ? 0.5 : 0.5 * size;
  return {center.z - h, center.z + h};
}

LayeredMedium RunConfig::medium() const { return LayeredMedium(interfaces, wavenumbers); }

void RunConfig::validate() const {
  const LayeredMedium m = medium();
  solver.validate();
  if (blocks.empty()) throw DomainError("config: no particle blocks");
  static const std::set<std::string> modes{"verify", "converge", "bench", "tables"};
  if (!modes.count(mode)) throw DomainError("config: unknown mode '" + mode + "'");
  if (converge.p_min < 0 || converge.p_max < converge.p_min) throw DomainError("config: bad converge p range");
  for (size_t i = 0; i < blocks.size(); ++i) {
    const BlockSpec &b = blocks[i];
    const std::string tag = "config: block " + std::to_string(i);
    if (b.shape != "cube" && b.shape != "quartic") throw DomainError(tag + ": shape must be cube or quartic");
    if (b.N < 1) throw DomainError(tag + ": N must be >= 1");
    if (b.shape == "cube" && !(b.size > 0.0)) throw DomainError(tag + ": size must be positive");
    if (b.shape == "quartic" && !(b.a > 0.0 && b.a < 0.5)) throw DomainError(tag + ": a must lie in (0, 0.5)");
    const auto [zlo, zhi] = b.z_extent();
    int layer = b.layer;
    if (layer < 0) {
      if (!m.inside(m.layer_of(b.center.z), b.center.z)) throw DomainError(tag + ": centre lies on an interface");
      layer = m.layer_of(b.center.z);
    }
    if (layer >= m.num_layers()) throw DomainError(tag + ": layer index out of range");
    if (!(zlo > m.bottom(layer) && zhi < m.top(layer))) {
      std::ostringstream s;
      s << tag << ": z extent [" << zlo << ", " << zhi << "] touches or crosses an interface of layer " << layer;
      throw DomainError(s.str());
    }
  }
}

ParticleSet RunConfig::particles(size_t N_override) const {
  validate();
  const LayeredMedium m = medium();
  ParticleSet ps;
  for (const auto &b : blocks) {
    const size_t N = N_override > 0 ? N_override : b.N;
    LayerParticles lp;
    lp.layer = b.layer >= 0 ? b.layer : m.layer_of(b.center.z);
    lp.pos = b.shape == "cube" ? generate_cube(b.center, b.size, N, b.seed) : generate_quartic(b.center, b.a, N, b.seed);
    lp.q = generate_strengths(N, b.charge_seed != 0 ? b.charge_seed : b.seed + 1000);
    ps.push_back(std::move(lp));
  }
  validate_particles(m, ps);
  return ps;
}

RunConfig parse_config(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw DomainError(std::string("config: invalid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    check_keys(j, "top level", {"medium", "blocks", "solver", "mode", "converge", "bench", "output"});
    const json &md = j.at("medium");
    check_keys(md, "medium", {"interfaces", "wavenumbers"});
    c.interfaces = md.at("interfaces").get<std::vector<double>>();
    c.wavenumbers = md.at("wavenumbers").get<std::vector<double>>();

    for (const auto &bj : j.at("blocks")) {
      check_keys(bj, "block", {"shape", "center", "size", "a", "N", "seed", "charge_seed", "layer"});
      BlockSpec b;
      get_opt(bj, "shape", b.shape);
      b.center = parse_vec3(bj.at("center"), "block center");
      get_opt(bj, "size", b.size);
      get_opt(bj, "a", b.a);
      b.N = bj.at("N").get<size_t>();
      b.seed = bj.at("seed").get<uint64_t>();
      get_opt(bj, "charge_seed", b.charge_seed);
      get_opt(bj, "layer", b.layer);
      c.blocks.push_back(b);
    }

    if (j.contains("solver")) {
      const json &s = j.at("solver");
      check_keys(s, "solver",
                 {"p", "variant", "capacity", "depth_cap", "mac", "theta_cross", "quad_tol", "dcim_tol", "table_tol", "table_order",
                  "threads", "deterministic"});
      FmmConfig &f = c.solver;
      get_opt(s, "p", f.p);
      if (s.contains("variant")) f.variant = parse_variant(s.at("variant").get<std::string>());
      get_opt(s, "capacity", f.capacity);
      get_opt(s, "depth_cap", f.depth_cap);
      get_opt(s, "mac", f.mac);
      get_opt(s, "theta_cross", f.theta_cross);
      get_opt(s, "quad_tol", f.quad_tol);
      get_opt(s, "dcim_tol", f.dcim_tol);
      get_opt(s, "table_tol", f.table_tol);
      get_opt(s, "table_order", f.table_order);
      get_opt(s, "threads", f.threads);
      get_opt(s, "deterministic", f.deterministic);
    }
    get_opt(j, "mode", c.mode);
    if (j.contains("converge")) {
      const json &s = j.at("converge");
      check_keys(s, "converge", {"p_min", "p_max", "variants", "oracle_targets"});
      get_opt(s, "p_min", c.converge.p_min);
      get_opt(s, "p_max", c.converge.p_max);
      if (s.contains("variants")) c.converge.variants = parse_variants(s.at("variants"));
      get_opt(s, "oracle_targets", c.converge.oracle_targets);
    }
    if (j.contains("bench")) {
      const json &s = j.at("bench");
      check_keys(s, "bench", {"N", "variants"});
      get_opt(s, "N", c.bench.N);
      if (s.contains("variants")) c.bench.variants = parse_variants(s.at("variants"));
    }
    if (j.contains("output")) {
      const json &s = j.at("output");
      check_keys(s, "output", {"dir", "csv", "report", "tables"});
      get_opt(s, "dir", c.out_dir);
      get_opt(s, "csv", c.csv_file);
      get_opt(s, "report", c.report_file);
      get_opt(s, "tables", c.tables_file);
    }
  } catch (const json::exception &e) {
    throw DomainError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string dump_config(const RunConfig &c) {
  json j;
  j["medium"] = {{"interfaces", c.interfaces}, {"wavenumbers", c.wavenumbers}};
  j["blocks"] = json::array();
  for (const auto &b : c.blocks) {
    json bj = {{"shape", b.shape},
               {"center", {b.center.x, b.center.y, b.center.z}},
               {"N", b.N},
               {"seed", b.seed},
               {"charge_seed", b.charge_seed},
               {"layer", b.layer}};
    if (b.shape == "cube")
      bj["size"] = b.size;
    else
      bj["a"] = b.a;
    j["blocks"].push_back(bj);
  }
  const FmmConfig &f = c.solver;
  j["solver"] = {{"p", f.p},
                 {"variant", variant_name(f.variant)},
                 {"capacity", f.capacity},
                 {"depth_cap", f.depth_cap},
                 {"mac", f.mac},
                 {"theta_cross", f.theta_cross},
                 {"quad_tol", f.quad_tol},
                 {"dcim_tol", f.dcim_tol},
                 {"table_tol", f.table_tol},
                 {"table_order", f.table_order},
                 {"threads", f.threads},
                 {"deterministic", f.deterministic}};
  j["mode"] = c.mode;
  j["converge"] = {{"p_min", c.converge.p_min},
                   {"p_max", c.converge.p_max},
                   {"variants", variants_json(c.converge.variants)},
                   {"oracle_targets", c.converge.oracle_targets}};
  j["bench"] = {{"N", c.bench.N}, {"variants", variants_json(c.bench.variants)}};
  j["output"] = {{"dir", c.out_dir}, {"csv", c.csv_file}, {"report", c.report_file}, {"tables", c.tables_file}};
  return j.dump(2);
}

RunConfig example_cube_config(int layers, size_t N) {
  if (layers != 2 && layers != 3) throw DomainError("example_cube_config: layers must be 2 or 3");
  RunConfig c;
  if (layers == 2) {
    c.interfaces = {0.0};
    c.wavenumbers = {0.8, 1.5};
  } else {
    c.interfaces = {0.0, -2.0};
    c.wavenumbers = {0.8, 1.5, 2.0};
  }
  const double zc[3] = {1.0, -1.0, -3.0};
  for (int l = 0; l < layers; ++l) {
    BlockSpec b;
    b.center = {0.5, 0.5, zc[l]};
    b.size = 1.0;
    b.N = N;
    b.seed = uint64_t(10 + l);
    b.charge_seed = uint64_t(20 + l);
    b.layer = l;
    c.blocks.push_back(b);
  }
  return c;
}

}  // namespace lmfmm
