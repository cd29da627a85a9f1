/// \file config.hpp
/// \brief JSON run configuration: medium, particle blocks, solver settings and outputs.
#pragma once

#include <cstdint>

#include "lmfmm/fmm.hpp"

namespace lmfmm {

/// \brief One particle block (cube or quartic body) placed in one layer.
struct BlockSpec {
  std::string shape = "cube";  ///< "cube" or "quartic"
  Vec3 center;
  double size = 1.0;  ///< cube edge length
  double a = 0.1;     ///< quartic shape parameter, 0 < a < 0.5
  size_t N = 0;
  uint64_t seed = 1;         ///< position seed
  uint64_t charge_seed = 0;  ///< strength seed; 0 selects seed + 1000
  int layer = -1;            ///< -1 selects the layer of the centre
  /// Lowest and highest z any generated point can take.
  std::pair<double, double> z_extent() const;
};

/// \brief Accuracy sweep settings of the converge command.
struct ConvergeSpec {
  int p_min = 1, p_max = 8;
  std::vector<Variant> variants{Variant::TEFMM_I, Variant::TEFMM_II};
  size_t oracle_targets = 100;  ///< oracle targets per block
};

/// \brief Size sweep settings of the bench command.
struct BenchSpec {
  std::vector<size_t> N;  ///< particles per block; empty keeps the block sizes
  std::vector<Variant> variants{Variant::TEFMM_I};
};

struct RunConfig {
  std::vector<double> interfaces;
  std::vector<double> wavenumbers;
  std::vector<BlockSpec> blocks;
  FmmConfig solver;
  std::string mode = "verify";  ///< verify | converge | bench | tables
  ConvergeSpec converge;
  BenchSpec bench;
  std::string out_dir = "out";
  std::string csv_file;  ///< empty selects <command>.csv
  std::string report_file = "verify.json";
  std::string tables_file = "tables.swt";

  LayeredMedium medium() const;
  /// Throws DomainError when a block touches an interface or leaves its layer.
  void validate() const;
  /// Generate the particle set; N_override > 0 replaces every block size.
  ParticleSet particles(size_t N_override = 0) const;
};

RunConfig parse_config(const std::string &json_text);
RunConfig load_config(const std::string &path);
/// Resolved configuration as pretty-printed JSON (round-trips through parse_config).
std::string dump_config(const RunConfig &cfg);

/// \brief Built-in configurations for the cube example in two or three layers.
RunConfig example_cube_config(int layers, size_t N_per_block);

}  // namespace lmfmm
