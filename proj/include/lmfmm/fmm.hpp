/// \file fmm.hpp
/// \brief Taylor-expansion FMM for free space and for layered-media scattered components.
#pragma once

#include <functional>
#include <map>
#include <memory>

#include "lmfmm/tables.hpp"
#include "lmfmm/taylor.hpp"
#include "lmfmm/tree.hpp"

namespace lmfmm {

/// TEFMM_I: nonsymmetric expansions and DCIM images. TEFMM_II: symmetric expansions and S tables.
enum class Variant { TEFMM_I, TEFMM_II };
std::string variant_name(Variant v);
Variant parse_variant(const std::string &s);

struct FmmConfig {
  int p = 6;
  Variant variant = Variant::TEFMM_I;
  int capacity = 60;
  int depth_cap = 10;
  double mac = 2.0;          ///< separation factor of the interaction lists (see well_separated)
  double theta_cross = 0.5;  ///< extra opening ratio for pairs of different blocks; 0 disables it
  double quad_tol = 1e-12;   ///< Sommerfeld quadrature tolerance for tables
  double dcim_tol = 1e-6;    ///< relative DCIM fit tolerance
  double table_tol = 1e-9;   ///< relative near-field interpolation tolerance
  int table_order = 6;       ///< Lagrange points per table axis
  int threads = 0;           ///< 0 keeps the OpenMP default
  bool deterministic = false;
  void validate() const;
  /// Canonical text used for the table hash.
  std::string canonical() const;
};

/// \brief Particles of one layer.
struct LayerParticles {
  int layer = 0;
  std::vector<Vec3> pos;
  std::vector<cplx> q;
};
using ParticleSet = std::vector<LayerParticles>;

/// \brief Throws DomainError unless every particle lies strictly inside its block's layer.
void validate_particles(const LayeredMedium &m, const ParticleSet &ps);

/// \brief Result of a full layered run: potentials per block plus per-part breakdown and timings.
struct TotalResult {
  std::vector<std::vector<cplx>> phi;                            ///< per block, original order
  std::map<std::string, std::vector<std::vector<cplx>>> parts;   ///< label -> per block
  std::vector<std::pair<std::string, double>> timings;           ///< label -> seconds
  double seconds(const std::string &label) const;
};

/// \brief One FMM plan over a set of particle blocks sharing a cubic root.
class LayeredFmm {
 public:
  LayeredFmm(LayeredMedium m, ParticleSet ps, FmmConfig cfg, const RootCube *root = nullptr);

  const LayeredMedium &medium() const { return m_; }
  const FmmConfig &config() const { return cfg_; }
  const RootCube &root() const { return root_; }
  int num_blocks() const { return int(ps_.size()); }
  const LayerParticles &block(int b) const { return ps_[b]; }
  const BoxTree &tree(int b) const { return trees_[b]; }
  const InteractionLists &lists(int tb, int sb);

  /// Admissible scattered components between blocks.
  struct Component {
    int tb, sb;
    ComponentKey key;
  };
  std::vector<Component> components() const;

  /// Build every table the configured variant needs; records its time.
  void precompute();
  /// Precompute only one component (tables are added to the existing set).
  void precompute(const Component &c);
  TableSet &tables() { return tables_; }
  void set_tables(TableSet t) { tables_ = std::move(t); }
  std::array<uint8_t, 32> config_hash() const;

  /// Free-space interactions inside block b, self-interaction excluded.
  std::vector<cplx> free_space(int b);
  /// Free-space interactions of block sb on block tb (no exclusion unless tb == sb).
  std::vector<cplx> free_space(int tb, int sb);
  /// One scattered component; zero when the direction is not admissible in the target layer.
  std::vector<cplx> component(const Component &c);

  /// Free-space part plus all admissible components, per block.
  TotalResult run_total();

  /// Number of distinct source box-centre heights used by far interactions of a component.
  size_t distinct_source_heights(const Component &c);

 private:
  using Kernel = std::function<void(const Vec3 *, size_t, const Vec3 *, const cplx *, size_t, bool, cplx *)>;
  struct FarKey {
    int lt, ls, dx, dy, dz, zt, zs;
    auto operator<=>(const FarKey &) const = default;
  };
  using MatrixFn = std::function<MatrixXcd(const Box &, const Box &)>;

  const MatrixXcd &moments(int b);
  const MatrixXcd &shift_matrix(bool up, int level, int oct);
  std::vector<cplx> run_pass(int tb, int sb, bool layered_key, const MatrixFn &m2l, const Kernel &near);
  double anchor(const Component &c);

  LayeredMedium m_;
  ParticleSet ps_;
  FmmConfig cfg_;
  RootCube root_;
  std::vector<BoxTree> trees_;
  std::map<std::pair<int, int>, InteractionLists> lists_;
  std::map<int, MatrixXcd> moments_;
  std::map<std::tuple<bool, int, int>, MatrixXcd> shifts_;
  TableSet tables_;
};

/// \brief Free-space FMM of sum_j q_j h0(k|r_i - r_j|); targets == nullptr means sources are targets.
std::vector<cplx> run_free_space_fmm(const std::vector<Vec3> &sources, const std::vector<cplx> &q,
                                     const std::vector<Vec3> *targets, double k, const FmmConfig &cfg);

/// \brief One scattered component u^{dir}_{l l'} from source particles in l' to targets in l.
///
/// When tables is null the required tables are built on the fly.
std::vector<cplx> run_component_fmm(const LayeredMedium &m, const ComponentKey &key, const std::vector<Vec3> &sources,
                                    const std::vector<cplx> &q, const std::vector<Vec3> &targets,
                                    const FmmConfig &cfg, const TableSet *tables = nullptr);

/// \brief Total interactions of all blocks.
TotalResult run_total(const LayeredMedium &m, const ParticleSet &ps, const FmmConfig &cfg);

/// \brief Tables for a whole particle set (trees and lists are built internally).
TableSet precompute_tables(const LayeredMedium &m, const ParticleSet &ps, const FmmConfig &cfg);

}  // namespace lmfmm
