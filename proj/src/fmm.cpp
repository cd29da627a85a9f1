/// \file fmm.cpp
/// \brief Upward, translation and downward passes; table precompute; component assembly.

#include "lmfmm/fmm.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <set>
#include <sstream>

namespace lmfmm {

std::string variant_name(Variant v) { return v == Variant::TEFMM_I ? "TEFMM-I" : "TEFMM-II"; }

Variant parse_variant(const std::string &s) {
  if (s == "TEFMM-I" || s == "I" || s == "1") return Variant::TEFMM_I;
  if (s == "TEFMM-II" || s == "II" || s == "2") return Variant::TEFMM_II;
  throw DomainError("unknown FMM variant '" + s + "'");
}

void FmmConfig::validate() const {
  if (p < 0 || p > 20) throw DomainError("FmmConfig: p must lie in [0, 20]");
  if (capacity < 1) throw DomainError("FmmConfig: capacity must be >= 1");
  if (depth_cap < 0 || depth_cap > 20) throw DomainError("FmmConfig: depth cap must lie in [0, 20]");
  if (!(mac > 0.0) || mac > 8.0) throw DomainError("FmmConfig: mac must lie in (0, 8]");
  if (!(theta_cross >= 0.0) || theta_cross > 1.0) throw DomainError("FmmConfig: theta_cross must lie in [0, 1]");
  if (!(quad_tol > 0.0) || !(dcim_tol > 0.0) || !(table_tol > 0.0)) throw DomainError("FmmConfig: tolerances must be positive");
  if (table_order < 2 || table_order > 16) throw DomainError("FmmConfig: table order must lie in [2, 16]");
}

std::string FmmConfig::canonical() const {
  std::ostringstream s;
  s.precision(17);
  s << "p=" << p << ";variant=" << variant_name(variant) << ";capacity=" << capacity << ";depth_cap=" << depth_cap << ";mac=" << mac << ";theta_cross=" << theta_cross
    << ";quad_tol=" << quad_tol << ";dcim_tol=" << dcim_tol << ";table_tol=" << table_tol
    << ";table_order=" << table_order;
  return s.str();
}

void validate_particles(const LayeredMedium &m, const ParticleSet &ps) {
  for (const auto &b : ps) {
    if (b.layer < 0 || b.layer >= m.num_layers()) throw DomainError("particles: bad layer index");
    if (b.pos.size() != b.q.size()) throw DomainError("particles: position and strength counts differ");
    for (const auto &p : b.pos) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        throw DomainError("particles: non-finite coordinate");
      if (!m.inside(b.layer, p.z)) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "particles: z = %.12g is not strictly inside layer %d", p.z, b.layer);
        throw DomainError(msg);
      }
    }
  }
}

double TotalResult::seconds(const std::string &label) const {
  for (const auto &[l, t] : timings)
    if (l == label) return t;
  return 0.0;
}

namespace {

double now() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

int octant_of(const Box &b) { return (b.ijk[0] & 1) | ((b.ijk[1] & 1) << 1) | ((b.ijk[2] & 1) << 2); }

RootCube default_root(const ParticleSet &ps) {
  std::vector<const std::vector<Vec3> *> sets;
  for (const auto &b : ps)
    if (!b.pos.empty()) sets.push_back(&b.pos);
  return bounding_cube(sets);
}

// Runs f(i) for i in [0, n) in parallel and rethrows the first exception afterwards.
template <class F>
void parallel_for(int n, F &&f) {
  std::string err;
  bool failed = false;
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n; ++i) {
    if (failed) continue;
    try {
      f(i);
    } catch (const std::exception &e) {
#pragma omp critical(lmfmm_parallel_error)
      {
        if (!failed) err = e.what();
        failed = true;
      }
    }
  }
  if (failed) throw std::runtime_error(err);
}

}  // namespace

LayeredFmm::LayeredFmm(LayeredMedium m, ParticleSet ps, FmmConfig cfg, const RootCube *root)
    : m_(std::move(m)), ps_(std::move(ps)), cfg_(cfg) {
  cfg_.validate();
  if (ps_.empty()) throw DomainError("LayeredFmm: no particle blocks");
  for (const auto &b : ps_)
    if (b.pos.empty()) throw DomainError("LayeredFmm: empty particle block");
  validate_particles(m_, ps_);
  if (cfg_.threads > 0) omp_set_num_threads(cfg_.threads);
  if (cfg_.deterministic) omp_set_num_threads(1);
  root_ = root ? *root : default_root(ps_);
  for (const auto &b : ps_) trees_.push_back(build_tree(b.pos, root_, cfg_.capacity, cfg_.depth_cap));
}

const InteractionLists &LayeredFmm::lists(int tb, int sb) {
  auto key = std::make_pair(tb, sb);
  auto it = lists_.find(key);
  if (it == lists_.end()) it = lists_.emplace(key, build_interaction_lists(trees_[tb], trees_[sb], cfg_.mac, tb == sb ? 0.0 : cfg_.theta_cross)).first;
  return it->second;
}

std::vector<LayeredFmm::Component> LayeredFmm::components() const {
  std::vector<Component> out;
  for (int tb = 0; tb < num_blocks(); ++tb)
    for (int sb = 0; sb < num_blocks(); ++sb)
      for (Direction d : {Direction::Up, Direction::Down})
        if (m_.admissible(ps_[tb].layer, d)) out.push_back({tb, sb, ComponentKey{ps_[tb].layer, ps_[sb].layer, d}});
  return out;
}

std::array<uint8_t, 32> LayeredFmm::config_hash() const {
  std::ostringstream s;
  s.precision(17);
  s << cfg_.canonical() << ";root=" << root_.center.x << "," << root_.center.y << "," << root_.center.z << ","
    << root_.half << ";depths=";
  for (double d : m_.depths()) s << d << ",";
  s << ";k=";
  for (double k : m_.wavenumbers()) s << k << ",";
  for (const auto &b : ps_) {
    s << ";block=" << b.layer << ":" << b.pos.size();
    // Tree geometry depends on positions; hash them too.
    for (const auto &p : b.pos) s << "," << p.x << "," << p.y << "," << p.z;
  }
  return sha256(s.str());
}

const MatrixXcd &LayeredFmm::shift_matrix(bool up, int level, int oct) {
  auto key = std::make_tuple(up, level, oct);
  auto it = shifts_.find(key);
  if (it != shifts_.end()) return it->second;
  const double hc = root_.half / std::pow(2.0, level), hp = 2.0 * hc;
  const Vec3 d{(oct & 1) ? hc : -hc, (oct & 2) ? hc : -hc, (oct & 4) ? hc : -hc};
  const bool sym = cfg_.variant == Variant::TEFMM_II;
  MatrixXcd M = up ? (sym ? m2m_matrix_sym(d, hc, hp, cfg_.p) : m2m_matrix_nonsym(d, hc, hp, cfg_.p))
                   : (sym ? l2l_matrix_sym(d, hp, hc, cfg_.p) : l2l_matrix_nonsym(d, hp, hc, cfg_.p));
  return shifts_.emplace(key, std::move(M)).first->second;
}

const MatrixXcd &LayeredFmm::moments(int b) {
  auto it = moments_.find(b);
  if (it != moments_.end()) return it->second;
  const BoxTree &t = trees_[b];
  const int n = mi_count(cfg_.p);
  const bool sym = cfg_.variant == Variant::TEFMM_II;
  std::vector<cplx> q(t.order.size());
  for (size_t i = 0; i < q.size(); ++i) q[i] = ps_[b].q[t.order[i]];
  MatrixXcd M = MatrixXcd::Zero(n, int(t.boxes.size()));
  std::vector<int> leaves;
  for (int i = 0; i < int(t.boxes.size()); ++i)
    if (t.boxes[i].leaf()) leaves.push_back(i);
  parallel_for(int(leaves.size()), [&](int li) {
    const Box &bx = t.boxes[leaves[li]];
    cplx *c = M.col(leaves[li]).data();
    if (sym)
      accumulate_moments_sym(&t.points[bx.first], &q[bx.first], bx.count, bx.center, bx.half, cfg_.p, c);
    else
      accumulate_moments_nonsym(&t.points[bx.first], &q[bx.first], bx.count, bx.center, bx.half, cfg_.p, c);
  });
  for (int level = t.depth; level >= 1; --level)
    for (int id : t.levels[level]) {
      const Box &bx = t.boxes[id];
      M.col(bx.parent).noalias() += shift_matrix(true, level, octant_of(bx)) * M.col(id);
    }
  return moments_.emplace(b, std::move(M)).first->second;
}

std::vector<cplx> LayeredFmm::run_pass(int tb, int sb, bool layered_key, const MatrixFn &m2l, const Kernel &near) {
  const BoxTree &T = trees_[tb], &S = trees_[sb];
  const InteractionLists &L = lists(tb, sb);
  const int n = mi_count(cfg_.p);
  const bool sym = cfg_.variant == Variant::TEFMM_II;
  std::vector<cplx> out_sorted(T.points.size(), 0.0);

  if (!L.far.empty()) {
    const MatrixXcd &M = moments(sb);
    MatrixXcd Loc = MatrixXcd::Zero(n, int(T.boxes.size()));
    // Group far pairs by translation geometry so each operator is built once.
    std::map<FarKey, std::vector<std::pair<int, int>>> groups;
    for (const auto &[t, s] : L.far) {
      const Box &bt = T.boxes[t], &bs = S.boxes[s];
      const double hmin = std::min(bt.half, bs.half);
      FarKey k{bt.level,
               bs.level,
               int(std::llround((bt.center.x - bs.center.x) / hmin)),
               int(std::llround((bt.center.y - bs.center.y) / hmin)),
               int(std::llround((bt.center.z - bs.center.z) / hmin)),
               layered_key ? bt.ijk[2] : 0,
               layered_key ? bs.ijk[2] : 0};
      groups[k].emplace_back(t, s);
    }
    std::vector<const std::vector<std::pair<int, int>> *> glist;
    for (const auto &g : groups) glist.push_back(&g.second);
    const int chunk = 64;
    std::vector<MatrixXcd> mats(chunk);
    for (int g0 = 0; g0 < int(glist.size()); g0 += chunk) {
      const int g1 = std::min<int>(g0 + chunk, int(glist.size()));
      parallel_for(g1 - g0, [&](int i) {
        const auto &rep = glist[g0 + i]->front();
        mats[i] = m2l(T.boxes[rep.first], S.boxes[rep.second]);
      });
      for (int g = g0; g < g1; ++g) {
        const auto &pairs = *glist[g];
        MatrixXcd X(n, int(pairs.size()));
        for (size_t j = 0; j < pairs.size(); ++j) X.col(j) = M.col(pairs[j].second);
        const MatrixXcd Y = mats[g - g0] * X;
        for (size_t j = 0; j < pairs.size(); ++j) Loc.col(pairs[j].first) += Y.col(j);
      }
    }
    for (int level = 1; level <= T.depth; ++level)
      for (int id : T.levels[level]) {
        const Box &bx = T.boxes[id];
        Loc.col(id).noalias() += shift_matrix(false, level, octant_of(bx)) * Loc.col(bx.parent);
      }
    std::vector<int> leaves;
    for (int i = 0; i < int(T.boxes.size()); ++i)
      if (T.boxes[i].leaf()) leaves.push_back(i);
    parallel_for(int(leaves.size()), [&](int li) {
      const Box &bx = T.boxes[leaves[li]];
      const cplx *c = Loc.col(leaves[li]).data();
      if (sym)
        eval_local_sym(c, cfg_.p, bx.center, bx.half, &T.points[bx.first], bx.count, &out_sorted[bx.first]);
      else
        eval_local_nonsym(c, cfg_.p, bx.center, bx.half, &T.points[bx.first], bx.count, &out_sorted[bx.first]);
    });
  }

  if (!L.near.empty()) {
    std::vector<cplx> qs(S.order.size());
    for (size_t i = 0; i < qs.size(); ++i) qs[i] = ps_[sb].q[S.order[i]];
    std::map<int, std::vector<int>> by_target;
    for (const auto &[t, s] : L.near) by_target[t].push_back(s);
    std::vector<std::pair<int, const std::vector<int> *>> work;
    for (const auto &[t, v] : by_target) work.emplace_back(t, &v);
    parallel_for(int(work.size()), [&](int w) {
      const Box &bt = T.boxes[work[w].first];
      for (int s : *work[w].second) {
        const Box &bs = S.boxes[s];
        near(&T.points[bt.first], bt.count, &S.points[bs.first], &qs[bs.first], bs.count,
             tb == sb && work[w].first == s, &out_sorted[bt.first]);
      }
    });
  }

  std::vector<cplx> out(out_sorted.size());
  for (size_t i = 0; i < out.size(); ++i) out[T.order[i]] = out_sorted[i];
  return out;
}

std::vector<cplx> LayeredFmm::free_space(int b) { return free_space(b, b); }

std::vector<cplx> LayeredFmm::free_space(int tb, int sb) {
  if (ps_[tb].layer != ps_[sb].layer) throw DomainError("free_space: blocks lie in different layers");
  const double k = m_.k(ps_[tb].layer);
  const bool sym = cfg_.variant == Variant::TEFMM_II;
  const int p = cfg_.p;
  MatrixFn m2l = [k, sym, p](const Box &bt, const Box &bs) {
    const Vec3 d = bt.center - bs.center;
    if (sym) {
      const std::vector<cplx> D = sym_derivs(k, d, 2 * p);
      return m2l_matrix_sym(D.data(), p, bs.half, bt.half);
    }
    const std::vector<cplx> a = nonsym_derivs(k, CVec3{d.x, d.y, d.z}, 2 * p);
    return m2l_matrix_nonsym(a.data(), p, bs.half, bt.half);
  };
  Kernel near = [k](const Vec3 *tp, size_t nt, const Vec3 *sp, const cplx *sq, size_t ns, bool same, cplx *out) {
    for (size_t i = 0; i < nt; ++i) {
      cplx acc = 0.0;
      for (size_t j = 0; j < ns; ++j) {
        if (same && i == j) continue;
        const double R = norm(tp[i] - sp[j]);
        const double kr = k * R;
        acc += sq[j] * cplx(std::sin(kr), -std::cos(kr)) / kr;
      }
      out[i] += acc;
    }
  };
  return run_pass(tb, sb, false, m2l, near);
}

double LayeredFmm::anchor(const Component &c) {
  const bool up = c.key.dir == Direction::Up;
  double a = up ? 1e300 : -1e300;
  for (const auto &p : ps_[c.tb].pos) a = up ? std::min(a, p.z) : std::max(a, p.z);
  for (const auto &[t, s] : lists(c.tb, c.sb).far) {
    const double z = trees_[c.tb].boxes[t].center.z;
    a = up ? std::min(a, z) : std::max(a, z);
  }
  return a;
}

size_t LayeredFmm::distinct_source_heights(const Component &c) {
  std::set<double> zs;
  for (const auto &[t, s] : lists(c.tb, c.sb).far) zs.insert(trees_[c.sb].boxes[s].center.z);
  return zs.size();
}

void LayeredFmm::precompute(const Component &c) {
  const InteractionLists &L = lists(c.tb, c.sb);
  const BoxTree &T = trees_[c.tb], &S = trees_[c.sb];
  const ComponentKey key = c.key;

  if (!L.near.empty()) {
    NearRange r{0.0, 1e300, -1e300, 1e300, -1e300};
    auto bbox = [](const BoxTree &tr, int id) {
      const Box &b = tr.boxes[id];
      std::array<double, 6> bb{1e300, -1e300, 1e300, -1e300, 1e300, -1e300};
      for (int i = b.first; i < b.first + b.count; ++i) {
        const Vec3 &p = tr.points[i];
        bb = {std::min(bb[0], p.x), std::max(bb[1], p.x), std::min(bb[2], p.y),
              std::max(bb[3], p.y), std::min(bb[4], p.z), std::max(bb[5], p.z)};
      }
      return bb;
    };
    std::map<int, std::array<double, 6>> tb_box, sb_box;
    for (const auto &[t, s] : L.near) {
      auto it = tb_box.find(t);
      if (it == tb_box.end()) it = tb_box.emplace(t, bbox(T, t)).first;
      auto is = sb_box.find(s);
      if (is == sb_box.end()) is = sb_box.emplace(s, bbox(S, s)).first;
      const auto &a = it->second, &b = is->second;
      const double dx = std::max(a[1] - b[0], b[1] - a[0]), dy = std::max(a[3] - b[2], b[3] - a[2]);
      r.rho_max = std::max(r.rho_max, std::hypot(dx, dy));
      r.zt_min = std::min(r.zt_min, a[4]);
      r.zt_max = std::max(r.zt_max, a[5]);
      r.zs_min = std::min(r.zs_min, b[4]);
      r.zs_max = std::max(r.zs_max, b[5]);
    }
    tables_.near[key] = build_near_table(m_, key, r, cfg_.table_tol, cfg_.quad_tol, cfg_.table_order);
  }
  if (L.far.empty()) return;

  const int p = cfg_.p;
  if (cfg_.variant == Variant::TEFMM_I) {
    const double a = anchor(c);
    std::set<double> zs;
    for (const auto &[t, s] : L.far) zs.insert(S.boxes[s].center.z);
    std::vector<std::pair<double, int>> jobs;
    for (double z : zs)
      for (int o = 0; o <= p; ++o) jobs.emplace_back(z, o);
    std::vector<DcimImageSet> sets(jobs.size());
    parallel_for(int(jobs.size()), [&](int j) {
      try {
        sets[j] = two_level_dcim_auto(m_, key.l, key.lp, jobs[j].second, jobs[j].first, a, cfg_.dcim_tol, key.dir);
      } catch (const std::exception &e) {
        char msg[320];
        std::snprintf(msg, sizeof msg, "image set %s order %d z' %.12g: %s", key.label().c_str(), jobs[j].second,
                      jobs[j].first, e.what());
        throw FitError(msg);
      }
    });
    for (size_t j = 0; j < jobs.size(); ++j)
      tables_.images[ImageKey{key, jobs[j].second, jobs[j].first}] = std::move(sets[j]);
  } else {
    std::map<std::pair<double, double>, std::vector<double>> lines;
    std::map<std::pair<double, double>, double> hmax;
    for (const auto &[t, s] : L.far) {
      const Box &bt = T.boxes[t], &bs = S.boxes[s];
      const std::pair<double, double> zz{bt.center.z, bs.center.z};
      lines[zz].push_back(std::hypot(bt.center.x - bs.center.x, bt.center.y - bs.center.y));
      hmax[zz] = std::max(hmax[zz], std::max(bt.half, bs.half));
    }
    std::vector<std::pair<std::pair<double, double>, std::vector<double>>> jobs(lines.begin(), lines.end());
    std::vector<STable> out(jobs.size());
    parallel_for(int(jobs.size()), [&](int j) {
      try {
        out[j] = build_s_table(m_, key, p, jobs[j].first.first, jobs[j].first.second, jobs[j].second, cfg_.quad_tol,
                               hmax.at(jobs[j].first));
      } catch (const std::exception &e) {
        char msg[320];
        std::snprintf(msg, sizeof msg, "S table %s at (%.12g, %.12g): %s", key.label().c_str(), jobs[j].first.first,
                      jobs[j].first.second, e.what());
        throw TableError(msg);
      }
    });
    for (size_t j = 0; j < jobs.size(); ++j)
      tables_.stables[STableKey{key, jobs[j].first.first, jobs[j].first.second}] = std::move(out[j]);
  }
}

void LayeredFmm::precompute() {
  for (const auto &c : components()) precompute(c);
  tables_.config_hash = config_hash();
}

std::vector<cplx> LayeredFmm::component(const Component &c) {
  if (!m_.admissible(c.key.l, c.key.dir)) return std::vector<cplx>(ps_[c.tb].pos.size(), 0.0);
  const ComponentKey key = c.key;
  const double kl = m_.k(key.l);
  const int p = cfg_.p;
  const TableSet &tab = tables_;
  MatrixFn m2l;
  if (cfg_.variant == Variant::TEFMM_I) {
    m2l = [&tab, key, kl, p](const Box &bt, const Box &bs) {
      std::vector<std::vector<cplx>> T(p + 1);
      for (int o = 0; o <= p; ++o)
        T[o] = eval_image_derivatives(tab.image_set(key, o, bs.center.z), kl, bt.center, bs.center, 2 * p - o);
      return m2l_matrix_layered_nonsym(T, p, bs.half, bt.half);
    };
  } else {
    m2l = [&tab, key, p](const Box &bt, const Box &bs) {
      const STable &st = tab.s_table(key, bt.center.z, bs.center.z);
      const double dx = bt.center.x - bs.center.x, dy = bt.center.y - bs.center.y;
      const double rho = std::hypot(dx, dy);
      const double phi = rho > 0.0 ? std::atan2(dy, dx) : 0.0;
      return m2l_matrix_layered_sym(st.vals[st.find(rho)], p, phi, bs.half, bt.half);
    };
  }
  const NearTable *nt = lists(c.tb, c.sb).near.empty() ? nullptr : &tables_.near_table(key);
  Kernel near = [nt](const Vec3 *tp, size_t n_t, const Vec3 *sp, const cplx *sq, size_t ns, bool, cplx *out) {
    for (size_t i = 0; i < n_t; ++i) {
      cplx acc = 0.0;
      for (size_t j = 0; j < ns; ++j) acc += sq[j] * nt->eval(tp[i], sp[j]);
      out[i] += acc;
    }
  };
  return run_pass(c.tb, c.sb, true, m2l, near);
}

TotalResult LayeredFmm::run_total() {
  TotalResult r;
  r.phi.resize(ps_.size());
  for (size_t b = 0; b < ps_.size(); ++b) r.phi[b].assign(ps_[b].pos.size(), 0.0);
  auto zeros = [&]() {
    std::vector<std::vector<cplx>> z(ps_.size());
    for (size_t b = 0; b < ps_.size(); ++b) z[b].assign(ps_[b].pos.size(), 0.0);
    return z;
  };
  double t0 = now();
  if (tables_.near.empty() && tables_.images.empty() && tables_.stables.empty()) precompute();
  r.timings.emplace_back("precompute", now() - t0);
  t0 = now();
  for (int b = 0; b < num_blocks(); ++b) moments(b);
  r.timings.emplace_back("upward", now() - t0);
  t0 = now();
  auto &fr = r.parts["free"] = zeros();
  for (int tb = 0; tb < num_blocks(); ++tb)
    for (int sb = 0; sb < num_blocks(); ++sb) {
      if (ps_[tb].layer != ps_[sb].layer) continue;
      const std::vector<cplx> v = free_space(tb, sb);
      for (size_t i = 0; i < v.size(); ++i) fr[tb][i] += v[i];
    }
  r.timings.emplace_back("free", now() - t0);
  for (const auto &c : components()) {
    t0 = now();
    const std::vector<cplx> v = component(c);
    auto &part = r.parts[c.key.label()];
    if (part.empty()) part = zeros();
    for (size_t i = 0; i < v.size(); ++i) part[c.tb][i] += v[i];
    r.timings.emplace_back(c.key.label(), now() - t0);
  }
  for (const auto &[label, part] : r.parts)
    for (size_t b = 0; b < ps_.size(); ++b)
      for (size_t i = 0; i < part[b].size(); ++i) r.phi[b][i] += part[b][i];
  return r;
}

std::vector<cplx> run_free_space_fmm(const std::vector<Vec3> &sources, const std::vector<cplx> &q,
                                     const std::vector<Vec3> *targets, double k, const FmmConfig &cfg) {
  LayeredMedium m({}, {k});
  ParticleSet ps{{0, sources, q}};
  if (targets) ps.push_back({0, *targets, std::vector<cplx>(targets->size(), 0.0)});
  LayeredFmm f(m, ps, cfg);
  return targets ? f.free_space(1, 0) : f.free_space(0);
}

std::vector<cplx> run_component_fmm(const LayeredMedium &m, const ComponentKey &key, const std::vector<Vec3> &sources,
                                    const std::vector<cplx> &q, const std::vector<Vec3> &targets,
                                    const FmmConfig &cfg, const TableSet *tables) {
  if (!m.admissible(key.l, key.dir)) return std::vector<cplx>(targets.size(), 0.0);
  ParticleSet ps{{key.l, targets, std::vector<cplx>(targets.size(), 0.0)}, {key.lp, sources, q}};
  LayeredFmm f(m, ps, cfg);
  LayeredFmm::Component c{0, 1, key};
  if (tables)
    f.set_tables(*tables);
  else
    f.precompute(c);
  return f.component(c);
}

TotalResult run_total(const LayeredMedium &m, const ParticleSet &ps, const FmmConfig &cfg) {
  LayeredFmm f(m, ps, cfg);
  return f.run_total();
}

TableSet precompute_tables(const LayeredMedium &m, const ParticleSet &ps, const FmmConfig &cfg) {
  LayeredFmm f(m, ps, cfg);
  f.precompute();
  return f.tables();
}

}  // namespace lmfmm
