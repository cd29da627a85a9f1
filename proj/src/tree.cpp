/// \file tree.cpp
/// \brief Octree construction and dual-tree interaction lists.

#include "lmfmm/tree.hpp"

#include <algorithm>
#include <numeric>

namespace lmfmm {

RootCube bounding_cube(const std::vector<const std::vector<Vec3> *> &sets) {
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  bool any = false;
  for (const auto *s : sets)
    for (const auto &p : *s) {
      any = true;
      for (int i = 0; i < 3; ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
      }
    }
  if (!any) throw DomainError("bounding_cube: no points");
  RootCube r;
  double half = 0.0;
  for (int i = 0; i < 3; ++i) {
    r.center[i] = 0.5 * (lo[i] + hi[i]);
    half = std::max(half, 0.5 * (hi[i] - lo[i]));
  }
  r.half = std::max(half * (1.0 + 1e-10), 1e-12);
  return r;
}

int BoxTree::num_leaves() const {
  int n = 0;
  for (const auto &b : boxes) n += b.leaf();
  return n;
}

int BoxTree::ancestor_at(int box, int level) const {
  while (box >= 0 && boxes[box].level > level) box = boxes[box].parent;
  return box;
}

BoxTree build_tree(const std::vector<Vec3> &pts, const RootCube &root, int capacity, int depth_cap) {
  if (pts.empty()) throw DomainError("build_tree: empty particle array");
  if (capacity < 1 || depth_cap < 0) throw DomainError("build_tree: bad capacity or depth cap");
  BoxTree t;
  t.root = root;
  t.capacity = capacity;
  t.depth_cap = depth_cap;
  for (const auto &p : pts)
    for (int i = 0; i < 3; ++i)
      if (std::abs(p[i] - root.center[i]) > root.half * (1.0 + 1e-9))
        throw DomainError("build_tree: particle outside the root cube");
  t.order.resize(pts.size());
  std::iota(t.order.begin(), t.order.end(), 0);
  Box r;
  r.center = root.center;
  r.half = root.half;
  r.count = int(pts.size());
  t.boxes.push_back(r);
  // Breadth-first splitting keeps boxes of one level contiguous.
  std::vector<int> frontier{0};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int b : frontier) {
      const Box cur = t.boxes[b];
      if (cur.count <= capacity) continue;
      if (cur.level >= depth_cap) {
        t.overfull = true;
        continue;
      }
      auto oct = [&](int idx) {
        const Vec3 &p = pts[idx];
        return (p.x >= cur.center.x ? 1 : 0) | (p.y >= cur.center.y ? 2 : 0) | (p.z >= cur.center.z ? 4 : 0);
      };
      auto beg = t.order.begin() + cur.first;
      auto end = beg + cur.count;
      std::stable_sort(beg, end, [&](int a, int c) { return oct(a) < oct(c); });
      int pos = cur.first;
      for (int o = 0; o < 8; ++o) {
        int cnt = 0;
        while (pos + cnt < cur.first + cur.count && oct(t.order[pos + cnt]) == o) ++cnt;
        if (cnt == 0) continue;
        Box c;
        c.half = 0.5 * cur.half;
        c.level = cur.level + 1;
        c.parent = b;
        c.first = pos;
        c.count = cnt;
        c.center = {cur.center.x + ((o & 1) ? c.half : -c.half), cur.center.y + ((o & 2) ? c.half : -c.half),
                    cur.center.z + ((o & 4) ? c.half : -c.half)};
        c.ijk = {2 * cur.ijk[0] + (o & 1), 2 * cur.ijk[1] + ((o >> 1) & 1), 2 * cur.ijk[2] + ((o >> 2) & 1)};
        const int id = int(t.boxes.size());
        t.boxes.push_back(c);
        t.boxes[b].children[t.boxes[b].nchild++] = id;
        next.push_back(id);
        pos += cnt;
      }
    }
    frontier.swap(next);
  }
  t.points.resize(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) t.points[i] = pts[t.order[i]];
  for (const auto &b : t.boxes) t.depth = std::max(t.depth, b.level);
  t.levels.assign(t.depth + 1, {});
  for (int i = 0; i < int(t.boxes.size()); ++i) t.levels[t.boxes[i].level].push_back(i);
  return t;
}

BoxTree build_tree(const std::vector<Vec3> &pts, int capacity, int depth_cap) {
  return build_tree(pts, bounding_cube({&pts}), capacity, depth_cap);
}

bool well_separated(const Box &t, const Box &s, double mac, double theta) {
  const double wt = 2.0 * t.half, ws = 2.0 * s.half;
  double dist = 0.0;
  for (int i = 0; i < 3; ++i) dist = std::max(dist, std::abs(t.center[i] - s.center[i]));
  if (dist < 0.5 * (wt + ws) + mac * std::max(wt, ws) - 1e-12 * std::max(wt, ws)) return false;
  return theta <= 0.0 || std::sqrt(3.0) * (t.half + s.half) <= theta * norm(t.center - s.center);
}

namespace {

void traverse(const BoxTree &T, const BoxTree &S, int t, int s, double mac, double theta, InteractionLists &out) {
  const Box &bt = T.boxes[t], &bs = S.boxes[s];
  if (well_separated(bt, bs, mac, theta)) {
    out.far.emplace_back(t, s);
    return;
  }
  if (bt.leaf() && bs.leaf()) {
    out.near.emplace_back(t, s);
    return;
  }
  const bool split_t = !bt.leaf() && (bs.leaf() || bt.half >= bs.half);
  const bool split_s = !bs.leaf() && (bt.leaf() || bs.half >= bt.half);
  if (split_t && split_s) {
    for (int i = 0; i < bt.nchild; ++i)
      for (int j = 0; j < bs.nchild; ++j) traverse(T, S, bt.children[i], bs.children[j], mac, theta, out);
  } else if (split_t) {
    for (int i = 0; i < bt.nchild; ++i) traverse(T, S, bt.children[i], s, mac, theta, out);
  } else {
    for (int j = 0; j < bs.nchild; ++j) traverse(T, S, t, bs.children[j], mac, theta, out);
  }
}

}  // namespace

InteractionLists build_interaction_lists(const BoxTree &targets, const BoxTree &sources, double mac, double theta) {
  if (!(mac > 0.0)) throw DomainError("build_interaction_lists: mac must be positive");
  if (std::abs(targets.root.half - sources.root.half) > 1e-12 * targets.root.half ||
      norm(targets.root.center - sources.root.center) > 1e-12 * targets.root.half)
    throw DomainError("build_interaction_lists: trees must share one root cube");
  InteractionLists out;
  traverse(targets, sources, 0, 0, mac, theta, out);
  return out;
}

}  // namespace lmfmm
