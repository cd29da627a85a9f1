/// \file tree.hpp
/// \brief Adaptive octrees embedded in a shared cubic root, and dual-tree interaction lists.
#pragma once

#include <cstdint>

#include "lmfmm/common.hpp"

namespace lmfmm {

/// \brief Axis-aligned cube used as the common root of every tree.
struct RootCube {
  Vec3 center;
  double half = 0.5;
};

/// \brief Smallest cube (slightly padded) containing all given point sets.
RootCube bounding_cube(const std::vector<const std::vector<Vec3> *> &sets);

struct Box {
  Vec3 center;
  double half = 0.0;
  int level = 0;
  int parent = -1;
  int children[8] = {-1, -1, -1, -1, -1, -1, -1, -1};
  int nchild = 0;
  int first = 0;  ///< first particle in tree order
  int count = 0;
  std::array<int, 3> ijk{0, 0, 0};  ///< integer coordinates at this level
  bool leaf() const { return nchild == 0; }
};

/// \brief Adaptive octree over one particle array.
class BoxTree {
 public:
  RootCube root;
  int capacity = 60;
  int depth_cap = 10;
  int depth = 0;            ///< deepest level present
  bool overfull = false;    ///< true if the depth cap left a leaf above capacity
  std::vector<Box> boxes;   ///< boxes[0] is the root
  std::vector<int> order;   ///< order[i] = original index of the i-th particle in tree order
  std::vector<Vec3> points; ///< particles in tree order
  std::vector<std::vector<int>> levels;  ///< box ids per level

  int num_leaves() const;
  /// Index of the box on the path to the root at the given level.
  int ancestor_at(int box, int level) const;
};

/// \brief Build an adaptive tree in the given root cube.
BoxTree build_tree(const std::vector<Vec3> &pts, const RootCube &root, int capacity = 60, int depth_cap = 10);
/// \brief Build an adaptive tree in the bounding cube of the points.
BoxTree build_tree(const std::vector<Vec3> &pts, int capacity = 60, int depth_cap = 10);

/// \brief Far (translation) and near (direct) pairs between a target and a source tree.
struct InteractionLists {
  std::vector<std::pair<int, int>> far;   ///< (target box, source box)
  std::vector<std::pair<int, int>> near;  ///< (target leaf, source leaf)
};

/// \brief Well-separatedness: Chebyshev centre distance >= (w_t + w_s)/2 + mac * max(w_t, w_s).
///
/// mac = 1 is the classical "not adjacent" rule for boxes of one level. When theta > 0 the
/// pair must also satisfy sqrt(3) (h_t + h_s) <= theta |c_t - c_s| (h = half-width).
bool well_separated(const Box &t, const Box &s, double mac = 1.0, double theta = 0.0);

/// \brief Dual-tree traversal. Every (target, source) particle pair lands in exactly one list entry.
InteractionLists build_interaction_lists(const BoxTree &targets, const BoxTree &sources, double mac = 1.0,
                                         double theta = 0.0);

}  // namespace lmfmm
