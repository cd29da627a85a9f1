/// \file multi_index.cpp
/// \brief Storage-order tables for multi-indices and (n, m, s) triples.

#include "lmfmm/taylor.hpp"

namespace lmfmm {

namespace {

constexpr int kMaxListOrder = 40;

std::vector<std::vector<std::array<int, 3>>> build_mi() {
  std::vector<std::vector<std::array<int, 3>>> all(kMaxListOrder + 1);
  for (int p = 0; p <= kMaxListOrder; ++p) {
    auto &v = all[p];
    v.reserve(mi_count(p));
    for (int n = 0; n <= p; ++n)
      for (int k1 = n; k1 >= 0; --k1)
        for (int k2 = n - k1; k2 >= 0; --k2) v.push_back({k1, k2, n - k1 - k2});
  }
  return all;
}

std::vector<std::vector<std::array<int, 3>>> build_sym() {
  std::vector<std::vector<std::array<int, 3>>> all(kMaxListOrder + 1);
  for (int p = 0; p <= kMaxListOrder; ++p) {
    auto &v = all[p];
    v.reserve(sym_count(p));
    for (int n = 0; n <= p; ++n)
      for (int m = 0; m <= n; ++m)
        for (int s = 0; s <= m; ++s) v.push_back({n, m, s});
  }
  return all;
}

}  // namespace

const std::vector<std::array<int, 3>> &mi_list(int p) {
  static const auto all = build_mi();
  if (p < 0 || p > kMaxListOrder) throw DomainError("mi_list: order out of range");
  return all[p];
}

const std::vector<std::array<int, 3>> &sym_list(int p) {
  static const auto all = build_sym();
  if (p < 0 || p > kMaxListOrder) throw DomainError("sym_list: order out of range");
  return all[p];
}

}  // namespace lmfmm
