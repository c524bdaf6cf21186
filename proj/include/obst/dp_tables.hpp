#pragma once
#include <cstdint>
#include <vector>

#include "obst/errors.hpp"
#include "obst/frequency_set.hpp"

namespace obst {

// Layout shared by the cost/root tables and the shortest-path matrix:
// the upper triangle 0 <= i <= j <= n stored contiguously diagonal by
// diagonal (d = j-i), so a block of one diagonal is a contiguous range.
struct TriangularLayout {
  int n = 0;

  std::size_t size() const {
    auto m = static_cast<std::size_t>(n) + 1;
    return m * (m + 1) / 2;
  }
  std::size_t index(int i, int j) const {
    auto d = static_cast<std::size_t>(j - i);
    auto m = static_cast<std::size_t>(n) + 1;
    // cells on diagonals 0..d-1, then position i on diagonal d
    return d * m - d * (d - 1) / 2 + static_cast<std::size_t>(i);
  }
};

// The two DP tables: tree[i,j] holds the optimal search cost of the subtree
// over keys i+1..j, cut[i,j] the split index that attains it.
class DpTables {
public:
  explicit DpTables(int n) : layout_{n} {
    tree_.resize(layout_.size(), 0);
    cut_.resize(layout_.size(), 0);
  }

  int n() const { return layout_.n; }

  Cost tree(int i, int j) const { return tree_[layout_.index(i, j)]; }
  std::int32_t cut(int i, int j) const { return cut_[layout_.index(i, j)]; }

  void set(int i, int j, Cost tree_value, std::int32_t cut_value) {
    auto at = layout_.index(i, j);
    tree_[at] = tree_value;
    cut_[at] = cut_value;
  }

  // Knuth's monotonicity: cut[i,j-1] <= cut[i,j] <= cut[i+1,j].
  bool cut_monotone() const {
    for (int i = 0; i < layout_.n; ++i)
      for (int j = i + 1; j <= layout_.n; ++j) {
        if (cut(i, j - 1) > cut(i, j))
          return false;
        if (cut(i, j) > cut(i + 1, j))
          return false;
      }
    return true;
  }

  friend bool operator==(const DpTables& a, const DpTables& b) {
    return a.layout_.n == b.layout_.n && a.tree_ == b.tree_ && a.cut_ == b.cut_;
  }

private:
  TriangularLayout layout_;
  std::vector<Cost> tree_;
  std::vector<std::int32_t> cut_;
};

} // namespace obst
