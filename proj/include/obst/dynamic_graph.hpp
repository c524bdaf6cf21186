#pragma once
#include <algorithm>
#include <cassert>
#include <cstdint>
#include <vector>

#include "obst/dp_tables.hpp"
#include "obst/weight_oracle.hpp"

namespace obst {

// Weighted DAG whose shortest paths from the virtual source (-1,-1) equal the
// DP costs. Vertices are the table cells plus the source; unit edges step
// right or up; jumps splice two already-solved subproblems together. The
// reduced variant drops the vertical jumps, which the duality of shortest
// paths makes redundant.
//
// Jumps are enumerated on the fly per target vertex. Materializing them would
// need O(n^3) storage and their weights depend on shortest-path values that
// only exist during the sweep anyway.
enum class GraphVariant { Full, Reduced };

struct DynamicGraph {
  int n = 0;
  GraphVariant variant = GraphVariant::Full;

  // |V| including the source vertex.
  std::size_t vertex_count() const {
    auto m = static_cast<std::size_t>(n) + 1;
    return m * (m + 1) / 2 + 1;
  }
  std::size_t source_edge_count() const { return static_cast<std::size_t>(n) + 1; }
  std::size_t right_edge_count() const {
    auto m = static_cast<std::size_t>(n);
    return m * (m + 1) / 2;
  }
  std::size_t up_edge_count() const { return right_edge_count(); }

  // Horizontal jumps (i,k) => (i,j) need i < k < j.
  std::size_t horizontal_jump_count() const {
    std::size_t total = 0;
    for (int i = 0; i <= n; ++i)
      for (int j = i + 2; j <= n; ++j)
        total += static_cast<std::size_t>(j - i - 1);
    return total;
  }
  // Vertical jumps (k+1,j) ^=> (i,j) need i < k+1 < j.
  std::size_t vertical_jump_count() const {
    return variant == GraphVariant::Reduced ? 0 : horizontal_jump_count();
  }
  std::size_t jump_count() const { return horizontal_jump_count() + vertical_jump_count(); }
};

inline DynamicGraph build_graph(const FrequencySet& fs, GraphVariant variant) {
  return DynamicGraph{fs.n(), variant};
}

// Shortest-path values from the source, same triangular layout as DpTables.
class SpMatrix {
public:
  explicit SpMatrix(int n) : layout_{n} { sp_.resize(layout_.size(), 0); }

  int n() const { return layout_.n; }
  Cost sp(int i, int j) const { return sp_[layout_.index(i, j)]; }
  void set(int i, int j, Cost v) { sp_[layout_.index(i, j)] = v; }

  friend bool operator==(const SpMatrix& a, const SpMatrix& b) {
    return a.layout_.n == b.layout_.n && a.sp_ == b.sp_;
  }

private:
  TriangularLayout layout_;
  std::vector<Cost> sp_;
};

// Relaxes vertices diagonal after diagonal; every shortest-path value a jump
// weight refers to lies on a strictly smaller diagonal and is already final.
inline SpMatrix shortest_paths(const DynamicGraph& g, const FrequencySet& fs) {
  if (g.n != fs.n())
    throw ContractError("graph and instance sizes differ");
  const WeightOracle wo(fs);
  const int n = g.n;
  SpMatrix sp(n);

  // read guard: only cells from finished diagonals may be consulted
  [[maybe_unused]] int done_diagonal = -1;
  auto sp_at = [&, &done = done_diagonal](int i, int j) {
    assert(j - i <= done && "jump weight read from an unfinished diagonal");
    (void)done;
    return sp.sp(i, j);
  };

  for (int i = 0; i <= n; ++i)
    sp.set(i, i, fs.gap_weight(i)); // source edge weight q_i
  done_diagonal = 0;

  for (int d = 1; d <= n; ++d) {
    for (int i = 0; i + d <= n; ++i) {
      const int j = i + d;
      const Cost w = wo.weight(i, j);
      // unit edges from (i,j-1) and (i+1,j)
      Cost best = sp_at(i, j - 1) + fs.gap_weight(j) + w;
      best = std::min(best, sp_at(i + 1, j) + fs.gap_weight(i) + w);
      // horizontal jumps from (i,k), i < k < j, weight SP[k+1,j] + w(i,j)
      for (int k = i + 1; k < j; ++k)
        best = std::min(best, sp_at(i, k) + sp_at(k + 1, j) + w);
      if (g.variant == GraphVariant::Full) {
        // vertical jumps from (k+1,j), i < k+1 < j, weight SP[i,k] + w(i,j)
        for (int k = i; k + 1 < j; ++k)
          best = std::min(best, sp_at(k + 1, j) + sp_at(i, k) + w);
      }
      sp.set(i, j, best);
    }
    done_diagonal = d;
  }
  return sp;
}

} // namespace obst
