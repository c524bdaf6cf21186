#pragma once
#include <algorithm>
#include <limits>

#include "obst/dp_tables.hpp"
#include "obst/weight_oracle.hpp"

namespace obst {

namespace detail {

// Evaluates one cell (i,j) by scanning split points in [lo, hi]. The strict
// less-than update makes the smallest split index win on ties; both solvers
// share it so their tables agree cell for cell.
inline void evaluate_cell(DpTables& dp, const WeightOracle& wo, int i, int j, int lo, int hi) {
  Cost best = std::numeric_limits<Cost>::max();
  std::int32_t best_k = lo;
  const Cost w = wo.weight(i, j);
  for (int k = lo; k <= hi; ++k) {
    Cost c = dp.tree(i, k) + dp.tree(k + 1, j) + w;
    if (c < best) {
      best = c;
      best_k = static_cast<std::int32_t>(k);
    }
  }
  dp.set(i, j, best, best_k);
}

} // namespace detail

// Cubic-time solver: every split point i <= k < j is tried.
inline DpTables solve_godbole(const FrequencySet& fs) {
  const WeightOracle wo(fs);
  const int n = fs.n();
  DpTables dp(n);
  for (int i = 0; i <= n; ++i)
    dp.set(i, i, fs.gap_weight(i), static_cast<std::int32_t>(i));
  for (int d = 1; d <= n; ++d)
    for (int i = 0; i + d <= n; ++i)
      detail::evaluate_cell(dp, wo, i, i + d, i, i + d - 1);
  return dp;
}

// Quadratic-time solver: the split-point scan is narrowed to
// [cut[i,j-1], cut[i+1,j]], clamped to j-1 so the unit diagonal stays valid.
inline DpTables solve_knuth(const FrequencySet& fs) {
  const WeightOracle wo(fs);
  const int n = fs.n();
  DpTables dp(n);
  for (int i = 0; i <= n; ++i)
    dp.set(i, i, fs.gap_weight(i), static_cast<std::int32_t>(i));
  for (int d = 1; d <= n; ++d)
    for (int i = 0; i + d <= n; ++i) {
      const int j = i + d;
      const int lo = dp.cut(i, j - 1);
      const int hi = std::min<int>(dp.cut(i + 1, j), j - 1);
      detail::evaluate_cell(dp, wo, i, j, lo, hi);
    }
  return dp;
}

} // namespace obst
