#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "obst/errors.hpp"

namespace obst {

// ---------------------------------------------------------------------------
// Grid arithmetic
// ---------------------------------------------------------------------------

// f(p) = ceil(sqrt(2p)), the order of the block grid.
inline int grid_order(int p) {
  if (p < 1)
    throw ContractError("grid_order requires p >= 1");
  const auto m = static_cast<std::uint64_t>(p) * 2;
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m)));
  while (r > 0 && r * r > m)
    --r;
  while ((r + 1) * (r + 1) <= m)
    ++r;
  return static_cast<int>(r * r == m ? r : r + 1);
}

// theta(n,p,l) = ceil(ceil((n+1)/f(p)) / 2^l), the block side at level l.
inline int theta_side(int n, int p, int level) {
  if (n < 1 || level < 0)
    throw ContractError("theta_side requires n >= 1 and level >= 0");
  const auto f = static_cast<std::uint64_t>(grid_order(p));
  std::uint64_t t = (static_cast<std::uint64_t>(n) + 1 + f - 1) / f;
  for (int l = 0; l < level && t > 1; ++l)
    t = (t + 1) / 2;
  return static_cast<int>(t);
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

enum class BlockShape { Triangular, Full, Clipped };

inline const char* to_string(BlockShape s) {
  switch (s) {
  case BlockShape::Triangular: return "triangular";
  case BlockShape::Full: return "full";
  case BlockShape::Clipped: return "clipped";
  }
  return "?";
}

// One submatrix of the upper triangle. Bounds are inclusive cell indices and
// already clipped to the real matrix; grid_row/grid_col locate the block in
// the level-`level` quadrant grid (each fragmentation doubles both).
struct BlockGeom {
  int row0 = 0, row1 = -1;
  int col0 = 0, col1 = -1;
  int level = 0;
  int diagonal = 0; // 1-based round index
  BlockShape shape = BlockShape::Full;
  int grid_row = 0, grid_col = 0;
  int id = -1; // dense index in plan order

  bool empty() const { return row0 > row1 || col0 > col1; }
  int height() const { return row1 - row0 + 1; }
  int width() const { return col1 - col0 + 1; }
  bool triangular() const { return shape == BlockShape::Triangular; }

  // number of cells of the block that lie in the upper triangle (i <= j)
  std::uint64_t cell_count() const {
    std::uint64_t cells = 0;
    for (int i = row0; i <= row1; ++i) {
      const int lo = std::max(i, col0);
      if (lo <= col1)
        cells += static_cast<std::uint64_t>(col1 - lo + 1);
    }
    return cells;
  }
};

enum class SubblockId { LL, LU, RL, RU };

inline const char* to_string(SubblockId s) {
  switch (s) {
  case SubblockId::LL: return "LL";
  case SubblockId::LU: return "LU";
  case SubblockId::RL: return "RL";
  case SubblockId::RU: return "RU";
  }
  return "?";
}

struct Extremities {
  std::pair<int, int> lue, rue, lle, rle;
};

// Corner cells of the clipped bounds.
inline Extremities extremities(const BlockGeom& b) {
  return Extremities{{b.row0, b.col0}, {b.row0, b.col1}, {b.row1, b.col0}, {b.row1, b.col1}};
}

// ---------------------------------------------------------------------------
// Partition plan
// ---------------------------------------------------------------------------

enum class PartitionScheme { Regular, Irregular };

struct PartitionPlan {
  int n = 0, p = 0, k = 0, f = 0;
  std::vector<int> theta;                        // theta[l] for l = 0..k
  std::vector<std::vector<BlockGeom>> diagonals; // rounds; clipped rounds may be empty
  std::vector<BlockGeom> blocks;                 // flattened in (diagonal, row0) order

  int block_count() const { return static_cast<int>(blocks.size()); }
  int diagonal_count() const { return static_cast<int>(diagonals.size()); }
};

namespace detail {

// Quadrant pieces of a block, split at side theta(level+1). Upper/left bands
// take the first `side` cells, lower/right bands the clipped remainder; empty
// pieces are kept so their round slot survives boundary clipping.
struct QuadrantSplit {
  std::vector<std::pair<SubblockId, BlockGeom>> parts;
};

inline BlockGeom make_child(const BlockGeom& b, int side, bool lower, bool right) {
  BlockGeom c;
  c.level = b.level + 1;
  c.grid_row = b.grid_row * 2 + (lower ? 1 : 0);
  c.grid_col = b.grid_col * 2 + (right ? 1 : 0);
  c.row0 = lower ? b.row0 + side : b.row0;
  c.row1 = lower ? b.row1 : std::min(b.row0 + side - 1, b.row1);
  c.col0 = right ? b.col0 + side : b.col0;
  c.col1 = right ? b.col1 : std::min(b.col0 + side - 1, b.col1);
  if (c.empty()) {
    c.shape = BlockShape::Clipped;
    return c;
  }
  if (c.grid_row == c.grid_col)
    c.shape = BlockShape::Triangular;
  else
    c.shape = (c.height() == side && c.width() == side) ? BlockShape::Full : BlockShape::Clipped;
  return c;
}

inline QuadrantSplit split_quadrants(const BlockGeom& b, int child_side) {
  QuadrantSplit out;
  if (b.triangular()) {
    // the LL quadrant would lie below the main diagonal
    out.parts.emplace_back(SubblockId::LU, make_child(b, child_side, false, false));
    out.parts.emplace_back(SubblockId::RL, make_child(b, child_side, true, true));
    out.parts.emplace_back(SubblockId::RU, make_child(b, child_side, false, true));
  } else {
    out.parts.emplace_back(SubblockId::LL, make_child(b, child_side, true, false));
    out.parts.emplace_back(SubblockId::LU, make_child(b, child_side, false, false));
    out.parts.emplace_back(SubblockId::RL, make_child(b, child_side, true, true));
    out.parts.emplace_back(SubblockId::RU, make_child(b, child_side, false, true));
  }
  return out;
}

} // namespace detail

// Splits a block into its quadrant blocks at the next level. Empty quadrants
// (possible on clipped boundary blocks) are dropped; triangular blocks yield
// three pieces since their LL quadrant does not exist.
inline std::vector<std::pair<SubblockId, BlockGeom>> split_four(const PartitionPlan& plan,
                                                                const BlockGeom& b) {
  if (b.level >= plan.k)
    throw ContractError("split_four: blocks of the last fragmentation level are not split");
  auto parts = detail::split_quadrants(b, plan.theta[static_cast<std::size_t>(b.level) + 1]).parts;
  std::vector<std::pair<SubblockId, BlockGeom>> out;
  for (auto& [sub, geom] : parts)
    if (!geom.empty()) {
      geom.diagonal = b.diagonal;
      out.emplace_back(sub, geom);
    }
  return out;
}

// Builds the partition: start from the regular f(p)-order grid, then k times
// fragment the maximal suffix of rounds whose block counts have dropped to
// ceil(f/2) or below, regrouping the quadrants into rounds by their
// anti-diagonal index in the finer grid.
inline PartitionPlan build_plan(int n, int p, int k,
                                PartitionScheme scheme = PartitionScheme::Irregular) {
  if (n < 1)
    throw PlanError("plan requires n >= 1");
  if (p < 1)
    throw PlanError("plan requires p >= 1");
  if (k < 0)
    throw PlanError("plan requires k >= 0");
  if (scheme == PartitionScheme::Regular)
    k = 0;

  PartitionPlan plan;
  plan.n = n;
  plan.p = p;
  plan.k = k;
  plan.f = grid_order(p);
  if (n + 1 < plan.f)
    throw PlanError("plan infeasible: need n+1 >= f(p) = " + std::to_string(plan.f));
  for (int l = 0; l <= k; ++l)
    plan.theta.push_back(theta_side(n, p, l));
  if (plan.theta[static_cast<std::size_t>(k)] < 1)
    throw PlanError("plan infeasible: theta(n,p,k) < 1");

  struct Round {
    int level;
    long ad;
    std::vector<BlockGeom> blocks;
  };

  const int f = plan.f;
  const int theta0 = plan.theta[0];
  std::vector<Round> rounds;
  for (int d = 1; d <= f; ++d) {
    Round r{0, d - 1, {}};
    for (int gr = 0; gr + d - 1 < f; ++gr) {
      const int gc = gr + d - 1;
      BlockGeom b;
      b.level = 0;
      b.grid_row = gr;
      b.grid_col = gc;
      b.row0 = gr * theta0;
      b.row1 = std::min((gr + 1) * theta0 - 1, n);
      b.col0 = gc * theta0;
      b.col1 = std::min((gc + 1) * theta0 - 1, n);
      if (b.empty())
        continue;
      if (gr == gc)
        b.shape = BlockShape::Triangular;
      else
        b.shape = (b.height() == theta0 && b.width() == theta0) ? BlockShape::Full
                                                                : BlockShape::Clipped;
      r.blocks.push_back(b);
    }
    rounds.push_back(std::move(r));
  }

  const auto threshold = static_cast<std::size_t>((f + 1) / 2); // ceil(f/2)
  for (int pass = 1; pass <= k; ++pass) {
    std::size_t first = rounds.size();
    while (first > 0 && rounds[first - 1].blocks.size() <= threshold)
      --first;
    // quadrants of the suffix, grouped by (level, anti-diagonal); empty
    // quadrants still claim their round slot
    std::map<std::pair<int, long>, Round> grouped;
    for (std::size_t r = first; r < rounds.size(); ++r)
      for (const BlockGeom& b : rounds[r].blocks) {
        const int side = theta_side(n, p, b.level + 1);
        for (auto& [sub, child] : detail::split_quadrants(b, side).parts) {
          (void)sub;
          const std::pair<int, long> key{b.level + 1,
                                         static_cast<long>(child.grid_col) - child.grid_row};
          auto& slot = grouped.emplace(key, Round{key.first, key.second, {}}).first->second;
          if (!child.empty())
            slot.blocks.push_back(child);
        }
      }
    rounds.resize(first);
    // merge by (level, ad); keys normally extend past the surviving prefix,
    // except in heavily clipped geometries where counts dip early
    std::vector<Round> merged;
    std::size_t at = 0;
    for (auto& [key, round] : grouped) {
      while (at < rounds.size() && std::pair<int, long>{rounds[at].level, rounds[at].ad} < key)
        merged.push_back(std::move(rounds[at++]));
      if (at < rounds.size() && std::pair<int, long>{rounds[at].level, rounds[at].ad} == key) {
        auto& into = rounds[at++];
        for (auto& b : round.blocks)
          into.blocks.push_back(std::move(b));
        merged.push_back(std::move(into));
      } else {
        merged.push_back(std::move(round));
      }
    }
    while (at < rounds.size())
      merged.push_back(std::move(rounds[at++]));
    rounds = std::move(merged);
  }

  int next_id = 0;
  for (std::size_t r = 0; r < rounds.size(); ++r) {
    auto& blocks = rounds[r].blocks;
    std::sort(blocks.begin(), blocks.end(),
              [](const BlockGeom& a, const BlockGeom& b) { return a.row0 < b.row0; });
    plan.diagonals.emplace_back();
    for (BlockGeom& b : blocks) {
      b.diagonal = static_cast<int>(r) + 1;
      b.id = next_id++;
      plan.diagonals.back().push_back(b);
      plan.blocks.push_back(b);
    }
  }
  return plan;
}

// Subblock units: what a worker actually evaluates and communicates. Blocks
// of the last level count once; triangular blocks three times; every other
// block once per nonempty quadrant.
inline int subblock_units(const PartitionPlan& plan) {
  int units = 0;
  for (const BlockGeom& b : plan.blocks) {
    if (b.level >= plan.k)
      units += 1;
    else
      units += static_cast<int>(split_four(plan, b).size());
  }
  return units;
}

// ---------------------------------------------------------------------------
// Dependencies
// ---------------------------------------------------------------------------

// Conservative provider set: blocks on earlier rounds that overlap b's row
// band to the left or its column band below. The exact set shrinks with the
// data-dependent split bounds, so it cannot be pruned statically.
inline std::vector<BlockGeom> dependency_blocks(const PartitionPlan& plan, const BlockGeom& b) {
  if (b.id < 0 || b.id >= plan.block_count())
    throw ContractError("dependency_blocks: block not found in plan");
  const BlockGeom& mine = plan.blocks[static_cast<std::size_t>(b.id)];
  if (mine.row0 != b.row0 || mine.col0 != b.col0 || mine.diagonal != b.diagonal)
    throw ContractError("dependency_blocks: block not found in plan");
  std::vector<BlockGeom> deps;
  for (const BlockGeom& other : plan.blocks) {
    if (other.diagonal >= b.diagonal)
      continue;
    const bool rows_meet = other.row0 <= b.row1 && b.row0 <= other.row1;
    const bool cols_meet = other.col0 <= b.col1 && b.col0 <= other.col1;
    if ((rows_meet && other.col1 < b.col0) || (cols_meet && other.row0 > b.row1))
      deps.push_back(other);
  }
  return deps;
}

// ---------------------------------------------------------------------------
// Mapping
// ---------------------------------------------------------------------------

struct Mapping {
  int p = 0;
  std::vector<int> owner; // by block id

  int owner_of(const BlockGeom& b) const { return owner[static_cast<std::size_t>(b.id)]; }
};

// Snake order: enumerate blocks round by round, top block first; every full
// band of p blocks alternates direction, which caps the per-processor block
// count skew at one.
inline Mapping snake_map(const PartitionPlan& plan, int p) {
  if (p < 1)
    throw ContractError("snake_map requires p >= 1");
  Mapping map;
  map.p = p;
  map.owner.resize(static_cast<std::size_t>(plan.block_count()));
  for (std::size_t e = 0; e < map.owner.size(); ++e) {
    const auto band = e / static_cast<std::size_t>(p);
    const auto pos = static_cast<int>(e % static_cast<std::size_t>(p));
    map.owner[e] = (band % 2 == 0) ? pos : p - 1 - pos;
  }
  return map;
}

// ---------------------------------------------------------------------------
// Round-count formulas
// ---------------------------------------------------------------------------

struct RoundFormulas {
  std::uint64_t total_rounds = 0;
  // closed-form communication-round count; defined for k >= 1
  std::optional<std::uint64_t> comm_round_estimate;
};

inline RoundFormulas round_formulas(int p, int k) {
  if (p < 1 || k < 0)
    throw ContractError("round_formulas requires p >= 1 and k >= 0");
  const auto f = static_cast<std::uint64_t>(grid_order(p));
  RoundFormulas out;
  out.total_rounds = f + static_cast<std::uint64_t>(k) * (f / 2 + 1 + f % 2);
  if (k >= 1) {
    const std::uint64_t s = f;
    const std::uint64_t beta = s % 2;
    const std::uint64_t half_down = s / 2;
    const std::uint64_t half_up = (s + 1) / 2;
    out.comm_round_estimate =
        3 + 4 * (half_down - 1) + 4 * static_cast<std::uint64_t>(k - 1) * (half_up + 1) + s + beta;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Plan dump (CLI `plan` format)
// ---------------------------------------------------------------------------

inline std::string dump_plan(const PartitionPlan& plan, const Mapping& map) {
  std::ostringstream out;
  for (const BlockGeom& b : plan.blocks)
    out << b.diagonal << ' ' << b.level << ' ' << b.row0 << ' ' << b.col0 << ' ' << b.row1 << ' '
        << b.col1 << ' ' << to_string(b.shape) << ' ' << map.owner_of(b) << '\n';
  return out.str();
}

} // namespace obst
