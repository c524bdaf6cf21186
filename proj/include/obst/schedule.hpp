#pragma once
#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "obst/partition.hpp"

namespace obst {

enum class Mode { Regular, Frag, FourSplit };

inline const char* to_string(Mode m) {
  switch (m) {
  case Mode::Regular: return "regular";
  case Mode::Frag: return "frag";
  case Mode::FourSplit: return "4s";
  }
  return "?";
}

// How the sends after the RU compute are batched: one combined sub-step
// carrying LU, RL and RU, or two sub-steps sending (RL, RU) to the
// column-band dependents and then (LU, RU) to the row-band dependents.
enum class Grouping { Combined, SplitLast };

// Per-diagonal phases of a worker. Receives are split so a subblock compute
// waits only for the band providers it actually reads: LL needs its lower-row
// and left-column providers, LU additionally the upper-row ones, RL the
// right-column ones; RU reads nothing new. Whole-block evaluation (regular
// and frag modes, last-level blocks) uses RecvLL + ComputeLL + Send1 only.
enum class RecvPhase : int { BeforeLL = 0, BeforeLU = 1, BeforeRL = 2 };
enum class ComputeSlot : int { LL = 0, LU = 1, RL = 2, RU = 3 };
inline constexpr int kSendSlots = 4; // combined grouping uses slots 1..3, split-last also 4

// A cell range of one block that is computed and communicated as a unit:
// either a quadrant subblock or a whole block.
struct Piece {
  int block_id = -1;
  int sub = -1; // SubblockId, or -1 for a whole block
  BlockGeom rect;
  bool upper_rows = false, lower_rows = false;
  bool left_cols = false, right_cols = false;
  ComputeSlot compute = ComputeSlot::LL;
};

// All information one worker sends another in one sub-step, wrapped into a
// single message. Rects point into the sender's table; receivers copy the
// cells out on delivery.
struct Bundle {
  int src = -1, dst = -1;
  int diag = 0, slot = 0; // send slot
  int deliver_diag = 0;
  RecvPhase deliver_phase = RecvPhase::BeforeLL;
  std::vector<BlockGeom> rects;
  std::uint64_t cells = 0;
};

struct WorkerDiagPlan {
  std::vector<int> compute[4];    // piece ids per ComputeSlot
  std::vector<int> send[kSendSlots]; // bundle ids per slot-1
  int expected[3] = {0, 0, 0};    // bundle count per RecvPhase
};

// The full static schedule of a run. Both schedulers execute it verbatim, so
// message content never depends on timing.
struct CommSchedule {
  Mode mode = Mode::Regular;
  Grouping grouping = Grouping::Combined;
  int p = 0;
  int diag_count = 0;

  std::vector<Piece> pieces;
  std::vector<Bundle> bundles;
  std::vector<std::vector<WorkerDiagPlan>> worker; // [w][d-1]

  // static accounting
  std::uint64_t total_cells = 0;
  int global_substeps = 0;              // (diag, slot) pairs with any bundle
  std::vector<int> worker_substeps;     // per-worker (diag, slot) participation
  std::vector<int> blocks_per_worker;
};

namespace detail {

inline bool rows_overlap(const BlockGeom& a, const BlockGeom& b) {
  return a.row0 <= b.row1 && b.row0 <= a.row1;
}
inline bool cols_overlap(const BlockGeom& a, const BlockGeom& b) {
  return a.col0 <= b.col1 && b.col0 <= a.col1;
}

inline std::vector<Piece> make_pieces(const PartitionPlan& plan, Mode mode, const BlockGeom& b) {
  std::vector<Piece> out;
  auto whole = [&] {
    Piece piece;
    piece.block_id = b.id;
    piece.rect = b;
    piece.upper_rows = piece.lower_rows = piece.left_cols = piece.right_cols = true;
    piece.compute = ComputeSlot::LL;
    out.push_back(piece);
  };
  if (mode != Mode::FourSplit || b.level >= plan.k) {
    whole();
    return out;
  }
  for (auto& [sub, geom] : split_four(plan, b)) {
    Piece piece;
    piece.block_id = b.id;
    piece.sub = static_cast<int>(sub);
    piece.rect = geom;
    switch (sub) {
    case SubblockId::LL:
      piece.lower_rows = piece.left_cols = true;
      piece.compute = ComputeSlot::LL;
      break;
    case SubblockId::LU:
      piece.upper_rows = piece.left_cols = true;
      // a triangle's two triangular quadrants have no external inputs and
      // are both evaluated before its RU square
      piece.compute = b.triangular() ? ComputeSlot::LL : ComputeSlot::LU;
      break;
    case SubblockId::RL:
      piece.lower_rows = piece.right_cols = true;
      piece.compute = b.triangular() ? ComputeSlot::LL : ComputeSlot::RL;
      break;
    case SubblockId::RU:
      piece.upper_rows = piece.right_cols = true;
      piece.compute = ComputeSlot::RU;
      break;
    }
    out.push_back(piece);
  }
  return out;
}

// Send slot of a piece, 1-based. Row-band sends serve dependents to the
// right, column-band sends dependents above.
inline int row_send_slot(Mode mode, Grouping grouping, const Piece& piece) {
  if (mode != Mode::FourSplit || piece.sub < 0)
    return 1;
  if (piece.lower_rows)
    return 2;
  return grouping == Grouping::Combined ? 3 : 4;
}
inline int col_send_slot(Mode mode, [[maybe_unused]] Grouping grouping, const Piece& piece) {
  if (mode != Mode::FourSplit || piece.sub < 0)
    return 1;
  return piece.left_cols ? 1 : 3;
}

// Receive phase at which a dependent block first reads cells of a provider
// piece. Splitting bands of the receiver mirror make_pieces.
inline RecvPhase row_recv_phase(const PartitionPlan& plan, Mode mode, const BlockGeom& receiver,
                                const BlockGeom& provider_rect) {
  if (mode != Mode::FourSplit || receiver.level >= plan.k)
    return RecvPhase::BeforeLL;
  const int side = plan.theta[static_cast<std::size_t>(receiver.level) + 1];
  const int lower0 = receiver.row0 + side;
  const bool meets_lower = lower0 <= receiver.row1 && provider_rect.row1 >= lower0;
  return meets_lower ? RecvPhase::BeforeLL : RecvPhase::BeforeLU;
}
inline RecvPhase col_recv_phase(const PartitionPlan& plan, Mode mode, const BlockGeom& receiver,
                                const BlockGeom& provider_rect) {
  if (mode != Mode::FourSplit || receiver.level >= plan.k)
    return RecvPhase::BeforeLL;
  const int side = plan.theta[static_cast<std::size_t>(receiver.level) + 1];
  const bool meets_left = provider_rect.col0 <= std::min(receiver.col0 + side - 1, receiver.col1);
  return meets_left ? RecvPhase::BeforeLL : RecvPhase::BeforeRL;
}

} // namespace detail

inline CommSchedule build_schedule(const PartitionPlan& plan, const Mapping& map, Mode mode,
                                   Grouping grouping = Grouping::Combined) {
  CommSchedule sched;
  sched.mode = mode;
  sched.grouping = grouping;
  sched.p = map.p;
  sched.diag_count = plan.diagonal_count();
  sched.worker.assign(static_cast<std::size_t>(map.p),
                      std::vector<WorkerDiagPlan>(static_cast<std::size_t>(sched.diag_count)));
  sched.blocks_per_worker.assign(static_cast<std::size_t>(map.p), 0);
  for (const BlockGeom& b : plan.blocks)
    ++sched.blocks_per_worker[static_cast<std::size_t>(map.owner_of(b))];

  // key: (diag, slot, src, dst) -> bundle id
  std::map<std::tuple<int, int, int, int>, std::size_t> bundle_at;
  // earliest delivery tag per bundle, tracked as (diag, phase)
  auto tag_less = [](std::pair<int, RecvPhase> a, std::pair<int, RecvPhase> b) {
    return a.first != b.first ? a.first < b.first
                              : static_cast<int>(a.second) < static_cast<int>(b.second);
  };

  for (const BlockGeom& b : plan.blocks) {
    const int src = map.owner_of(b);
    auto pieces = detail::make_pieces(plan, mode, b);
    for (auto& piece : pieces) {
      const int piece_id = static_cast<int>(sched.pieces.size());
      sched.pieces.push_back(piece);
      sched.worker[static_cast<std::size_t>(src)][static_cast<std::size_t>(b.diagonal - 1)]
          .compute[static_cast<int>(piece.compute)]
          .push_back(piece_id);

      // destinations of this piece, with the earliest phase that reads it
      std::map<std::pair<int, int>, std::pair<int, RecvPhase>> dests; // (slot,dst) -> tag
      for (const BlockGeom& other : plan.blocks) {
        if (other.diagonal <= b.diagonal)
          continue;
        const int dst = map.owner_of(other);
        if (dst == src)
          continue; // local cells stay in the owner's table
        if (detail::rows_overlap(piece.rect, other) && piece.rect.col1 < other.col0) {
          const int slot = detail::row_send_slot(mode, grouping, piece);
          const auto tag = std::pair<int, RecvPhase>{
              other.diagonal, detail::row_recv_phase(plan, mode, other, piece.rect)};
          auto [it, fresh] = dests.emplace(std::pair<int, int>{slot, dst}, tag);
          if (!fresh && tag_less(tag, it->second))
            it->second = tag;
        }
        if (detail::cols_overlap(piece.rect, other) && piece.rect.row0 > other.row1) {
          const int slot = detail::col_send_slot(mode, grouping, piece);
          const auto tag = std::pair<int, RecvPhase>{
              other.diagonal, detail::col_recv_phase(plan, mode, other, piece.rect)};
          auto [it, fresh] = dests.emplace(std::pair<int, int>{slot, dst}, tag);
          if (!fresh && tag_less(tag, it->second))
            it->second = tag;
        }
      }

      for (auto& [slot_dst, tag] : dests) {
        const auto [slot, dst] = slot_dst;
        const std::tuple<int, int, int, int> key{b.diagonal, slot, src, dst};
        auto it = bundle_at.find(key);
        if (it == bundle_at.end()) {
          it = bundle_at.emplace(key, sched.bundles.size()).first;
          Bundle bundle;
          bundle.src = src;
          bundle.dst = dst;
          bundle.diag = b.diagonal;
          bundle.slot = slot;
          bundle.deliver_diag = tag.first;
          bundle.deliver_phase = tag.second;
          sched.bundles.push_back(bundle);
        }
        Bundle& bundle = sched.bundles[it->second];
        bundle.rects.push_back(piece.rect);
        bundle.cells += piece.rect.cell_count();
        if (tag_less(tag, {bundle.deliver_diag, bundle.deliver_phase})) {
          bundle.deliver_diag = tag.first;
          bundle.deliver_phase = tag.second;
        }
      }
    }
  }

  std::set<std::pair<int, int>> global_slots;
  std::vector<std::set<std::pair<int, int>>> worker_slots(static_cast<std::size_t>(map.p));
  for (std::size_t id = 0; id < sched.bundles.size(); ++id) {
    const Bundle& bundle = sched.bundles[id];
    if (bundle.deliver_diag <= bundle.diag)
      throw PlanError("schedule: provider and dependent share a round");
    sched.worker[static_cast<std::size_t>(bundle.src)][static_cast<std::size_t>(bundle.diag - 1)]
        .send[bundle.slot - 1]
        .push_back(static_cast<int>(id));
    sched.worker[static_cast<std::size_t>(bundle.dst)]
                [static_cast<std::size_t>(bundle.deliver_diag - 1)]
                    .expected[static_cast<int>(bundle.deliver_phase)] += 1;
    sched.total_cells += bundle.cells;
    global_slots.insert({bundle.diag, bundle.slot});
    worker_slots[static_cast<std::size_t>(bundle.src)].insert({bundle.diag, bundle.slot});
    worker_slots[static_cast<std::size_t>(bundle.dst)].insert({bundle.diag, bundle.slot});
  }
  sched.global_substeps = static_cast<int>(global_slots.size());
  sched.worker_substeps.resize(static_cast<std::size_t>(map.p));
  for (int w = 0; w < map.p; ++w)
    sched.worker_substeps[static_cast<std::size_t>(w)] =
        static_cast<int>(worker_slots[static_cast<std::size_t>(w)].size());
  return sched;
}

} // namespace obst
