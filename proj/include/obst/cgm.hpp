#pragma once
#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "obst/dp_tables.hpp"
#include "obst/metrics.hpp"
#include "obst/schedule.hpp"
#include "obst/sequential.hpp"
#include "obst/weight_oracle.hpp"

namespace obst {

enum class Scheduler { Simulated, Threaded };

inline const char* to_string(Scheduler s) {
  return s == Scheduler::Simulated ? "sim" : "threaded";
}

// Cost model of the simulated scheduler, in abstract cost units.
struct CostModel {
  std::uint64_t cost_per_iteration = 1; // per split-point probe
  std::uint64_t cost_per_cell = 0;      // per evaluated cell
  std::uint64_t latency_per_message = 0;
  std::uint64_t cost_per_transferred_cell = 0;
};

namespace detail {

// Distributed-memory discipline: a worker can only read cells it computed or
// received. Reading anything else is a hard fault, never a silent default.
class LocalTable {
public:
  explicit LocalTable(int n) : layout_{n} {
    tree_.resize(layout_.size(), 0);
    cut_.resize(layout_.size(), 0);
    present_.assign(layout_.size(), 0);
  }

  int n() const { return layout_.n; }
  bool has(int i, int j) const { return present_[layout_.index(i, j)] != 0; }

  Cost tree(int i, int j) const {
    const auto at = layout_.index(i, j);
    if (!present_[at])
      throw MissingCellError(i, j, -1, -1);
    return tree_[at];
  }
  std::int32_t cut(int i, int j) const {
    const auto at = layout_.index(i, j);
    if (!present_[at])
      throw MissingCellError(i, j, -1, -1);
    return cut_[at];
  }

  void store(int i, int j, Cost tree_value, std::int32_t cut_value) {
    const auto at = layout_.index(i, j);
    if (present_[at])
      throw TableError("cell computed twice: (" + std::to_string(i) + "," + std::to_string(j) +
                       ")");
    tree_[at] = tree_value;
    cut_[at] = cut_value;
    present_[at] = 1;
  }

  // Message delivery; duplicates must agree exactly.
  void absorb(int i, int j, Cost tree_value, std::int32_t cut_value) {
    const auto at = layout_.index(i, j);
    if (present_[at]) {
      if (tree_[at] != tree_value || cut_[at] != cut_value)
        throw TableError("conflicting duplicate for cell (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
      return;
    }
    tree_[at] = tree_value;
    cut_[at] = cut_value;
    present_[at] = 1;
  }

private:
  TriangularLayout layout_;
  std::vector<Cost> tree_;
  std::vector<std::int32_t> cut_;
  std::vector<std::uint8_t> present_;
};

// Evaluates the cells of one piece in ascending global diagonal order using
// the bounded split-point scan. Returns the number of split-point probes.
inline std::uint64_t compute_piece(LocalTable& table, const WeightOracle& wo,
                                   const FrequencySet& fs, const BlockGeom& rect, int diagonal,
                                   int worker) {
  std::uint64_t iterations = 0;
  try {
    const int d_lo = std::max(0, rect.col0 - rect.row1);
    const int d_hi = rect.col1 - rect.row0;
    for (int d = d_lo; d <= d_hi; ++d) {
      const int i_lo = std::max(rect.row0, rect.col0 - d);
      const int i_hi = std::min(rect.row1, rect.col1 - d);
      for (int i = i_lo; i <= i_hi; ++i) {
        const int j = i + d;
        if (j == i) {
          table.store(i, i, fs.gap_weight(i), static_cast<std::int32_t>(i));
          continue;
        }
        const int lo = table.cut(i, j - 1);
        const int hi = std::min<int>(table.cut(i + 1, j), j - 1);
        Cost best = std::numeric_limits<Cost>::max();
        std::int32_t best_k = static_cast<std::int32_t>(lo);
        const Cost w = wo.weight(i, j);
        for (int split = lo; split <= hi; ++split) {
          const Cost c = table.tree(i, split) + table.tree(split + 1, j) + w;
          if (c < best) {
            best = c;
            best_k = static_cast<std::int32_t>(split);
          }
        }
        iterations += static_cast<std::uint64_t>(hi - lo + 1);
        table.store(i, j, best, best_k);
      }
    }
  } catch (const MissingCellError& e) {
    throw MissingCellError(e.i, e.j, diagonal, worker);
  }
  return iterations;
}

inline void absorb_bundle(LocalTable& dst, const LocalTable& src, const Bundle& bundle) {
  for (const BlockGeom& rect : bundle.rects)
    for (int i = rect.row0; i <= rect.row1; ++i)
      for (int j = std::max(i, rect.col0); j <= rect.col1; ++j)
        dst.absorb(i, j, src.tree(i, j), src.cut(i, j));
}

// Canonical per-diagonal phase walk, shared by both schedulers. Regular and
// frag modes simply leave the later phases empty.
struct PhaseStep {
  enum Kind { Recv, Compute, Send } kind;
  int index; // RecvPhase / ComputeSlot / 1-based send slot
};

inline const std::vector<PhaseStep>& phase_sequence() {
  static const std::vector<PhaseStep> steps = {
      {PhaseStep::Recv, 0},    {PhaseStep::Compute, 0}, {PhaseStep::Recv, 1},
      {PhaseStep::Compute, 1}, {PhaseStep::Send, 1},    {PhaseStep::Recv, 2},
      {PhaseStep::Compute, 2}, {PhaseStep::Send, 2},    {PhaseStep::Compute, 3},
      {PhaseStep::Send, 3},    {PhaseStep::Send, 4},
  };
  return steps;
}

struct ExecResult {
  std::vector<LocalTable> tables;
  std::vector<std::uint64_t> busy, wait;
  std::uint64_t makespan = 0;
};

inline ExecResult run_simulated(const CommSchedule& sched, const PartitionPlan& plan,
                                const FrequencySet& fs, const WeightOracle& wo,
                                const CostModel& cm) {
  const int p = sched.p;
  ExecResult res;
  res.tables.reserve(static_cast<std::size_t>(p));
  for (int w = 0; w < p; ++w)
    res.tables.emplace_back(plan.n);
  res.busy.assign(static_cast<std::size_t>(p), 0);
  res.wait.assign(static_cast<std::size_t>(p), 0);
  std::vector<std::uint64_t> clock(static_cast<std::size_t>(p), 0);
  std::vector<std::uint64_t> arrival(sched.bundles.size(), 0);

  // delivery lists per (worker, diagonal, phase)
  std::vector<std::vector<std::vector<std::vector<int>>>> inbox(static_cast<std::size_t>(p));
  for (int w = 0; w < p; ++w)
    inbox[static_cast<std::size_t>(w)].assign(
        static_cast<std::size_t>(sched.diag_count),
        std::vector<std::vector<int>>(3));
  for (std::size_t id = 0; id < sched.bundles.size(); ++id) {
    const Bundle& b = sched.bundles[id];
    inbox[static_cast<std::size_t>(b.dst)][static_cast<std::size_t>(b.deliver_diag - 1)]
         [static_cast<int>(b.deliver_phase)]
             .push_back(static_cast<int>(id));
  }

  for (int d = 1; d <= sched.diag_count; ++d) {
    for (const PhaseStep& step : phase_sequence()) {
      for (int w = 0; w < p; ++w) {
        const auto& wplan =
            sched.worker[static_cast<std::size_t>(w)][static_cast<std::size_t>(d - 1)];
        auto& t = clock[static_cast<std::size_t>(w)];
        switch (step.kind) {
        case PhaseStep::Recv: {
          for (int id : inbox[static_cast<std::size_t>(w)][static_cast<std::size_t>(d - 1)]
                             [step.index]) {
            const Bundle& bundle = sched.bundles[static_cast<std::size_t>(id)];
            const std::uint64_t ready = arrival[static_cast<std::size_t>(id)];
            if (ready > t) {
              res.wait[static_cast<std::size_t>(w)] += ready - t;
              t = ready;
            }
            absorb_bundle(res.tables[static_cast<std::size_t>(w)],
                          res.tables[static_cast<std::size_t>(bundle.src)], bundle);
          }
          break;
        }
        case PhaseStep::Compute: {
          for (int piece_id : wplan.compute[step.index]) {
            const Piece& piece = sched.pieces[static_cast<std::size_t>(piece_id)];
            const std::uint64_t iters =
                compute_piece(res.tables[static_cast<std::size_t>(w)], wo, fs, piece.rect, d, w);
            const std::uint64_t cost =
                piece.rect.cell_count() * cm.cost_per_cell + iters * cm.cost_per_iteration;
            res.busy[static_cast<std::size_t>(w)] += cost;
            t += cost;
          }
          break;
        }
        case PhaseStep::Send: {
          for (int id : wplan.send[step.index - 1]) {
            const Bundle& bundle = sched.bundles[static_cast<std::size_t>(id)];
            arrival[static_cast<std::size_t>(id)] =
                t + cm.latency_per_message + bundle.cells * cm.cost_per_transferred_cell;
          }
          break;
        }
        }
      }
    }
  }
  res.makespan = *std::max_element(clock.begin(), clock.end());
  return res;
}

// One inbox per worker; senders push finished bundles, the receiver blocks
// until the expected count for a (diagonal, phase) pair has arrived.
class ThreadInbox {
public:
  void push(const Bundle* bundle) {
    {
      std::lock_guard<std::mutex> lock(m_);
      ready_[{bundle->deliver_diag, static_cast<int>(bundle->deliver_phase)}].push_back(bundle);
    }
    cv_.notify_all();
  }

  void fail() {
    {
      std::lock_guard<std::mutex> lock(m_);
      failed_ = true;
    }
    cv_.notify_all();
  }

  std::vector<const Bundle*> wait_for(int diag, int phase, std::size_t count,
                                      std::uint64_t& wait_ns) {
    if (count == 0)
      return {};
    std::unique_lock<std::mutex> lock(m_);
    const auto key = std::pair<int, int>{diag, phase};
    const auto begin = std::chrono::steady_clock::now();
    cv_.wait(lock, [&] { return failed_ || ready_[key].size() >= count; });
    wait_ns += static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                              std::chrono::steady_clock::now() - begin)
                                              .count());
    if (failed_)
      throw Error("run aborted: a peer worker failed");
    auto bundles = std::move(ready_[key]);
    ready_.erase(key);
    return bundles;
  }

private:
  std::mutex m_;
  std::condition_variable cv_;
  std::map<std::pair<int, int>, std::vector<const Bundle*>> ready_;
  bool failed_ = false;
};

inline ExecResult run_threaded(const CommSchedule& sched, const PartitionPlan& plan,
                               const FrequencySet& fs, const WeightOracle& wo) {
  using clock_type = std::chrono::steady_clock;
  const int p = sched.p;
  ExecResult res;
  res.tables.reserve(static_cast<std::size_t>(p));
  for (int w = 0; w < p; ++w)
    res.tables.emplace_back(plan.n);
  res.busy.assign(static_cast<std::size_t>(p), 0);
  res.wait.assign(static_cast<std::size_t>(p), 0);

  std::vector<ThreadInbox> inbox(static_cast<std::size_t>(p));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(p));
  std::vector<std::uint64_t> end_ns(static_cast<std::size_t>(p), 0);
  const auto start = clock_type::now();

  auto body = [&](int w) {
    try {
      for (int d = 1; d <= sched.diag_count; ++d) {
        const auto& wplan =
            sched.worker[static_cast<std::size_t>(w)][static_cast<std::size_t>(d - 1)];
        for (const PhaseStep& step : phase_sequence()) {
          switch (step.kind) {
          case PhaseStep::Recv: {
            const auto count = static_cast<std::size_t>(wplan.expected[step.index]);
            auto bundles = inbox[static_cast<std::size_t>(w)].wait_for(
                d, step.index, count, res.wait[static_cast<std::size_t>(w)]);
            for (const Bundle* bundle : bundles)
              absorb_bundle(res.tables[static_cast<std::size_t>(w)],
                            res.tables[static_cast<std::size_t>(bundle->src)], *bundle);
            break;
          }
          case PhaseStep::Compute: {
            if (wplan.compute[step.index].empty())
              break;
            const auto begin = clock_type::now();
            for (int piece_id : wplan.compute[step.index])
              compute_piece(res.tables[static_cast<std::size_t>(w)], wo, fs,
                            sched.pieces[static_cast<std::size_t>(piece_id)].rect, d, w);
            res.busy[static_cast<std::size_t>(w)] +=
                static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                               clock_type::now() - begin)
                                               .count());
            break;
          }
          case PhaseStep::Send: {
            for (int id : wplan.send[step.index - 1]) {
              const Bundle& bundle = sched.bundles[static_cast<std::size_t>(id)];
              inbox[static_cast<std::size_t>(bundle.dst)].push(&bundle);
            }
            break;
          }
          }
        }
      }
    } catch (...) {
      errors[static_cast<std::size_t>(w)] = std::current_exception();
      for (auto& box : inbox)
        box.fail();
    }
    end_ns[static_cast<std::size_t>(w)] = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - start).count());
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(p));
  for (int w = 0; w < p; ++w)
    threads.emplace_back(body, w);
  for (auto& thread : threads)
    thread.join();
  for (auto& error : errors)
    if (error)
      std::rethrow_exception(error);

  res.makespan = *std::max_element(end_ns.begin(), end_ns.end());
  return res;
}

} // namespace detail

struct RunResult {
  DpTables tables;
  Metrics metrics;
};

// Executes the block-partitioned run over p logical workers and gathers the
// tables, which must match the sequential solver cell for cell.
inline RunResult run_cgm(const FrequencySet& fs, int p, int k, Mode mode, Scheduler scheduler,
                         const CostModel& cm = {}, Grouping grouping = Grouping::Combined) {
  if (mode == Mode::Regular)
    k = 0; // the regular scheme is the unfragmented partition
  const PartitionPlan plan = build_plan(fs.n(), p, k);
  const Mapping map = snake_map(plan, p);
  const CommSchedule sched = build_schedule(plan, map, mode, grouping);
  const WeightOracle wo(fs);

  detail::ExecResult exec = scheduler == Scheduler::Simulated
                                ? detail::run_simulated(sched, plan, fs, wo, cm)
                                : detail::run_threaded(sched, plan, fs, wo);

  RunResult out{DpTables(fs.n()), {}};
  for (const BlockGeom& b : plan.blocks) {
    const auto& table = exec.tables[static_cast<std::size_t>(map.owner_of(b))];
    for (int i = b.row0; i <= b.row1; ++i)
      for (int j = std::max(i, b.col0); j <= b.col1; ++j)
        out.tables.set(i, j, table.tree(i, j), table.cut(i, j));
  }

  Metrics& m = out.metrics;
  m.mode = to_string(mode);
  m.n = fs.n();
  m.p = p;
  m.k = k;
  m.diagonals = plan.diagonal_count();
  m.blocks = plan.block_count();
  m.subblock_units = subblock_units(plan);
  m.comm_substeps = sched.global_substeps;
  m.worker_substeps = sched.worker_substeps;
  m.comm_substeps_busiest =
      sched.worker_substeps.empty()
          ? 0
          : *std::max_element(sched.worker_substeps.begin(), sched.worker_substeps.end());
  m.messages = sched.bundles.size();
  m.cells_sent = sched.total_cells;
  m.busy = std::move(exec.busy);
  m.wait = std::move(exec.wait);
  m.blocks_per_worker = sched.blocks_per_worker;
  m.makespan = exec.makespan;
  m.root_cost = out.tables.tree(0, fs.n());
  return out;
}

} // namespace obst
