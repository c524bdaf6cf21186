#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "obst/cgm.hpp"
#include "obst/io.hpp"
#include "obst/sequential.hpp"

using namespace obst;

namespace {

const std::vector<Mode> kModes = {Mode::Regular, Mode::Frag, Mode::FourSplit};
const std::vector<Scheduler> kSchedulers = {Scheduler::Simulated, Scheduler::Threaded};

} // namespace

TEST_CASE("three-key fixture on two workers") {
  const FrequencySet fs(std::vector<Cost>{3, 1, 7}, std::vector<Cost>{0, 0, 0, 0});
  for (Mode mode : kModes)
    for (Scheduler sched : kSchedulers) {
      CAPTURE(to_string(mode));
      CAPTURE(to_string(sched));
      const RunResult run = run_cgm(fs, 2, 0, mode, sched);
      CHECK(run.tables.tree(0, 3) == 16);
      CHECK(run.tables.cut(0, 3) == 2);
      CHECK(run.metrics.root_cost == 16);
    }
}

TEST_CASE("gathered tables equal the sequential solver") {
  for (int n : {24, 64, 100}) {
    const FrequencySet fs = generate_instance(n, 3000 + static_cast<std::uint64_t>(n));
    const DpTables expected = solve_knuth(fs);
    for (int p : {1, 2, 3, 5})
      for (int k : {0, 1, 2})
        for (Mode mode : kModes)
          for (Scheduler sched : kSchedulers) {
            CAPTURE(n);
            CAPTURE(p);
            CAPTURE(k);
            CAPTURE(to_string(mode));
            CAPTURE(to_string(sched));
            const RunResult run = run_cgm(fs, p, k, mode, sched);
            CHECK(run.tables == expected);
            CHECK(run.metrics.k == (mode == Mode::Regular ? 0 : k));
          }
  }
}

TEST_CASE("degenerate tiny instances stay exact") {
  for (int n = 1; n <= 8; ++n)
    for (int p = 1; p <= 4; ++p)
      for (int k = 0; k <= 2; ++k) {
        if (n + 1 < grid_order(p))
          continue;
        const FrequencySet fs = generate_instance(n, 11 + static_cast<std::uint64_t>(n));
        const DpTables expected = solve_knuth(fs);
        for (Mode mode : kModes)
          for (Scheduler sched : kSchedulers) {
            CAPTURE(n);
            CAPTURE(p);
            CAPTURE(k);
            CHECK(run_cgm(fs, p, k, mode, sched).tables == expected);
          }
      }
}

TEST_CASE("split-last grouping produces the same tables") {
  const FrequencySet fs = generate_instance(64, 77);
  const DpTables expected = solve_knuth(fs);
  for (Scheduler sched : kSchedulers) {
    const RunResult run =
        run_cgm(fs, 3, 2, Mode::FourSplit, sched, CostModel{}, Grouping::SplitLast);
    CHECK(run.tables == expected);
  }
}

TEST_CASE("runs are deterministic across schedulers and repetitions") {
  const FrequencySet fs = generate_instance(96, 5);
  const RunResult sim = run_cgm(fs, 5, 2, Mode::FourSplit, Scheduler::Simulated);
  const RunResult once = run_cgm(fs, 5, 2, Mode::FourSplit, Scheduler::Threaded);
  const RunResult twice = run_cgm(fs, 5, 2, Mode::FourSplit, Scheduler::Threaded);
  CHECK(sim.tables == once.tables);
  CHECK(once.tables == twice.tables);
  CHECK(sim.metrics.messages == once.metrics.messages);
  CHECK(sim.metrics.cells_sent == once.metrics.cells_sent);
}

TEST_CASE("a single worker never communicates") {
  const FrequencySet fs = generate_instance(40, 11);
  const RunResult run = run_cgm(fs, 1, 2, Mode::FourSplit, Scheduler::Simulated);
  CHECK(run.metrics.messages == 0);
  CHECK(run.metrics.cells_sent == 0);
  CHECK(run.metrics.comm_substeps == 0);
  CHECK(count_comm_steps(run.metrics) == 0);
  CHECK(run.tables == solve_knuth(fs));
}

TEST_CASE("rounds executed match the plan") {
  const FrequencySet fs = generate_instance(31, 9);
  const RunResult run = run_cgm(fs, 3, 1, Mode::FourSplit, Scheduler::Simulated);
  CHECK(run.metrics.diagonals == 6);
  CHECK(run.metrics.blocks == 15);
  CHECK(run.metrics.subblock_units == 21);
}

TEST_CASE("load imbalance") {
  SUBCASE("single worker has none") {
    const FrequencySet fs = generate_instance(31, 1);
    const RunResult run = run_cgm(fs, 1, 1, Mode::Frag, Scheduler::Simulated);
    const auto [below, above] = measure_load_imbalance(run.metrics);
    CHECK(below == 0.0);
    CHECK(above == 0.0);
  }

  SUBCASE("identical busy times have none") {
    Metrics m;
    m.busy = {42, 42, 42};
    const auto [below, above] = measure_load_imbalance(m);
    CHECK(below == 0.0);
    CHECK(above == 0.0);
  }

  SUBCASE("unit cost per cell reproduces the plan's cell counts") {
    const FrequencySet fs = generate_instance(31, 2);
    CostModel cm;
    cm.cost_per_iteration = 0;
    cm.cost_per_cell = 1;
    const RunResult run = run_cgm(fs, 3, 1, Mode::FourSplit, Scheduler::Simulated, cm);

    const PartitionPlan plan = build_plan(31, 3, 1);
    const Mapping map = snake_map(plan, 3);
    std::vector<std::uint64_t> cells(3, 0);
    for (const BlockGeom& b : plan.blocks)
      cells[static_cast<std::size_t>(map.owner_of(b))] += b.cell_count();
    REQUIRE(run.metrics.busy == cells);

    const double mean =
        std::accumulate(cells.begin(), cells.end(), 0.0) / static_cast<double>(cells.size());
    const auto [below, above] = measure_load_imbalance(run.metrics);
    CHECK(below == doctest::Approx(mean - static_cast<double>(
                                              *std::min_element(cells.begin(), cells.end()))));
    CHECK(above == doctest::Approx(static_cast<double>(
                                       *std::max_element(cells.begin(), cells.end())) -
                                   mean));
  }
}

TEST_CASE("missing cells fault loudly instead of defaulting") {
  const FrequencySet fs = generate_instance(8, 4);
  const WeightOracle wo(fs);
  detail::LocalTable table(8);
  BlockGeom rect;
  rect.row0 = 0;
  rect.row1 = 2;
  rect.col0 = 4;
  rect.col1 = 6; // depends on cells this table never saw
  try {
    detail::compute_piece(table, wo, fs, rect, 3, 1);
    FAIL("expected a missing-cell fault");
  } catch (const MissingCellError& e) {
    CHECK(e.diagonal == 3);
    CHECK(e.worker == 1);
    CHECK(std::string(e.what()).find("missing cell") != std::string::npos);
  }
}

TEST_CASE("conflicting duplicate deliveries abort the run") {
  detail::LocalTable table(4);
  table.absorb(1, 2, 10, 1);
  CHECK_NOTHROW(table.absorb(1, 2, 10, 1));
  CHECK_THROWS_AS(table.absorb(1, 2, 11, 1), TableError);
  CHECK_THROWS_AS(table.store(1, 2, 10, 1), TableError); // no recomputation either
}

TEST_CASE("schedule structure") {
  const PartitionPlan plan = build_plan(63, 5, 2);
  const Mapping map = snake_map(plan, 5);

  SUBCASE("providers precede consumers") {
    for (Mode mode : kModes) {
      const CommSchedule sched = build_schedule(plan, map, mode);
      for (const Bundle& b : sched.bundles) {
        CHECK(b.deliver_diag > b.diag);
        CHECK(b.src != b.dst);
        CHECK(b.cells > 0);
      }
    }
  }

  SUBCASE("frag uses fewer sub-steps per round than four-split") {
    const CommSchedule frag = build_schedule(plan, map, Mode::Frag);
    const CommSchedule fours = build_schedule(plan, map, Mode::FourSplit);
    CHECK(frag.diag_count == fours.diag_count);
    CHECK(frag.global_substeps <= frag.diag_count); // one slot per round at most
    CHECK(fours.global_substeps > frag.global_substeps);
  }

  SUBCASE("split-last grouping uses a fourth send slot") {
    const CommSchedule combined = build_schedule(plan, map, Mode::FourSplit, Grouping::Combined);
    const CommSchedule split = build_schedule(plan, map, Mode::FourSplit, Grouping::SplitLast);
    bool saw_slot4 = false;
    for (const Bundle& b : split.bundles)
      saw_slot4 |= b.slot == 4;
    CHECK(saw_slot4);
    for (const Bundle& b : combined.bundles)
      CHECK(b.slot <= 3);
    CHECK(split.global_substeps >= combined.global_substeps);
  }
}

TEST_CASE("measured communication matches the static schedule") {
  const FrequencySet fs = generate_instance(63, 21);
  for (int p : {2, 4, 6})
    for (int k : {1, 2}) {
      const PartitionPlan plan = build_plan(63, p, k);
      const Mapping map = snake_map(plan, p);
      const CommSchedule sched = build_schedule(plan, map, Mode::FourSplit);
      const RunResult run = run_cgm(fs, p, k, Mode::FourSplit, Scheduler::Simulated);
      CHECK(run.metrics.comm_substeps == sched.global_substeps);
      CHECK(run.metrics.messages == sched.bundles.size());
      CHECK(run.metrics.worker_substeps == sched.worker_substeps);
    }
}

TEST_CASE("four-splitting cuts wait time under message latency") {
  const FrequencySet fs = generate_instance(256, 99);
  CostModel cm;
  cm.latency_per_message = 400;
  cm.cost_per_transferred_cell = 1;
  for (int k : {1, 2}) {
    const RunResult frag = run_cgm(fs, 4, k, Mode::Frag, Scheduler::Simulated, cm);
    const RunResult fours = run_cgm(fs, 4, k, Mode::FourSplit, Scheduler::Simulated, cm);
    const auto total = [](const std::vector<std::uint64_t>& v) {
      return std::accumulate(v.begin(), v.end(), std::uint64_t{0});
    };
    CAPTURE(k);
    CHECK(total(fours.metrics.wait) <= total(frag.metrics.wait));
    CHECK(total(fours.metrics.busy) == total(frag.metrics.busy));
    CHECK(fours.metrics.makespan <= frag.metrics.makespan);
  }
}

TEST_CASE("busy plus wait never exceeds the makespan") {
  const FrequencySet fs = generate_instance(128, 31);
  for (Scheduler sched : kSchedulers) {
    CostModel cm;
    cm.latency_per_message = 50;
    cm.cost_per_transferred_cell = 1;
    const RunResult run = run_cgm(fs, 5, 1, Mode::FourSplit, sched, cm);
    REQUIRE(run.metrics.busy.size() == 5);
    for (std::size_t w = 0; w < 5; ++w)
      CHECK(run.metrics.busy[w] + run.metrics.wait[w] <= run.metrics.makespan);
  }
}

TEST_CASE("the busiest worker communicates more as k grows") {
  const FrequencySet fs = generate_instance(255, 8);
  std::uint64_t previous = 0;
  for (int k : {1, 2, 3}) {
    const RunResult run = run_cgm(fs, 8, k, Mode::FourSplit, Scheduler::Simulated);
    const std::uint64_t steps = count_comm_steps(run.metrics);
    CHECK(steps > previous);
    previous = steps;
  }
}

TEST_CASE("csv rows carry the full schema") {
  const auto columns = [](const std::string& line) {
    return 1 + std::count(line.begin(), line.end(), ',');
  };
  CHECK(columns(csv_header()) == 16);
  const FrequencySet fs = generate_instance(31, 64);
  const RunResult run = run_cgm(fs, 3, 1, Mode::FourSplit, Scheduler::Simulated);
  const std::string row = csv_row(run.metrics);
  CHECK(columns(row) == 16);
  std::istringstream in(row);
  std::string mode;
  std::getline(in, mode, ',');
  CHECK(mode == "4s");
  // the last column is the optimal cost
  CHECK(row.substr(row.rfind(',') + 1) == std::to_string(solve_knuth(fs).tree(0, 31)));
}

TEST_CASE("balance carries over to the runtime") {
  const FrequencySet fs = generate_instance(64, 12);
  for (int p : {2, 3, 5, 8, 13}) {
    const RunResult run = run_cgm(fs, p, 2, Mode::FourSplit, Scheduler::Simulated);
    const auto& counts = run.metrics.blocks_per_worker;
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(*hi - *lo <= 1);
  }
}
