#pragma once
#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "obst/frequency_set.hpp"

namespace obst {

// Execution record of one CGM run. Times are cost units under the simulated
// scheduler and nanoseconds under the threaded one. Two communication
// sub-step counts are kept: the number of sub-step slots in which any message
// moved (what the run "executed"), and the largest number of slots a single
// worker took part in as sender or receiver.
struct Metrics {
  std::string mode;
  int n = 0, p = 0, k = 0;

  int diagonals = 0;
  int blocks = 0;
  int subblock_units = 0;

  int comm_substeps = 0;            // slots with at least one message
  int comm_substeps_busiest = 0;    // max per-worker participation
  std::vector<int> worker_substeps; // per-worker participation

  std::uint64_t messages = 0;   // inter-worker bundles
  std::uint64_t cells_sent = 0; // table cells carried by those bundles

  std::vector<std::uint64_t> busy; // per worker
  std::vector<std::uint64_t> wait; // per worker
  std::vector<int> blocks_per_worker;
  std::uint64_t makespan = 0;
  Cost root_cost = 0;
};

// Load imbalance as (mean - min, max - mean) of per-worker busy time.
inline std::pair<double, double> measure_load_imbalance(const Metrics& m) {
  if (m.busy.empty())
    return {0.0, 0.0};
  const double total = std::accumulate(m.busy.begin(), m.busy.end(), 0.0);
  const double mean = total / static_cast<double>(m.busy.size());
  const auto [lo, hi] = std::minmax_element(m.busy.begin(), m.busy.end());
  return {mean - static_cast<double>(*lo), static_cast<double>(*hi) - mean};
}

// Communication sub-steps the busiest worker participated in.
inline std::uint64_t count_comm_steps(const Metrics& m) {
  return static_cast<std::uint64_t>(m.comm_substeps_busiest);
}

inline std::string csv_header() {
  return "mode,n,p,k,diagonals,blocks,subblock_units,comm_substeps,messages,cells_sent,"
         "busy_max,busy_min,busy_mean,wait_max,makespan,root_cost";
}

inline std::string csv_row(const Metrics& m) {
  std::uint64_t busy_max = 0, busy_min = 0, wait_max = 0;
  double busy_mean = 0.0;
  if (!m.busy.empty()) {
    busy_max = *std::max_element(m.busy.begin(), m.busy.end());
    busy_min = *std::min_element(m.busy.begin(), m.busy.end());
    busy_mean = std::accumulate(m.busy.begin(), m.busy.end(), 0.0) /
                static_cast<double>(m.busy.size());
  }
  if (!m.wait.empty())
    wait_max = *std::max_element(m.wait.begin(), m.wait.end());
  std::ostringstream out;
  out << m.mode << ',' << m.n << ',' << m.p << ',' << m.k << ',' << m.diagonals << ',' << m.blocks
      << ',' << m.subblock_units << ',' << m.comm_substeps << ',' << m.messages << ','
      << m.cells_sent << ',' << busy_max << ',' << busy_min << ',' << std::fixed
      << std::setprecision(2) << busy_mean << ',' << wait_max << ',' << m.makespan << ','
      << m.root_cost;
  return out.str();
}

} // namespace obst
