// Command-line front end: instance generation, solving, partition-plan
// inspection, parallel runs with metrics, verification sweeps, and CSV
// benchmark emission.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error,
// 3 I/O error.
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "obst/obst.hpp"

namespace {

using namespace obst;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

struct RunConfig {
  int n = 1000;
  int p = 4;
  int k = 1;
  std::string mode = "4s";
  std::string scheduler = "sim";
  std::uint64_t seed = 1;
  std::string input;
  std::string output;
  int reps = 1;
  std::uint64_t latency = 0;
  std::uint64_t transfer = 0;
  std::uint64_t cost_iter = 1;
  std::uint64_t cost_cell = 0;
  std::string grouping = "combined";
};

Mode parse_mode(const std::string& mode) {
  if (mode == "regular")
    return Mode::Regular;
  if (mode == "frag")
    return Mode::Frag;
  if (mode == "4s")
    return Mode::FourSplit;
  throw CLI::ValidationError("--mode", "expected one of regular, frag, 4s");
}

Scheduler parse_scheduler(const std::string& s) {
  if (s == "sim")
    return Scheduler::Simulated;
  if (s == "threaded")
    return Scheduler::Threaded;
  throw CLI::ValidationError("--scheduler", "expected one of sim, threaded");
}

Grouping parse_grouping(const std::string& g) {
  if (g == "combined")
    return Grouping::Combined;
  if (g == "split-last")
    return Grouping::SplitLast;
  throw CLI::ValidationError("--grouping", "expected one of combined, split-last");
}

CostModel cost_model(const RunConfig& cfg) {
  CostModel cm;
  cm.cost_per_iteration = cfg.cost_iter;
  cm.cost_per_cell = cfg.cost_cell;
  cm.latency_per_message = cfg.latency;
  cm.cost_per_transferred_cell = cfg.transfer;
  return cm;
}

// Exact decimal probabilities scaled to integers by the largest number of
// fraction digits seen, so equal-cost comparisons stay exact.
FrequencySet parse_probability_instance(std::istream& in) {
  struct Decimal {
    std::uint64_t digits;
    int frac;
  };
  std::vector<Decimal> values;
  long long declared_n = -1;
  int line_no = 0;
  int max_frac = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    while (fields >> token) {
      std::uint64_t digits = 0;
      int frac = -1;
      for (char c : token) {
        if (c == '.') {
          if (frac >= 0)
            throw ParseError(line_no, "bad number '" + token + "'");
          frac = 0;
          continue;
        }
        if (c < '0' || c > '9')
          throw ParseError(line_no, "bad number '" + token + "'");
        digits = digits * 10 + static_cast<std::uint64_t>(c - '0');
        if (frac >= 0)
          ++frac;
      }
      if (declared_n < 0) {
        declared_n = static_cast<long long>(digits);
        if (frac > 0 || declared_n < 1)
          throw ParseError(line_no, "key count must be a positive integer");
        continue;
      }
      values.push_back({digits, frac < 0 ? 0 : frac});
      max_frac = std::max(max_frac, frac < 0 ? 0 : frac);
    }
  }
  if (declared_n < 0)
    throw ParseError(line_no ? line_no : 1, "missing key count");
  if (values.size() != 2 * static_cast<std::size_t>(declared_n) + 1)
    throw ParseError(line_no ? line_no : 1, "expected " +
                                                std::to_string(2 * declared_n + 1) + " weights");
  std::vector<Cost> weights;
  for (const Decimal& v : values) {
    Cost w = v.digits;
    for (int d = v.frac; d < max_frac; ++d)
      w *= 10;
    weights.push_back(w);
  }
  std::vector<Cost> keys(weights.begin(), weights.begin() + declared_n);
  std::vector<Cost> gaps(weights.begin() + declared_n, weights.end());
  return FrequencySet(std::move(keys), std::move(gaps));
}

FrequencySet instance_for(const RunConfig& cfg, bool probabilities = false) {
  if (!cfg.input.empty()) {
    if (!probabilities)
      return load_instance(cfg.input);
    std::ifstream in(cfg.input);
    if (!in)
      throw IoError("cannot open instance file: " + cfg.input);
    return parse_probability_instance(in);
  }
  return generate_instance(cfg.n, cfg.seed);
}

void append_csv(const std::string& path, const Metrics& metrics) {
  if (path.empty()) {
    static bool header_emitted = false;
    if (!header_emitted) {
      std::cout << csv_header() << '\n';
      header_emitted = true;
    }
    std::cout << csv_row(metrics) << '\n';
    return;
  }
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out)
    throw IoError("cannot open output file: " + path);
  if (fresh)
    out << csv_header() << '\n';
  out << csv_row(metrics) << '\n';
}

void print_tree(std::ostream& out, const BstTree& tree, int ref) {
  if (BstTree::is_dummy(ref)) {
    out << 'd' << BstTree::dummy_index(ref);
    return;
  }
  const auto& node = tree.nodes[static_cast<std::size_t>(ref)];
  out << "(k" << node.key << ' ';
  print_tree(out, tree, node.left);
  out << ' ';
  print_tree(out, tree, node.right);
  out << ')';
}

int cmd_solve(const RunConfig& cfg, const std::string& algo, bool show_tree, bool probabilities) {
  const FrequencySet fs = instance_for(cfg, probabilities);
  const DpTables dp = algo == "godbole" ? solve_godbole(fs) : solve_knuth(fs);
  std::cout << "n: " << fs.n() << '\n';
  std::cout << "optimal cost: " << dp.tree(0, fs.n()) << '\n';
  std::cout << "root: key " << dp.cut(0, fs.n()) + 1 << '\n';
  if (show_tree) {
    print_tree(std::cout, reconstruct_tree(dp), reconstruct_tree(dp).root);
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_plan(const RunConfig& cfg, const std::string& scheme) {
  const PartitionPlan plan =
      build_plan(cfg.n, cfg.p, cfg.k,
                 scheme == "regular" ? PartitionScheme::Regular : PartitionScheme::Irregular);
  std::cout << dump_plan(plan, snake_map(plan, cfg.p));
  return kExitOk;
}

int cmd_run(const RunConfig& cfg) {
  const FrequencySet fs = instance_for(cfg);
  const RunResult run = run_cgm(fs, cfg.p, cfg.k, parse_mode(cfg.mode),
                                parse_scheduler(cfg.scheduler), cost_model(cfg),
                                parse_grouping(cfg.grouping));
  append_csv(cfg.output, run.metrics);
  return kExitOk;
}

int cmd_gen(const RunConfig& cfg) {
  const std::string text = write_instance(generate_instance(cfg.n, cfg.seed));
  if (cfg.output.empty()) {
    std::cout << text;
    return kExitOk;
  }
  std::ofstream out(cfg.output);
  if (!out)
    throw IoError("cannot open output file: " + cfg.output);
  out << text;
  return kExitOk;
}

// Sweeps a (n, p, k, mode, scheduler) grid asserting that every run matches
// the sequential solver and that plan and table invariants hold.
int cmd_verify(const std::vector<int>& ns, const std::vector<int>& ps, const std::vector<int>& ks,
               const std::vector<std::string>& modes, const std::vector<std::string>& schedulers) {
  for (int n : ns) {
    const FrequencySet fs = generate_instance(n, 42 + static_cast<std::uint64_t>(n));
    const DpTables godbole = solve_godbole(fs);
    const DpTables knuth = solve_knuth(fs);
    if (!(godbole == knuth)) {
      std::cout << "FAIL n=" << n << ": godbole and knuth disagree\n";
      return kExitVerifyFailed;
    }
    if (!knuth.cut_monotone()) {
      std::cout << "FAIL n=" << n << ": cut table not monotone\n";
      return kExitVerifyFailed;
    }
    for (int p : ps)
      for (int k : ks) {
        if (n + 1 < grid_order(p))
          continue;
        const PartitionPlan plan = build_plan(n, p, k);
        const Mapping map = snake_map(plan, p);
        std::vector<int> counts(static_cast<std::size_t>(p), 0);
        for (int owner : map.owner)
          ++counts[static_cast<std::size_t>(owner)];
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        if (*hi - *lo > 1) {
          std::cout << "FAIL n=" << n << " p=" << p << " k=" << k << ": mapping unbalanced\n";
          return kExitVerifyFailed;
        }
        for (const std::string& mode : modes)
          for (const std::string& scheduler : schedulers) {
            const RunResult run =
                run_cgm(fs, p, k, parse_mode(mode), parse_scheduler(scheduler));
            if (!(run.tables == knuth)) {
              for (int i = 0; i <= n; ++i)
                for (int j = i; j <= n; ++j)
                  if (run.tables.tree(i, j) != knuth.tree(i, j) ||
                      run.tables.cut(i, j) != knuth.cut(i, j)) {
                    std::cout << "FAIL n=" << n << " p=" << p << " k=" << k << " mode=" << mode
                              << " scheduler=" << scheduler << ": cell (" << i << "," << j
                              << ") tree " << run.tables.tree(i, j) << " cut "
                              << run.tables.cut(i, j) << " expected tree " << knuth.tree(i, j)
                              << " cut " << knuth.cut(i, j) << '\n';
                    return kExitVerifyFailed;
                  }
            }
            std::cout << "ok n=" << n << " p=" << p << " k=" << k << " mode=" << mode
                      << " scheduler=" << scheduler << '\n';
          }
      }
  }
  std::cout << "verify: all configurations match the sequential solver\n";
  return kExitOk;
}

int cmd_bench(const RunConfig& cfg) {
  using clock_type = std::chrono::steady_clock;
  const FrequencySet fs = instance_for(cfg);

  const auto t0 = clock_type::now();
  const DpTables seq = solve_knuth(fs);
  const auto seq_ns = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(clock_type::now() - t0).count());

  std::vector<std::uint64_t> makespans;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    const RunResult run = run_cgm(fs, cfg.p, cfg.k, parse_mode(cfg.mode),
                                  parse_scheduler(cfg.scheduler), cost_model(cfg),
                                  parse_grouping(cfg.grouping));
    if (!(run.tables == seq))
      throw Error("bench run diverged from the sequential solver");
    makespans.push_back(run.metrics.makespan);
    append_csv(cfg.output, run.metrics);
  }
  const double mean = std::accumulate(makespans.begin(), makespans.end(), 0.0) /
                      static_cast<double>(makespans.size());
  const std::uint64_t best = *std::min_element(makespans.begin(), makespans.end());
  std::cout << "sequential: " << seq_ns << " ns\n";
  std::cout << std::fixed << std::setprecision(0) << "makespan mean: " << mean
            << "  min: " << best << '\n';
  if (cfg.scheduler == "threaded" && mean > 0) {
    const double speedup = static_cast<double>(seq_ns) / mean;
    std::cout << std::setprecision(3) << "speedup: " << speedup
              << "  efficiency: " << speedup / cfg.p << '\n';
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"optimal binary search tree solvers and block-parallel runtime"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string algo = "knuth";
  std::string scheme = "irregular";
  bool show_tree = false;
  bool probabilities = false;
  std::vector<int> verify_n = {64, 256};
  std::vector<int> verify_p = {2, 3, 5, 8};
  std::vector<int> verify_k = {0, 1, 2};
  std::vector<std::string> verify_modes = {"regular", "frag", "4s"};
  std::vector<std::string> verify_schedulers = {"sim", "threaded"};

  auto add_instance_flags = [&](CLI::App* cmd) {
    cmd->add_option("--n", cfg.n, "problem size for generated instances");
    cmd->add_option("--seed", cfg.seed, "generator seed");
    cmd->add_option("--input", cfg.input, "instance file (overrides --n/--seed)");
  };
  auto add_run_flags = [&](CLI::App* cmd) {
    cmd->add_option("--p", cfg.p, "worker count")->check(CLI::PositiveNumber);
    cmd->add_option("--k", cfg.k, "fragmentation count")->check(CLI::NonNegativeNumber);
    cmd->add_option("--mode", cfg.mode, "regular | frag | 4s");
    cmd->add_option("--scheduler", cfg.scheduler, "threaded | sim");
    cmd->add_option("--output", cfg.output, "metrics CSV file (appended)");
    cmd->add_option("--latency", cfg.latency, "simulated per-message latency");
    cmd->add_option("--transfer", cfg.transfer, "simulated per-cell transfer cost");
    cmd->add_option("--cost-iter", cfg.cost_iter, "simulated cost per split probe");
    cmd->add_option("--cost-cell", cfg.cost_cell, "simulated cost per cell");
    cmd->add_option("--grouping", cfg.grouping, "combined | split-last batching of the final sends");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve one instance");
  add_instance_flags(solve);
  solve->add_option("--algo", algo, "knuth | godbole");
  solve->add_flag("--tree", show_tree, "print the optimal tree");
  solve->add_flag("--probabilities", probabilities,
                  "input carries decimal probabilities; scale them to integers");

  CLI::App* plan = app.add_subcommand("plan", "dump the block partition");
  plan->add_option("--n", cfg.n, "problem size");
  plan->add_option("--p", cfg.p, "worker count")->check(CLI::PositiveNumber);
  plan->add_option("--k", cfg.k, "fragmentation count")->check(CLI::NonNegativeNumber);
  plan->add_option("--scheme", scheme, "regular | irregular");

  CLI::App* run = app.add_subcommand("run", "execute one parallel run and append a CSV row");
  add_instance_flags(run);
  add_run_flags(run);

  CLI::App* verify = app.add_subcommand("verify", "sweep a grid and compare to the solver");
  verify->add_option("--n-list", verify_n, "problem sizes");
  verify->add_option("--p-list", verify_p, "worker counts");
  verify->add_option("--k-list", verify_k, "fragmentation counts");
  verify->add_option("--modes", verify_modes, "modes to run");
  verify->add_option("--schedulers", verify_schedulers, "schedulers to run");

  CLI::App* bench = app.add_subcommand("bench", "repeat runs against a sequential baseline");
  add_instance_flags(bench);
  add_run_flags(bench);
  bench->add_option("--reps", cfg.reps, "repetitions")->check(CLI::PositiveNumber);

  CLI::App* gen = app.add_subcommand("gen", "write a generated instance");
  gen->add_option("--n", cfg.n, "problem size")->required();
  gen->add_option("--seed", cfg.seed, "generator seed");
  gen->add_option("--output", cfg.output, "instance file (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (solve->parsed())
      return cmd_solve(cfg, algo, show_tree, probabilities);
    if (plan->parsed())
      return cmd_plan(cfg, scheme);
    if (run->parsed())
      return cmd_run(cfg);
    if (verify->parsed())
      return cmd_verify(verify_n, verify_p, verify_k, verify_modes, verify_schedulers);
    if (bench->parsed())
      return cmd_bench(cfg);
    if (gen->parsed())
      return cmd_gen(cfg);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const PlanError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InstanceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
  return kExitConfig;
}
