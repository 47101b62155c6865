// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Thresholds and tolerances are fixed below.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "expresponse/allocator.hpp"
#include "expresponse/estimator.hpp"
#include "expresponse/experiments.hpp"
#include "expresponse/gridsim.hpp"
#include "expresponse/io.hpp"

using namespace expresponse;

namespace {

constexpr double kObjectiveTol = 1e-12;
constexpr double kOracleRuntimeLimit = 60.0;  // seconds
constexpr double kLargeGreedyLimit = 1.0;     // seconds
constexpr double kRateTol = 0.01;             // one grid step
constexpr double kSublinearBar = 0.25;        // tail regret / head regret
constexpr double kReductionBar = 0.95;        // achieved / optimal
constexpr double kGridReductionBar = 2.0;     // learner reduction / baseline reduction
constexpr int kGridSeeds = 20;
constexpr int kSweepSeeds = 25;

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome greedy_matches_enumeration() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::array<double, 6> rates{0.05, 0.1, 0.25, 0.5, 1.0, 2.0};
  long instances = 0, mismatches = 0;
  double worst = 0.0;
  for (int n = 1; n <= 4; ++n) {
    long combos = 1;
    for (int i = 0; i < n; ++i) combos *= 6;
    for (long code = 0; code < combos; ++code) {
      Eigen::VectorXd l(n);
      long rest = code;
      for (int i = 0; i < n; ++i, rest /= 6) l(i) = rates[static_cast<std::size_t>(rest % 6)];
      for (int b = 1; b <= 8; ++b) {
        const double g = expected_reduction(l, mjs_allocate(l, b).units);
        const double e = expected_reduction(l, brute_force_allocate(l, b).units);
        worst = std::max(worst, std::abs(g - e));
        mismatches += std::abs(g - e) > kObjectiveTol;
        ++instances;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < kOracleRuntimeLimit,
          fmt::format("{} instances, {} mismatches, max gap {:.1e}, {:.2f}s", instances, mismatches, worst, secs)};
}

Outcome jumps_non_increasing() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rate(0.0, 5.0);
  std::uniform_int_distribution<int> level(1, 50);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const double l = rate(rng);
    const int j = level(rng);
    violations += jump(l, j - 1.0) < jump(l, double(j));
  }
  return {violations == 0, fmt::format("10000 pairs, {} violations", violations)};
}

Outcome large_greedy_is_fast() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rate(0.01, 2.0);
  Eigen::VectorXd l(1000);
  for (int i = 0; i < 1000; ++i) l(i) = rate(rng);
  const auto t0 = std::chrono::steady_clock::now();
  const Allocation a = mjs_allocate(l, 1000);
  const double secs = seconds_since(t0);
  return {secs < kLargeGreedyLimit && a.spent() == 1000, fmt::format("n=b=1000 in {:.4f}s", secs)};
}

Outcome estimator_recovers_rates() {
  std::mt19937_64 rng(99);
  const RateGrid grid{};
  double worst = 0.0;
  std::string per;
  for (double truth : {0.1, 0.5, 1.0}) {
    History h(1, 5);
    for (int c = 1; c <= 5; ++c) {
      std::bernoulli_distribution coin(1.0 - std::exp(-truth * c));
      int hits = 0;
      for (int s = 0; s < 100000; ++s) hits += coin(rng);
      h.offered(0, c - 1) = 100000;
      h.success(0, c - 1) = hits;
    }
    h.rounds_elapsed = 500000;
    const double est = linear_search(h, grid, 5).lambda_hat(0);
    worst = std::max(worst, std::abs(est - truth));
    per += fmt::format(" {}->{:.2f}", truth, est);
  }
  return {worst <= kRateTol + 1e-12, fmt::format("max |err| {:.4f};{}", worst, per)};
}

Outcome regret_is_sublinear() {
  SweepOptions o;
  o.batch_sizes = {50};
  o.agent_counts = {5, 6};
  o.budgets = {5};
  o.horizon = 200'000;
  o.seeds = kSweepSeeds;
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const auto& c : run_regret_sweep(o)) {
    ok = ok && c.sublinearity() <= kSublinearBar;
    detail += fmt::format("n={} ratio {:.3f}; ", c.n_agents, c.sublinearity());
  }
  return {ok, detail + fmt::format("{:.1f}s", seconds_since(t0))};
}

Outcome final_reduction_near_optimal() {
  SweepOptions o = exp2_defaults();
  o.seeds = kSweepSeeds;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 1.0;
  std::string where;
  const auto cells = run_regret_sweep(o);
  for (const auto& c : cells)
    if (c.tail_ratio < worst) {
      worst = c.tail_ratio;
      where = fmt::format("b={} n={}", c.budget, c.n_agents);
    }
  return {worst >= kReductionBar, fmt::format("{} cells, worst {:.4f} at {}, {:.1f}s", cells.size(), worst, where,
                                              seconds_since(t0))};
}

Outcome grid_ordering_holds() {
  const GridConfig cfg = GridConfig::defaults();
  const GridSweep s = run_grid_sweep(cfg, kGridSeeds, 1);
  const auto& none = s.mean_of("no-discount");
  const auto& base = s.mean_of("baseline");
  const auto& uw = s.mean_of("learner-uw");
  const auto& w = s.mean_of("learner-w");
  const double ratio = s.reduction_vs_baseline("learner-uw");
  const bool ok = uw.last_peak1_daily < base.last_peak1_daily && base.last_peak1_daily < none.last_peak1_daily &&
                  uw.last_penalty_per_window < none.last_penalty_per_window &&
                  w.last_penalty_per_window < none.last_penalty_per_window && ratio >= kGridReductionBar;
  return {ok, fmt::format("peak1 uw {:.2f} < base {:.2f} < none {:.2f}; penalty uw {:.0f}, w {:.0f} vs none {:.0f}; "
                          "uw reduction {:.2f}x baseline",
                          uw.last_peak1_daily, base.last_peak1_daily, none.last_peak1_daily,
                          uw.last_penalty_per_window, w.last_penalty_per_window, none.last_penalty_per_window, ratio)};
}

Outcome cli_is_deterministic() {
  namespace fs = std::filesystem;
  const fs::path root = TEST_SCRATCH;
  fs::remove_all(root);
  const std::vector<std::string> commands{
      "exp1 --horizon 2000 --seeds 3 --seed 11",
      "exp2 --horizon 2000 --seeds 2 --budget 2,4 --agents 3 --seed 11",
      "gridsim --weeks 6 --seeds 3 --seed 11",
      "bandit --agents 4 --horizon 3000 --seed 11",
  };
  int files = 0, differing = 0;
  for (std::size_t k = 0; k < commands.size(); ++k) {
    // Second run uses a different worker count; output must not change.
    for (int pass = 0; pass < 2; ++pass) {
      const fs::path out = root / fmt::format("cmd{}_{}", k, pass);
      const std::string cmd = fmt::format("EXPRESPONSE_WORKERS={} {} {} --out {} > /dev/null 2>&1", pass ? 3 : 1,
                                          EXPRESPONSE_CLI, commands[k], out.string());
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + commands[k]};
    }
    for (const auto& e : fs::directory_iterator(root / fmt::format("cmd{}_0", k))) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      const fs::path twin = root / fmt::format("cmd{}_1", k) / e.path().filename();
      differing += !fs::exists(twin) || read_file(e.path().string()) != read_file(twin.string());
    }
  }
  return {files > 0 && differing == 0, fmt::format("{} CSV files compared, {} differ", files, differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"greedy-optimal-vs-enumeration", greedy_matches_enumeration},
      {"jumps-non-increasing", jumps_non_increasing},
      {"greedy-n1000-b1000-under-1s", large_greedy_is_fast},
      {"estimator-within-one-grid-step", estimator_recovers_rates},
      {"regret-sublinear-n5-n6", regret_is_sublinear},
      {"final-reduction-95pct-every-cell", final_reduction_near_optimal},
      {"grid-strategy-ordering", grid_ordering_holds},
      {"cli-byte-identical-reruns", cli_is_deterministic},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("[%s] %zu %s: %s\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
