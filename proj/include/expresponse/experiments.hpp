#pragma once

// Seed sweeps for the regret and reduction experiments and the grid comparison.
// Jobs run on a bounded worker pool; results are merged by job index, so output
// never depends on the worker count or scheduling.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "expresponse/bandit.hpp"
#include "expresponse/gridsim.hpp"

namespace expresponse {

/// EXPRESPONSE_WORKERS when set to a positive integer, else hardware concurrency.
int worker_count();

/// Calls job(k) for k in [0, jobs) on up to `workers` threads. Rethrows the first failure.
void parallel_for(std::size_t jobs, int workers, const std::function<void(std::size_t)>& job);

// Independent 64-bit stream seed for (master, index, purpose). Distinct tags
// keep the rate draw, the environment and the learner from sharing a stream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t tag);

/// Per-seed true rates, uniform on [lo, hi).
Eigen::VectorXd draw_lambdas(std::uint64_t master, std::uint64_t seed_index, Eigen::Index n, double lo = 0.05,
                             double hi = 1.0);

struct SweepOptions {
  std::vector<int> batch_sizes{5, 10, 50};
  std::vector<int> agent_counts{4, 5, 6};
  std::vector<int> budgets{5};
  std::int64_t horizon = 200'000;
  int seeds = 25;
  std::uint64_t master_seed = 1;
  RateGrid rate_grid{};
  InitMode init = InitMode::Optimistic;
  Optimism optimism = Optimism::JumpInterval;
  double lambda_lo = 0.05;
  double lambda_hi = 1.0;
  int workers = 0;  // 0 means worker_count()

  void validate() const;
};

/// Seed-averaged regret curve of one (batch size, agents, budget) cell.
struct RegretCell {
  int batch_size = 0;
  int n_agents = 0;
  int budget = 0;
  std::vector<std::int64_t> t;
  std::vector<double> mean_cumulative_regret;
  std::vector<double> mean_round_regret;
  double head_regret = 0.0;  // mean per-round regret, first 10% of batches
  double tail_regret = 0.0;  // same, last 10%
  double optimal = 0.0;      // seed mean of the known-rate optimum
  double achieved_tail = 0.0;
  double tail_ratio = 0.0;   // seed mean of achieved_tail / optimal

  double sublinearity() const { return head_regret > 0.0 ? tail_regret / head_regret : 0.0; }
};

/// Runs every cell of budgets x agent_counts x batch_sizes for `seeds` seeds.
std::vector<RegretCell> run_regret_sweep(const SweepOptions& options);

/// Batch-size sweep at fixed budget. Writes exp1_bs{bS}_n{n}.csv and exp1_summary.json.
std::vector<RegretCell> run_exp1(const SweepOptions& options, const std::string& out_dir);

/// Budget and agent-count sweep at fixed batch size. Writes exp2_cells.csv and exp2_summary.json.
std::vector<RegretCell> run_exp2(const SweepOptions& options, const std::string& out_dir);

/// Defaults for the budget/agent sweep: b in 2..8, n in 4..6, batch 50.
SweepOptions exp2_defaults();

struct GridSweep {
  std::vector<StrategySummary> mean;                // kGridStrategies order, averaged over seeds
  std::vector<std::vector<StrategySummary>> runs;   // [seed][strategy]
  GridReport first;                                 // full window log of seed 0

  const StrategySummary& mean_of(const std::string& strategy) const;
  // (no-discount - strategy) / (no-discount - baseline), last-10-weeks peak1.
  double reduction_vs_baseline(const std::string& strategy) const;
};

GridSweep run_grid_sweep(const GridConfig& config, int seeds, std::uint64_t master_seed, int workers = 0);

/// Writes gridsim_<strategy>.csv (seed 0 windows), gridsim_comparison.csv and gridsim_summary.json.
void write_grid_sweep(const GridSweep& sweep, const GridConfig& config, const std::string& out_dir);

}  // namespace expresponse
