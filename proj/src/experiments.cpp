#include "expresponse/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "expresponse/errors.hpp"
#include "expresponse/io.hpp"

namespace expresponse {

namespace {

constexpr std::uint64_t kTagRates = 1;
constexpr std::uint64_t kTagEnvironment = 2;
constexpr std::uint64_t kTagLearner = 3;
constexpr std::uint64_t kTagGrid = 4;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create output directory " + dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

int resolve_workers(int requested) { return requested > 0 ? requested : worker_count(); }

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("EXPRESPONSE_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(std::min<long>(v, 1024));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void parallel_for(std::size_t jobs, int workers, const std::function<void(std::size_t)>& job) {
  const auto threads = std::min<std::size_t>(jobs, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t k = 0; k < jobs; ++k) job(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < jobs; k = next++) {
        try {
          job(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = jobs;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(tag)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

Eigen::VectorXd draw_lambdas(std::uint64_t master, std::uint64_t seed_index, Eigen::Index n, double lo, double hi) {
  if (!(lo >= 0.0) || !(hi > lo)) throw DomainError("draw_lambdas: need 0 <= lo < hi");
  std::mt19937_64 rng(derive_seed(master, seed_index, kTagRates));
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = u(rng);
  return out;
}

void SweepOptions::validate() const {
  if (batch_sizes.empty() || agent_counts.empty() || budgets.empty())
    throw ArgumentError("sweep: batch sizes, agent counts and budgets must be non-empty");
  for (int v : batch_sizes)
    if (v < 1) throw ArgumentError("sweep: batch size must be >= 1");
  for (int v : agent_counts)
    if (v < 1) throw ArgumentError("sweep: agent count must be >= 1");
  for (int v : budgets)
    if (v < 1) throw ArgumentError("sweep: budget must be >= 1");
  if (seeds < 1) throw ArgumentError("sweep: seeds must be >= 1");
  for (int bs : batch_sizes)
    if (horizon < bs) throw ArgumentError("sweep: horizon must be >= every batch size");
  rate_grid.validate();
  if (!(lambda_lo >= 0.0) || !(lambda_hi > lambda_lo)) throw DomainError("sweep: need 0 <= lambda lo < hi");
}

std::vector<RegretCell> run_regret_sweep(const SweepOptions& options) {
  options.validate();
  struct CellKey {
    int budget, n, batch;
  };
  std::vector<CellKey> cells;
  for (int b : options.budgets)
    for (int n : options.agent_counts)
      for (int bs : options.batch_sizes) cells.push_back({b, n, bs});

  const auto seeds = static_cast<std::size_t>(options.seeds);
  std::vector<RegretTrace> traces(cells.size() * seeds);
  parallel_for(traces.size(), resolve_workers(options.workers), [&](std::size_t job) {
    const CellKey& cell = cells[job / seeds];
    const std::uint64_t s = job % seeds;
    // The same seed index sees the same rates in every cell with the same n.
    BernoulliEnvironment env(draw_lambdas(options.master_seed, s, cell.n, options.lambda_lo, options.lambda_hi),
                             derive_seed(options.master_seed, s, kTagEnvironment));
    BanditConfig config;
    config.budget = cell.budget;
    config.n_agents = cell.n;
    config.batch_size = cell.batch;
    config.horizon = options.horizon;
    config.rate_grid = options.rate_grid;
    config.rng_seed = derive_seed(options.master_seed, s, kTagLearner);
    config.init = options.init;
    config.optimism = options.optimism;
    traces[job] = run_bandit(config, env).trace;
  });

  std::vector<RegretCell> out;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    RegretCell cell;
    cell.budget = cells[c].budget;
    cell.n_agents = cells[c].n;
    cell.batch_size = cells[c].batch;
    const RegretTrace& first = traces[c * seeds];
    const std::size_t batches = first.batches();
    cell.t = first.t;
    cell.mean_cumulative_regret.assign(batches, 0.0);
    cell.mean_round_regret.assign(batches, 0.0);
    const double inv = 1.0 / static_cast<double>(seeds);
    for (std::size_t s = 0; s < seeds; ++s) {
      const RegretTrace& tr = traces[c * seeds + s];
      for (std::size_t k = 0; k < batches; ++k) {
        cell.mean_cumulative_regret[k] += inv * tr.cumulative_regret[k];
        cell.mean_round_regret[k] += inv * tr.per_round_regret[k];
      }
      cell.head_regret += inv * tr.mean_regret_head(0.1);
      cell.tail_regret += inv * tr.mean_regret_tail(0.1);
      cell.optimal += inv * tr.per_round_optimal;
      const double achieved = tr.mean_achieved_tail(0.1);
      cell.achieved_tail += inv * achieved;
      cell.tail_ratio += inv * (tr.per_round_optimal > 0.0 ? achieved / tr.per_round_optimal : 1.0);
    }
    out.push_back(std::move(cell));
  }
  return out;
}

namespace {

nlohmann::json cell_json(const RegretCell& c) {
  return {{"batch_size", c.batch_size},
          {"n_agents", c.n_agents},
          {"budget", c.budget},
          {"batches", c.t.size()},
          {"mean_regret_first_10pct", c.head_regret},
          {"mean_regret_last_10pct", c.tail_regret},
          {"sublinearity_ratio", c.sublinearity()},
          {"total_regret", c.mean_cumulative_regret.empty() ? 0.0 : c.mean_cumulative_regret.back()},
          {"optimal_reduction", c.optimal},
          {"achieved_reduction_last_10pct", c.achieved_tail},
          {"reduction_ratio", c.tail_ratio}};
}

nlohmann::json options_json(const SweepOptions& o) {
  return {{"batch_sizes", o.batch_sizes}, {"agent_counts", o.agent_counts}, {"budgets", o.budgets},
          {"horizon", o.horizon},         {"seeds", o.seeds},               {"master_seed", o.master_seed},
          {"lambda_max", o.rate_grid.lambda_max}, {"grid_step", o.rate_grid.step},
          {"lambda_range", {o.lambda_lo, o.lambda_hi}}};
}

}  // namespace

std::vector<RegretCell> run_exp1(const SweepOptions& options, const std::string& out_dir) {
  ensure_dir(out_dir);
  auto cells = run_regret_sweep(options);
  nlohmann::json summary = {{"options", options_json(options)}, {"cells", nlohmann::json::array()}};
  for (const auto& c : cells) {
    std::ostringstream csv;
    csv << "t,regret_cum,regret_round\n";
    for (std::size_t k = 0; k < c.t.size(); ++k)
      csv << fmt::format("{},{:.10f},{:.10f}\n", c.t[k], c.mean_cumulative_regret[k], c.mean_round_regret[k]);
    const std::string name = options.budgets.size() > 1
                                 ? fmt::format("exp1_b{}_bs{}_n{}.csv", c.budget, c.batch_size, c.n_agents)
                                 : fmt::format("exp1_bs{}_n{}.csv", c.batch_size, c.n_agents);
    write_file(join(out_dir, name), csv.str());
    summary["cells"].push_back(cell_json(c));
  }
  write_file(join(out_dir, "exp1_summary.json"), summary.dump(2) + "\n");
  return cells;
}

SweepOptions exp2_defaults() {
  SweepOptions o;
  o.batch_sizes = {50};
  o.agent_counts = {4, 5, 6};
  o.budgets = {2, 3, 4, 5, 6, 7, 8};
  return o;
}

std::vector<RegretCell> run_exp2(const SweepOptions& options, const std::string& out_dir) {
  ensure_dir(out_dir);
  auto cells = run_regret_sweep(options);
  std::ostringstream csv;
  csv << "b,n,batch_size,optimal,achieved,ratio\n";
  nlohmann::json summary = {{"options", options_json(options)}, {"cells", nlohmann::json::array()}};
  double worst = 1.0;
  for (const auto& c : cells) {
    csv << fmt::format("{},{},{},{:.10f},{:.10f},{:.10f}\n", c.budget, c.n_agents, c.batch_size, c.optimal,
                       c.achieved_tail, c.tail_ratio);
    summary["cells"].push_back(cell_json(c));
    worst = std::min(worst, c.tail_ratio);
  }
  summary["min_reduction_ratio"] = worst;
  write_file(join(out_dir, "exp2_cells.csv"), csv.str());
  write_file(join(out_dir, "exp2_summary.json"), summary.dump(2) + "\n");
  return cells;
}

const StrategySummary& GridSweep::mean_of(const std::string& strategy) const {
  for (const auto& s : mean)
    if (s.strategy == strategy) return s;
  throw std::out_of_range("GridSweep: unknown strategy " + strategy);
}

double GridSweep::reduction_vs_baseline(const std::string& strategy) const {
  const double none = mean_of("no-discount").last_peak1_daily;
  const double base = none - mean_of("baseline").last_peak1_daily;
  return base > 0.0 ? (none - mean_of(strategy).last_peak1_daily) / base : 0.0;
}

GridSweep run_grid_sweep(const GridConfig& config, int seeds, std::uint64_t master_seed, int workers) {
  if (seeds < 1) throw ArgumentError("grid sweep: seeds must be >= 1");
  config.validate();
  GridSweep sweep;
  sweep.runs.resize(static_cast<std::size_t>(seeds));
  parallel_for(sweep.runs.size(), resolve_workers(workers), [&](std::size_t s) {
    GridReport report = run_grid_experiment(config, derive_seed(master_seed, s, kTagGrid));
    for (const auto& run : report.runs) sweep.runs[s].push_back(run.summary);
    if (s == 0) sweep.first = std::move(report);
  });

  const double inv = 1.0 / seeds;
  for (std::size_t k = 0; k < kGridStrategies.size(); ++k) {
    StrategySummary m;
    m.strategy = kGridStrategies[k];
    for (const auto& seed_runs : sweep.runs) {
      const StrategySummary& r = seed_runs[k];
      m.peak1_total += inv * r.peak1_total;
      m.peak2_total += inv * r.peak2_total;
      m.peak1_daily += inv * r.peak1_daily;
      m.peak2_daily += inv * r.peak2_daily;
      m.penalty_total += inv * r.penalty_total;
      m.penalty_per_window += inv * r.penalty_per_window;
      m.last_peak1_daily += inv * r.last_peak1_daily;
      m.last_peak2_daily += inv * r.last_peak2_daily;
      m.last_penalty_per_window += inv * r.last_penalty_per_window;
    }
    sweep.mean.push_back(m);
  }
  return sweep;
}

void write_grid_sweep(const GridSweep& sweep, const GridConfig& config, const std::string& out_dir) {
  ensure_dir(out_dir);
  for (const auto& run : sweep.first.runs) {
    std::ostringstream csv;
    write_windows_csv(csv, run.windows);
    write_file(join(out_dir, "gridsim_" + run.summary.strategy + ".csv"), csv.str());
  }

  std::ostringstream csv;
  csv << "strategy,peak1_daily,peak2_daily,penalty_per_window,last10_peak1_daily,last10_peak2_daily,"
         "last10_penalty_per_window,peak1_total,peak2_total,penalty_total\n";
  nlohmann::json strategies = nlohmann::json::array();
  for (const auto& m : sweep.mean) {
    csv << fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", m.strategy,
                       m.peak1_daily, m.peak2_daily, m.penalty_per_window, m.last_peak1_daily, m.last_peak2_daily,
                       m.last_penalty_per_window, m.peak1_total, m.peak2_total, m.penalty_total);
    strategies.push_back({{"strategy", m.strategy},
                          {"last10_peak1_daily", m.last_peak1_daily},
                          {"last10_penalty_per_window", m.last_penalty_per_window},
                          {"peak1_daily", m.peak1_daily},
                          {"penalty_total", m.penalty_total},
                          {"last10_peak1_reduction_vs_baseline", sweep.reduction_vs_baseline(m.strategy)}});
  }
  write_file(join(out_dir, "gridsim_comparison.csv"), csv.str());

  nlohmann::json summary = {{"seeds", sweep.runs.size()},
                            {"config", nlohmann::json::parse(grid_config_to_json(config))},
                            {"strategies", strategies}};
  write_file(join(out_dir, "gridsim_summary.json"), summary.dump(2) + "\n");
}

}  // namespace expresponse
