// Command-line runner: single allocations, single learning runs, the regret
// sweeps and the grid comparison. Every command is deterministic given --seed.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "expresponse/allocator.hpp"
#include "expresponse/bandit.hpp"
#include "expresponse/errors.hpp"
#include "expresponse/experiments.hpp"
#include "expresponse/gridsim.hpp"
#include "expresponse/io.hpp"

using namespace expresponse;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitFailure = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_units(const Eigen::VectorXi& units) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < units.size(); ++i) s += (i ? ", " : "") + std::to_string(units(i));
  return s + "]";
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

SelectionCriterion parse_selection(const std::string& s) {
  return s == "raw" ? SelectionCriterion::RawJump : SelectionCriterion::UsageWeighted;
}

Optimism parse_optimism(const std::string& s) {
  return s == "rate-ucb" ? Optimism::RateUpperBound : Optimism::JumpInterval;
}

struct AllocateArgs {
  std::vector<double> lambdas;
  std::vector<int> weights;
  std::vector<double> usages;
  std::string config;
  int budget = 0;
  bool weighted = false;
  std::string selection = "usage";
};

int cmd_allocate(const AllocateArgs& a) {
  if (a.budget < 1) throw UsageError("--budget must be >= 1");
  std::vector<AgentProfile> profiles;
  if (!a.config.empty()) {
    const GridConfig cfg = grid_config_from_json(read_file(a.config));
    GridEnvironment env(cfg, 0);
    profiles = env.profiles();
  } else {
    if (a.lambdas.empty()) throw UsageError("one of --lambdas or --config is required");
    if (!a.weights.empty() && a.weights.size() != a.lambdas.size())
      throw UsageError("--weights must have one entry per lambda");
    if (!a.usages.empty() && a.usages.size() != a.lambdas.size())
      throw UsageError("--usages must have one entry per lambda");
    for (std::size_t i = 0; i < a.lambdas.size(); ++i) {
      AgentProfile p{static_cast<int>(i), a.lambdas[i], a.weights.empty() ? 1 : a.weights[i],
                     a.usages.empty() ? 1.0 : a.usages[i]};
      p.validate();
      profiles.push_back(p);
    }
  }

  const Allocation alloc = a.weighted ? weighted_mjs_allocate(profiles, a.budget, parse_selection(a.selection))
                                      : mjs_allocate(lambdas_of(profiles), a.budget);
  const double objective = expected_reduction(profiles, alloc, a.weighted);
  std::cout << fmt::format("c = {}, objective = {:.6f}\n", format_units(alloc.units), objective);

  std::cout << "agent,lambda,weight,peak_usage,units,p(c),next_jump\n";
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    const int c = alloc.units(static_cast<Eigen::Index>(i));
    std::cout << fmt::format("{},{:.6f},{},{:.6f},{},{:.6f},{:.6f}\n", i, p.lambda, p.weight, p.peak_usage, c,
                             reduction_probability(p.lambda, double(c)), jump(p.lambda, double(c)));
  }
  return 0;
}

struct SweepArgs {
  std::vector<int> budgets;
  std::vector<int> agents;
  std::vector<int> batch_sizes;
  std::int64_t horizon = 200'000;
  int seeds = 25;
  std::uint64_t seed = 1;
  double lambda_max = 3.0;
  double grid_step = 0.01;
  std::string out = "out";
  std::string optimism = "interval";
  bool random_init = false;
};

SweepOptions sweep_options(const SweepArgs& a, SweepOptions o) {
  if (!a.budgets.empty()) o.budgets = a.budgets;
  if (!a.agents.empty()) o.agent_counts = a.agents;
  if (!a.batch_sizes.empty()) o.batch_sizes = a.batch_sizes;
  o.horizon = a.horizon;
  o.seeds = a.seeds;
  o.master_seed = a.seed;
  o.rate_grid = {a.lambda_max, a.grid_step};
  o.optimism = parse_optimism(a.optimism);
  o.init = a.random_init ? InitMode::Random : InitMode::Optimistic;
  return o;
}

void validate_sweep(const SweepOptions& o) {
  try {
    o.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const std::domain_error& e) {
    throw UsageError(e.what());
  }
}

int cmd_exp1(const SweepArgs& a) {
  SweepOptions o = sweep_options(a, SweepOptions{});
  validate_sweep(o);
  const auto cells = run_exp1(o, a.out);
  std::cout << "b,n,batch_size,head_regret,tail_regret,tail/head\n";
  for (const auto& c : cells)
    std::cout << fmt::format("{},{},{},{:.6f},{:.6f},{:.4f}\n", c.budget, c.n_agents, c.batch_size, c.head_regret,
                             c.tail_regret, c.sublinearity());
  return 0;
}

int cmd_exp2(const SweepArgs& a) {
  SweepOptions o = sweep_options(a, exp2_defaults());
  validate_sweep(o);
  const auto cells = run_exp2(o, a.out);
  std::cout << "b,n,optimal,achieved,ratio\n";
  for (const auto& c : cells)
    std::cout << fmt::format("{},{},{:.6f},{:.6f},{:.4f}\n", c.budget, c.n_agents, c.optimal, c.achieved_tail,
                             c.tail_ratio);
  return 0;
}

struct BanditArgs {
  std::vector<double> lambdas;
  int agents = 5;
  int budget = 5;
  int batch_size = 50;
  std::int64_t horizon = 200'000;
  std::uint64_t seed = 1;
  double lambda_max = 3.0;
  double grid_step = 0.01;
  std::string out = "out";
  std::string optimism = "interval";
  bool random_init = false;
};

int cmd_bandit(const BanditArgs& a) {
  const Eigen::VectorXd lambdas = a.lambdas.empty() ? draw_lambdas(a.seed, 0, a.agents) : to_vector(a.lambdas);
  BanditConfig config;
  config.budget = a.budget;
  config.n_agents = static_cast<int>(lambdas.size());
  config.batch_size = a.batch_size;
  config.horizon = a.horizon;
  config.rate_grid = {a.lambda_max, a.grid_step};
  config.rng_seed = derive_seed(a.seed, 0, 3);
  config.optimism = parse_optimism(a.optimism);
  config.init = a.random_init ? InitMode::Random : InitMode::Optimistic;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  BernoulliEnvironment env(lambdas, derive_seed(a.seed, 0, 2));
  const BanditResult result = run_bandit(config, env);

  std::filesystem::create_directories(a.out);
  std::ostringstream csv;
  write_trace_csv(csv, result.trace, result.allocations);
  write_file(a.out + "/bandit_trace.csv", csv.str());
  write_file(a.out + "/bandit_summary.json", bandit_summary_json(config, result) + "\n");
  write_file(a.out + "/bandit_history.json", history_to_json(result.history) + "\n");

  const auto& tr = result.trace;
  std::cout << fmt::format("final c = {}, optimal per round = {:.6f}, total regret = {:.4f}\n",
                           format_units(result.allocations.back().units), tr.per_round_optimal,
                           tr.cumulative_regret.back());
  std::cout << "agent,lambda,lambda_hat,lambda_hat_plus\n";
  for (Eigen::Index i = 0; i < lambdas.size(); ++i)
    std::cout << fmt::format("{},{:.4f},{:.4f},{:.4f}\n", i, lambdas(i), result.state.lambda_hat(i),
                             result.state.lambda_hat_plus(i));
  return 0;
}

struct GridArgs {
  std::string config;
  std::optional<int> weeks;
  std::optional<double> scale;
  std::optional<int> budget;
  std::optional<double> lambda_max;
  std::optional<double> grid_step;
  int seeds = 20;
  std::uint64_t seed = 1;
  std::string out = "out";
  std::string selection = "usage";
  std::string optimism = "interval";
  bool random_init = false;
};

int cmd_gridsim(const GridArgs& a) {
  GridConfig cfg = a.config.empty() ? GridConfig::defaults() : grid_config_from_json(read_file(a.config));
  if (a.weeks) cfg.weeks = *a.weeks;
  if (a.scale) cfg.scale = *a.scale;
  if (a.budget) cfg.budget = *a.budget;
  if (a.lambda_max) cfg.rate_grid.lambda_max = *a.lambda_max;
  if (a.grid_step) cfg.rate_grid.step = *a.grid_step;
  cfg.selection = parse_selection(a.selection);
  cfg.optimism = parse_optimism(a.optimism);
  cfg.init = a.random_init ? InitMode::Random : InitMode::Optimistic;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const GridSweep sweep = run_grid_sweep(cfg, a.seeds, a.seed);
  write_grid_sweep(sweep, cfg, a.out);

  std::cout << fmt::format("{:<12} {:>12} {:>12} {:>14} {:>12} {:>12} {:>14}\n", "strategy", "peak1/day",
                           "peak2/day", "penalty/win", "last10 p1", "last10 p2", "last10 pen");
  for (const auto& m : sweep.mean)
    std::cout << fmt::format("{:<12} {:>12.3f} {:>12.3f} {:>14.2f} {:>12.3f} {:>12.3f} {:>14.2f}\n", m.strategy,
                             m.peak1_daily, m.peak2_daily, m.penalty_per_window, m.last_peak1_daily,
                             m.last_peak2_daily, m.last_penalty_per_window);
  std::cout << fmt::format("last-10-weeks peak1 reduction vs baseline: learner-uw {:.2f}x, learner-w {:.2f}x\n",
                           sweep.reduction_vs_baseline("learner-uw"), sweep.reduction_vs_baseline("learner-w"));
  return 0;
}

void add_grid_flags(CLI::App* cmd, double& lambda_max, double& grid_step) {
  cmd->add_option("--lambda-max", lambda_max, "Upper end of the rate grid")->check(CLI::PositiveNumber);
  cmd->add_option("--grid-step", grid_step, "Rate grid spacing")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential-response discount allocation and learning experiments"};
  app.require_subcommand(1);
  const std::vector<std::string> optimism_names{"interval", "rate-ucb"};
  const std::vector<std::string> selection_names{"usage", "raw"};

  AllocateArgs alloc;
  auto* allocate = app.add_subcommand("allocate", "Greedy allocation for known rates");
  allocate->add_option("--lambdas", alloc.lambdas, "Comma-separated reduction rates")->delimiter(',');
  allocate->add_option("--weights", alloc.weights, "Per-agent discount block sizes (weighted mode)")->delimiter(',');
  allocate->add_option("--usages", alloc.usages, "Per-agent peak usage, kWh (weighted mode)")->delimiter(',');
  allocate->add_option("--config", alloc.config, "Group config JSON; profiles use rate x scale")
      ->check(CLI::ExistingFile);
  allocate->add_option("--budget", alloc.budget, "Discount units")->required();
  allocate->add_flag("--weighted", alloc.weighted, "Weighted block allocation");
  allocate->add_option("--selection", alloc.selection, "Weighted ranking: usage or raw")
      ->check(CLI::IsMember(selection_names));

  auto add_sweep = [&](CLI::App* cmd, SweepArgs& s) {
    cmd->add_option("--budget", s.budgets, "Budget(s), comma-separated")->delimiter(',');
    cmd->add_option("--agents", s.agents, "Agent count(s), comma-separated")->delimiter(',');
    cmd->add_option("--batch-size", s.batch_sizes, "Batch size(s), comma-separated")
        ->delimiter(',');
    cmd->add_option("--horizon", s.horizon, "Rounds per run")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seeds", s.seeds, "Seeds per cell")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", s.seed, "Master seed")->capture_default_str();
    add_grid_flags(cmd, s.lambda_max, s.grid_step);
    cmd->add_option("--out", s.out, "Output directory")->capture_default_str();
    cmd->add_option("--optimism", s.optimism, "interval or rate-ucb")->capture_default_str()->check(CLI::IsMember(optimism_names));
    cmd->add_flag("--random-init", s.random_init, "Random initial rate estimates");
  };
  SweepArgs e1, e2;
  auto* exp1 = app.add_subcommand("exp1", "Regret curves across batch sizes and agent counts");
  add_sweep(exp1, e1);
  auto* exp2 = app.add_subcommand("exp2", "Achieved vs optimal reduction across budgets and agent counts");
  add_sweep(exp2, e2);

  BanditArgs b;
  auto* bandit = app.add_subcommand("bandit", "One learning run with trace, summary and history output");
  bandit->add_option("--lambdas", b.lambdas, "True rates; drawn from --seed when omitted")->delimiter(',');
  bandit->add_option("--agents", b.agents, "Agent count when rates are drawn")->capture_default_str()->check(CLI::PositiveNumber);
  bandit->add_option("--budget", b.budget, "Discount units")->capture_default_str()->check(CLI::PositiveNumber);
  bandit->add_option("--batch-size", b.batch_size, "Rounds per batch")->capture_default_str()->check(CLI::PositiveNumber);
  bandit->add_option("--horizon", b.horizon, "Rounds")->capture_default_str()->check(CLI::PositiveNumber);
  bandit->add_option("--seed", b.seed, "Seed")->capture_default_str();
  add_grid_flags(bandit, b.lambda_max, b.grid_step);
  bandit->add_option("--out", b.out, "Output directory")->capture_default_str();
  bandit->add_option("--optimism", b.optimism, "interval or rate-ucb")->capture_default_str()->check(CLI::IsMember(optimism_names));
  bandit->add_flag("--random-init", b.random_init, "Random initial rate estimates");

  GridArgs g;
  double g_lambda_max = 0.0, g_grid_step = 0.0;
  auto* gridsim = app.add_subcommand("gridsim", "Four-strategy grid comparison");
  gridsim->add_option("--config", g.config, "Group config JSON")->check(CLI::ExistingFile);
  auto* weeks = gridsim->add_option("--weeks", "Simulated weeks")->check(CLI::PositiveNumber);
  auto* scale = gridsim->add_option("--scale", "Tariff percent per discount unit")->check(CLI::PositiveNumber);
  auto* gbudget = gridsim->add_option("--budget", "Discount units per window")->check(CLI::PositiveNumber);
  auto* glmax = gridsim->add_option("--lambda-max", g_lambda_max, "Upper end of the rate grid")
                    ->check(CLI::PositiveNumber);
  auto* gstep = gridsim->add_option("--grid-step", g_grid_step, "Rate grid spacing")->check(CLI::PositiveNumber);
  gridsim->add_option("--seeds", g.seeds, "Seeds")->capture_default_str()->check(CLI::PositiveNumber);
  gridsim->add_option("--seed", g.seed, "Master seed")->capture_default_str();
  gridsim->add_option("--out", g.out, "Output directory")->capture_default_str();
  gridsim->add_option("--selection", g.selection, "Weighted ranking: usage or raw")->capture_default_str()
      ->check(CLI::IsMember(selection_names));
  gridsim->add_option("--optimism", g.optimism, "interval or rate-ucb")->capture_default_str()->check(CLI::IsMember(optimism_names));
  gridsim->add_flag("--random-init", g.random_init, "Random initial rate estimates");
  bool weighted_only = false;
  gridsim->add_flag("--weighted", weighted_only, "Accepted for symmetry; the grid run always includes both learners");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*allocate) return cmd_allocate(alloc);
    if (*exp1) return cmd_exp1(e1);
    if (*exp2) return cmd_exp2(e2);
    if (*bandit) return cmd_bandit(b);
    if (*gridsim) {
      if (*weeks) g.weeks = weeks->as<int>();
      if (*scale) g.scale = scale->as<double>();
      if (*gbudget) g.budget = gbudget->as<int>();
      if (*glmax) g.lambda_max = g_lambda_max;
      if (*gstep) g.grid_step = g_grid_step;
      return cmd_gridsim(g);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SchemaError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
