#include "expresponse/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace expresponse {

void BanditConfig::validate() const {
  if (budget < 1) throw ArgumentError("BanditConfig: budget must be >= 1");
  if (n_agents < 1) throw ArgumentError("BanditConfig: n_agents must be >= 1");
  if (batch_size < 1) throw ArgumentError("BanditConfig: batch_size must be >= 1");
  if (horizon < batch_size) throw ArgumentError("BanditConfig: horizon must be >= batch_size");
  rate_grid.validate();
  if (initial_lambda_plus && initial_lambda_plus->size() != n_agents)
    throw DimensionError("BanditConfig: initial_lambda_plus length differs from n_agents");
}

BernoulliEnvironment::BernoulliEnvironment(Eigen::VectorXd lambdas, std::uint64_t seed)
    : lambdas_(std::move(lambdas)), rng_(seed) {
  for (Eigen::Index i = 0; i < lambdas_.size(); ++i)
    if (!(lambdas_(i) >= 0.0)) throw DomainError("BernoulliEnvironment: negative lambda");
}

std::vector<AgentProfile> BernoulliEnvironment::profiles() const {
  std::vector<AgentProfile> out;
  out.reserve(static_cast<std::size_t>(lambdas_.size()));
  for (Eigen::Index i = 0; i < lambdas_.size(); ++i)
    out.push_back({static_cast<int>(i), lambdas_(i), 1, 1.0});
  return out;
}

Eigen::VectorXd BernoulliEnvironment::observe(const Allocation& alloc, int batch_size) {
  if (alloc.size() != lambdas_.size()) throw DimensionError("BernoulliEnvironment: allocation size");
  Eigen::VectorXd successes = Eigen::VectorXd::Zero(lambdas_.size());
  for (Eigen::Index i = 0; i < lambdas_.size(); ++i) {
    if (alloc.units(i) == 0) continue;
    const double p = reduction_probability(lambdas_(i), double(alloc.units(i)));
    std::binomial_distribution<int> draw(batch_size, p);
    successes(i) = draw(rng_);
  }
  return successes;
}

namespace {

double mean_of(const std::vector<double>& v, std::size_t begin, std::size_t end) {
  if (end <= begin) return 0.0;
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(begin),
                         v.begin() + static_cast<std::ptrdiff_t>(end), 0.0) /
         static_cast<double>(end - begin);
}

std::size_t window_count(std::size_t batches, double fraction) {
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(batches)));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(batches, 1));
}

}  // namespace

double RegretTrace::mean_regret_head(double fraction) const {
  return mean_of(per_round_regret, 0, window_count(batches(), fraction));
}

double RegretTrace::mean_regret_tail(double fraction) const {
  return mean_of(per_round_regret, batches() - window_count(batches(), fraction), batches());
}

double RegretTrace::mean_achieved_tail(double fraction) const {
  return mean_of(per_round_achieved, batches() - window_count(batches(), fraction), batches());
}

RegretTrace compute_regret(const Eigen::Ref<const Eigen::VectorXd>& true_lambdas,
                           const std::vector<Allocation>& played, int batch_size,
                           const std::vector<AgentProfile>* weighted_profiles) {
  if (batch_size < 1) throw ArgumentError("compute_regret: batch_size must be >= 1");
  RegretTrace trace;
  trace.batch_size = batch_size;
  if (played.empty()) return trace;

  const int budget = played.front().budget;
  Eigen::VectorXd usage = Eigen::VectorXd::Ones(true_lambdas.size());
  Allocation optimal;
  if (weighted_profiles) {
    if (static_cast<Eigen::Index>(weighted_profiles->size()) != true_lambdas.size())
      throw DimensionError("compute_regret: profile count differs from lambda count");
    std::vector<AgentProfile> truth = *weighted_profiles;
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i].lambda = true_lambdas(static_cast<Eigen::Index>(i));
    optimal = optimal_weighted_allocate(truth, budget);
    usage = usages_of(truth);
  } else {
    optimal = mjs_allocate(true_lambdas, budget);
  }
  trace.per_round_optimal = expected_reduction(true_lambdas, usage, optimal.units);

  double cumulative = 0.0;
  std::int64_t t = 0;
  for (const auto& alloc : played) {
    const double achieved = expected_reduction(true_lambdas, usage, alloc.units);
    double regret = trace.per_round_optimal - achieved;
    // Equal-objective allocations may differ in the last bits of the sum.
    if (std::abs(regret) < 1e-12) regret = 0.0;
    t += batch_size;
    cumulative += regret * batch_size;
    trace.t.push_back(t);
    trace.per_round_achieved.push_back(achieved);
    trace.per_round_regret.push_back(regret);
    trace.cumulative_regret.push_back(cumulative);
  }
  return trace;
}

Allocation learner_allocation(const BanditConfig& config, const std::vector<AgentProfile>& true_profiles,
                              const EstimatorState& state) {
  const auto& hi = state.lambda_hat_plus;
  if (config.optimism == Optimism::JumpInterval) {
    const auto& lo = state.lambda_hat_minus;
    if (!config.weighted) return mjs_allocate_interval(lo, hi, config.budget);
    return weighted_mjs_allocate_interval(true_profiles, lo, hi, config.budget, config.selection);
  }
  if (!config.weighted) return mjs_allocate(hi, config.budget);
  std::vector<AgentProfile> believed = true_profiles;
  for (std::size_t i = 0; i < believed.size(); ++i) believed[i].lambda = hi(static_cast<Eigen::Index>(i));
  return weighted_mjs_allocate(believed, config.budget, config.selection);
}

BanditResult run_bandit(const BanditConfig& config, Environment& env) {
  config.validate();
  const std::vector<AgentProfile> truth = env.profiles();
  if (static_cast<int>(truth.size()) != config.n_agents)
    throw SetupError("run_bandit: environment exposes " + std::to_string(truth.size()) +
                     " agents, config expects " + std::to_string(config.n_agents));

  const Eigen::Index n = config.n_agents;
  const RateFitter fitter(config.rate_grid, config.budget);
  BanditResult result;
  result.history = History(n, config.budget);
  result.state = {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Constant(n, config.rate_grid.lambda_max),
                  Eigen::VectorXd::Zero(n)};

  if (config.initial_lambda_plus) {
    result.state.lambda_hat_plus = *config.initial_lambda_plus;
    result.state.lambda_hat = *config.initial_lambda_plus;
    result.state.lambda_hat_minus = *config.initial_lambda_plus;
  } else if (config.init == InitMode::Random) {
    std::mt19937_64 init_rng(config.rng_seed);
    std::uniform_int_distribution<Eigen::Index> pick(0, config.rate_grid.size() - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = config.rate_grid.at(pick(init_rng));
      const double b = config.rate_grid.at(pick(init_rng));
      result.state.lambda_hat(i) = std::min(a, b);
      result.state.lambda_hat_minus(i) = std::min(a, b);
      result.state.lambda_hat_plus(i) = std::max(a, b);
    }
  }

  const std::int64_t horizon = config.effective_horizon();
  result.allocations.reserve(static_cast<std::size_t>(horizon / config.batch_size));
  for (std::int64_t t = 0; t < horizon; t += config.batch_size) {
    Allocation alloc = learner_allocation(config, truth, result.state);
    const Eigen::VectorXd successes = env.observe(alloc, config.batch_size);
    result.history = record_batch(std::move(result.history), alloc, config.batch_size, successes);
    if (!config.freeze_estimator) result.state = fitter.fit(result.history);
    result.allocations.push_back(std::move(alloc));
  }

  result.trace = compute_regret(lambdas_of(truth), result.allocations, config.batch_size,
                                config.weighted ? &truth : nullptr);
  return result;
}

}  // namespace expresponse
