#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "expresponse/allocator.hpp"
#include "expresponse/estimator.hpp"
#include "expresponse/response_model.hpp"

namespace expresponse {

/// Starting point for the optimistic rates before any data arrives.
enum class InitMode {
  Optimistic,  // lambda_max for every agent
  Random,      // uniform grid point per agent, drawn from the run seed
};

/// What the allocator sees of the estimator's confidence region.
enum class Optimism {
  // Greedy on the largest jump over [lambda_hat_minus, lambda_hat_plus]. Optimistic
  // for every unit, including units past the first where a larger rate means a
  // smaller jump.
  JumpInterval,
  // mjs_allocate(lambda_hat_plus), the plain upper-rate rule.
  RateUpperBound,
};

struct BanditConfig {
  int budget = 5;
  int n_agents = 5;
  int batch_size = 50;
  std::int64_t horizon = 200'000;
  RateGrid rate_grid{};
  std::uint64_t rng_seed = 0;
  bool weighted = false;
  SelectionCriterion selection = SelectionCriterion::UsageWeighted;
  InitMode init = InitMode::Optimistic;
  Optimism optimism = Optimism::JumpInterval;
  // Overrides the initial optimistic rates; with freeze_estimator the learner
  // plays against these forever.
  std::optional<Eigen::VectorXd> initial_lambda_plus;
  bool freeze_estimator = false;

  void validate() const;
  /// Horizon rounded down to a multiple of batch_size.
  std::int64_t effective_horizon() const { return horizon - horizon % batch_size; }
};

/// A source of batched agent responses.
class Environment {
 public:
  virtual ~Environment() = default;

  /// True profiles: lambda per discount unit, weight and peak usage.
  virtual std::vector<AgentProfile> profiles() const = 0;

  // Success mass per agent after holding `alloc` for batch_size rounds. Each
  // entry lies in [0, batch_size].
  virtual Eigen::VectorXd observe(const Allocation& alloc, int batch_size) = 0;

  Eigen::Index agents() const { return static_cast<Eigen::Index>(profiles().size()); }
};

/// Each round agent i reduces independently with probability 1 - exp(-lambda_i c_i).
class BernoulliEnvironment : public Environment {
 public:
  BernoulliEnvironment(Eigen::VectorXd lambdas, std::uint64_t seed);

  std::vector<AgentProfile> profiles() const override;
  Eigen::VectorXd observe(const Allocation& alloc, int batch_size) override;

 private:
  Eigen::VectorXd lambdas_;
  std::mt19937_64 rng_;
};

struct RegretTrace {
  int batch_size = 1;
  double per_round_optimal = 0.0;
  std::vector<std::int64_t> t;            // rounds elapsed at the end of each batch
  std::vector<double> per_round_achieved;
  std::vector<double> per_round_regret;
  std::vector<double> cumulative_regret;  // through t[k]

  std::size_t batches() const { return t.size(); }
  // Mean per-round regret over the first / last `fraction` of batches.
  double mean_regret_head(double fraction) const;
  double mean_regret_tail(double fraction) const;
  double mean_achieved_tail(double fraction) const;
};

/// Per-batch played allocations, scored against the known-rate optimum.
RegretTrace compute_regret(const Eigen::Ref<const Eigen::VectorXd>& true_lambdas,
                           const std::vector<Allocation>& played, int batch_size = 1,
                           const std::vector<AgentProfile>* weighted_profiles = nullptr);

struct BanditResult {
  std::vector<Allocation> allocations;  // one per batch
  History history;
  EstimatorState state;
  RegretTrace trace;
};

// Optimistic learn-and-allocate loop: allocate on the optimistic rates, hold the
// allocation for a batch, record responses, refit.
BanditResult run_bandit(const BanditConfig& config, Environment& env);

/// The allocation the learner plays for a given estimator state.
Allocation learner_allocation(const BanditConfig& config, const std::vector<AgentProfile>& true_profiles,
                              const EstimatorState& state);

}  // namespace expresponse
