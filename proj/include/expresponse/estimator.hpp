#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "expresponse/response_model.hpp"

namespace expresponse {

/// Offer and success mass per agent (rows) and discount level (columns, level c in column c-1).
struct History {
  Eigen::MatrixXd offered;
  Eigen::MatrixXd success;
  std::int64_t rounds_elapsed = 0;

  History() = default;
  History(Eigen::Index n, int budget)
      : offered(Eigen::MatrixXd::Zero(n, budget)), success(Eigen::MatrixXd::Zero(n, budget)) {}

  Eigen::Index agents() const { return offered.rows(); }
  int levels() const { return static_cast<int>(offered.cols()); }
};

/// Candidate rates k*step for k = 0..K, K = round(lambda_max/step).
struct RateGrid {
  double lambda_max = 3.0;
  double step = 0.01;

  void validate() const;
  Eigen::Index size() const;
  double at(Eigen::Index k) const { return static_cast<double>(k) * step; }
};

struct EstimatorState {
  Eigen::VectorXd lambda_hat;
  Eigen::VectorXd lambda_hat_plus;
  // Lower confidence rate, fit to max(0, p_hat - bonus). Together with
  // lambda_hat_plus it bounds the rates the learner still considers plausible.
  Eigen::VectorXd lambda_hat_minus;
};

// Adds one batch: offered(i, c_i) += batch_size, success(i, c_i) += successes(i)
// for agents with c_i >= 1, and advances rounds_elapsed by batch_size.
History record_batch(History history, const Allocation& alloc, int batch_size,
                     const Eigen::Ref<const Eigen::VectorXd>& successes);

/// success/offered at level c (1-based), or nullopt when the level was never offered.
std::optional<double> empirical_rate(const History& history, Eigen::Index agent, int c);

/// sqrt(2 ln t / offered), with ln t clamped to 0 for t < 2.
double confidence_bonus(double offered, std::int64_t rounds_elapsed);

/// Upper-confidence target min(1, p_hat + bonus).
double optimistic_rate(double p_hat, double offered, std::int64_t rounds_elapsed);

/// Lower-confidence target max(0, p_hat - bonus).
double pessimistic_rate(double p_hat, double offered, std::int64_t rounds_elapsed);

// Least-squares fit of the exponential model over a rate grid, by exhaustive scan.
// Holds the model table 1 - exp(-l*c) for every grid point and level so repeated
// fits cost only arithmetic.
class RateFitter {
 public:
  RateFitter(RateGrid grid, int budget);

  const RateGrid& grid() const { return grid_; }
  int budget() const { return budget_; }

  // Grid index minimizing sum_c weight(c) * (target(c) - model(l, c))^2. Levels
  // with zero weight are skipped; the first (smallest) minimizing rate wins.
  Eigen::Index argmin(const Eigen::Ref<const Eigen::VectorXd>& target,
                      const Eigen::Ref<const Eigen::VectorXd>& weight) const;

  // lambda_hat: unit weight on every offered level. lambda_hat_plus/minus: each
  // level weighted by its offer mass, so a level tried once and abandoned
  // cannot hold the confidence bounds open indefinitely.
  EstimatorState fit(const History& history) const;

 private:
  RateGrid grid_;
  int budget_;
  Eigen::MatrixXd model_;  // grid points x levels
};

/// One-shot form of RateFitter::fit.
EstimatorState linear_search(const History& history, const RateGrid& grid, int budget);

}  // namespace expresponse
