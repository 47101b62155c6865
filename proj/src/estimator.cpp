#include "expresponse/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace expresponse {

void RateGrid::validate() const {
  if (!(step > 0.0)) throw ArgumentError("RateGrid: step must be > 0");
  if (!(lambda_max >= step)) throw ArgumentError("RateGrid: lambda_max must be >= step");
}

Eigen::Index RateGrid::size() const {
  return static_cast<Eigen::Index>(std::llround(lambda_max / step)) + 1;
}

History record_batch(History history, const Allocation& alloc, int batch_size,
                     const Eigen::Ref<const Eigen::VectorXd>& successes) {
  if (batch_size < 1) throw ArgumentError("record_batch: batch_size must be >= 1");
  if (alloc.size() != history.agents() || successes.size() != history.agents())
    throw DimensionError("record_batch: allocation/successes do not match history rows");

  for (Eigen::Index i = 0; i < history.agents(); ++i) {
    const int c = alloc.units(i);
    if (c < 0 || c > history.levels())
      throw IndexError("record_batch: discount level " + std::to_string(c) + " outside 0.." +
                       std::to_string(history.levels()));
    if (!(successes(i) >= 0.0) || successes(i) > batch_size)
      throw ConsistencyError("record_batch: agent " + std::to_string(i) +
                             " successes outside [0, batch_size]");
  }
  for (Eigen::Index i = 0; i < history.agents(); ++i) {
    const int c = alloc.units(i);
    if (c == 0) continue;
    history.offered(i, c - 1) += batch_size;
    history.success(i, c - 1) += successes(i);
  }
  history.rounds_elapsed += batch_size;
  return history;
}

std::optional<double> empirical_rate(const History& history, Eigen::Index agent, int c) {
  if (agent < 0 || agent >= history.agents()) throw IndexError("empirical_rate: agent out of range");
  if (c < 1 || c > history.levels()) throw IndexError("empirical_rate: level out of range");
  const double offered = history.offered(agent, c - 1);
  if (offered <= 0.0) return std::nullopt;
  return history.success(agent, c - 1) / offered;
}

double confidence_bonus(double offered, std::int64_t rounds_elapsed) {
  const double log_t = rounds_elapsed < 2 ? 0.0 : std::log(static_cast<double>(rounds_elapsed));
  return std::sqrt(2.0 * log_t / offered);
}

double optimistic_rate(double p_hat, double offered, std::int64_t rounds_elapsed) {
  return std::min(1.0, p_hat + confidence_bonus(offered, rounds_elapsed));
}

double pessimistic_rate(double p_hat, double offered, std::int64_t rounds_elapsed) {
  return std::max(0.0, p_hat - confidence_bonus(offered, rounds_elapsed));
}

RateFitter::RateFitter(RateGrid grid, int budget) : grid_(grid), budget_(budget) {
  grid_.validate();
  if (budget < 1) throw ArgumentError("RateFitter: budget must be >= 1");
  model_.resize(grid_.size(), budget_);
  for (Eigen::Index k = 0; k < model_.rows(); ++k)
    for (int c = 1; c <= budget_; ++c) model_(k, c - 1) = reduction_probability(grid_.at(k), double(c));
}

Eigen::Index RateFitter::argmin(const Eigen::Ref<const Eigen::VectorXd>& target,
                                const Eigen::Ref<const Eigen::VectorXd>& weight) const {
  Eigen::Index best = 0;
  double best_loss = 0.0;
  for (Eigen::Index k = 0; k < model_.rows(); ++k) {
    double loss = 0.0;
    for (Eigen::Index c = 0; c < budget_; ++c) {
      if (weight(c) <= 0.0) continue;
      const double r = target(c) - model_(k, c);
      loss += weight(c) * r * r;
    }
    if (k == 0 || loss < best_loss) {
      best = k;
      best_loss = loss;
    }
  }
  return best;
}

EstimatorState RateFitter::fit(const History& history) const {
  if (history.levels() < budget_) throw DimensionError("linear_search: history has fewer levels than budget");
  const Eigen::Index n = history.agents();
  EstimatorState state{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Constant(n, grid_.lambda_max),
                       Eigen::VectorXd::Zero(n)};

  Eigen::VectorXd target = Eigen::VectorXd::Zero(budget_);
  Eigen::VectorXd target_plus = Eigen::VectorXd::Zero(budget_);
  Eigen::VectorXd target_minus = Eigen::VectorXd::Zero(budget_);
  Eigen::VectorXd present(budget_);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd offered = history.offered.row(i).head(budget_).transpose();
    bool any = false;
    for (int c = 0; c < budget_; ++c) {
      present(c) = offered(c) > 0.0 ? 1.0 : 0.0;
      if (offered(c) <= 0.0) continue;
      any = true;
      target(c) = history.success(i, c) / offered(c);
      target_plus(c) = optimistic_rate(target(c), offered(c), history.rounds_elapsed);
      target_minus(c) = pessimistic_rate(target(c), offered(c), history.rounds_elapsed);
    }
    if (!any) continue;
    state.lambda_hat(i) = grid_.at(argmin(target, present));
    // The bound fits use different weights from the point fit; keep lo <= hat <= hi.
    state.lambda_hat_plus(i) = std::max(state.lambda_hat(i), grid_.at(argmin(target_plus, offered)));
    state.lambda_hat_minus(i) = std::min(state.lambda_hat(i), grid_.at(argmin(target_minus, offered)));
  }
  return state;
}

EstimatorState linear_search(const History& history, const RateGrid& grid, int budget) {
  return RateFitter(grid, budget).fit(history);
}

}  // namespace expresponse
