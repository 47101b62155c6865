#pragma once

// Synthetic smart-grid stand-in: customer groups with a two-peak daily load
// curve respond to per-group discount signals held fixed over multi-day windows.

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "expresponse/bandit.hpp"

namespace expresponse {

inline constexpr int kHoursPerDay = 24;

struct GroupSpec {
  std::string name;
  double usage_share = 0.0;
  double true_lambda = 0.0;  // per scaled discount (tariff percent)
  int weight = 1;
  std::array<double, kHoursPerDay> base_daily_curve{};
  std::array<int, 2> peak_hours{7, 17};

  double peak_baseline(int rank) const { return base_daily_curve[peak_hours[rank - 1]]; }
  void validate() const;
};

/// Double-bump daily profile shared by all groups, scaled by each group's usage share.
struct CurveParams {
  double system_kwh = 100.0;
  double base = 0.45;
  int peak1_hour = 7;
  double peak1_height = 1.0;
  int peak2_hour = 17;
  double peak2_height = 0.95;
  double width = 1.5;

  std::array<double, kHoursPerDay> curve_for(double usage_share) const;
};

struct PeakObservation {
  int group = 0;
  int peak_rank = 1;
  double baseline_usage = 0.0;  // kWh over the window
  double observed_usage = 0.0;
  double success_prob = 0.0;    // 1 - observed/baseline, clamped to [0, 1]
};

// Linear above threshold: rate * sum over peaks of max(0, demand - threshold),
// demand being the all-group daily peak usage, charged per day of the window.
struct CapacityPenalty {
  double threshold = 0.0;
  double rate = 1000.0;

  double assess(const std::vector<PeakObservation>& observations, int window_days) const;
};

// Runs one window of `window_days` days. For each group, peak and day the
// reduction fraction is clamp(p(lambda, scale*c) + eps, 0, 1) with
// eps ~ U[-noise, noise]. Observations come back group-major, peak 1 first.
std::vector<PeakObservation> step_window(const std::vector<GroupSpec>& groups, const Allocation& discounts,
                                         const DiscountScale& scale, int window_days, double noise,
                                         std::mt19937_64& rng);

/// Mean of the two peak success probabilities per group.
Eigen::VectorXd group_success(const std::vector<PeakObservation>& observations, Eigen::Index groups);

struct GridConfig {
  std::vector<GroupSpec> groups;
  CurveParams curve{};
  double threshold_fraction = 0.95;
  std::optional<double> threshold;  // absolute kWh; overrides threshold_fraction
  double penalty_rate = 1000.0;
  double noise = 0.05;
  int window_days = 3;
  int weeks = 210;
  int budget = 15;
  double scale = 1.0;
  RateGrid rate_grid{0.2, 0.0005};
  int batch_size = 0;  // rounds per window; 0 means window_days * 24 hourly slots
  SelectionCriterion selection = SelectionCriterion::UsageWeighted;
  Optimism optimism = Optimism::JumpInterval;
  InitMode init = InitMode::Optimistic;

  /// Four groups with usage shares 50/25/12/12 and weights 4/2/1/1.
  static GridConfig defaults();

  void validate() const;
  int windows() const { return weeks * 7 / window_days; }
  int rounds_per_window() const { return batch_size > 0 ? batch_size : window_days * kHoursPerDay; }
  CapacityPenalty penalty() const;
};

/// Parses the JSON config. Missing keys keep defaults; wrong types raise SchemaError naming the key.
GridConfig grid_config_from_json(const std::string& text);
std::string grid_config_to_json(const GridConfig& config);

struct WindowRecord {
  int window = 0;
  int week = 0;
  Eigen::VectorXi units;
  std::vector<PeakObservation> observations;
  double penalty = 0.0;
};

/// Feeds window outcomes to the learner as fractional success mass and logs every window.
class GridEnvironment : public Environment {
 public:
  GridEnvironment(const GridConfig& config, std::uint64_t seed);

  std::vector<AgentProfile> profiles() const override;
  Eigen::VectorXd observe(const Allocation& alloc, int batch_size) override;

  const std::vector<WindowRecord>& log() const { return log_; }

 private:
  const GridConfig& config_;
  CapacityPenalty penalty_;
  std::mt19937_64 rng_;
  std::vector<WindowRecord> log_;
};

struct StrategySummary {
  std::string strategy;
  double peak1_total = 0.0;  // kWh summed over windows
  double peak2_total = 0.0;
  double peak1_daily = 0.0;  // mean all-group daily peak usage, kWh
  double peak2_daily = 0.0;
  double penalty_total = 0.0;
  double penalty_per_window = 0.0;
  double last_peak1_daily = 0.0;  // same, final 10 weeks
  double last_peak2_daily = 0.0;
  double last_penalty_per_window = 0.0;
};

struct StrategyRun {
  StrategySummary summary;
  std::vector<WindowRecord> windows;
};

inline const std::array<std::string, 4> kGridStrategies{"no-discount", "baseline", "learner-w", "learner-uw"};

struct GridReport {
  std::vector<StrategyRun> runs;  // in kGridStrategies order
  const StrategyRun& at(const std::string& strategy) const;
};

StrategySummary summarize(const std::string& strategy, const std::vector<WindowRecord>& windows, int weeks,
                          int window_days);

/// Plays all four strategies against identical noise draws.
GridReport run_grid_experiment(const GridConfig& config, std::uint64_t seed);

}  // namespace expresponse
