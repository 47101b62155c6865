#include "expresponse/gridsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace expresponse {

void GroupSpec::validate() const {
  if (!(usage_share > 0.0) || usage_share > 1.0) throw SchemaError("group " + name + ": usage_share outside (0, 1]");
  if (!(true_lambda >= 0.0)) throw SchemaError("group " + name + ": true_lambda must be >= 0");
  if (weight < 1) throw SchemaError("group " + name + ": weight must be >= 1");
  for (double v : base_daily_curve)
    if (!(v >= 0.0)) throw SchemaError("group " + name + ": curve values must be >= 0");
  for (int h : peak_hours)
    if (h < 0 || h >= kHoursPerDay) throw SchemaError("group " + name + ": peak hour outside 0..23");
  if (peak_hours[0] == peak_hours[1]) throw SchemaError("group " + name + ": peak hours must differ");
  if (!(peak_baseline(1) > 0.0) || !(peak_baseline(2) > 0.0))
    throw SchemaError("group " + name + ": peak-hour usage must be > 0");
}

std::array<double, kHoursPerDay> CurveParams::curve_for(double usage_share) const {
  std::array<double, kHoursPerDay> curve{};
  const double two_w2 = 2.0 * width * width;
  for (int h = 0; h < kHoursPerDay; ++h) {
    const double d1 = h - peak1_hour;
    const double d2 = h - peak2_hour;
    curve[static_cast<std::size_t>(h)] =
        usage_share * system_kwh *
        (base + peak1_height * std::exp(-d1 * d1 / two_w2) + peak2_height * std::exp(-d2 * d2 / two_w2));
  }
  return curve;
}

double CapacityPenalty::assess(const std::vector<PeakObservation>& observations, int window_days) const {
  double demand[2] = {0.0, 0.0};
  for (const auto& o : observations) demand[o.peak_rank - 1] += o.observed_usage / window_days;
  double excess = 0.0;
  for (double d : demand) excess += std::max(0.0, d - threshold);
  return rate * window_days * excess;
}

std::vector<PeakObservation> step_window(const std::vector<GroupSpec>& groups, const Allocation& discounts,
                                         const DiscountScale& scale, int window_days, double noise,
                                         std::mt19937_64& rng) {
  if (window_days < 1) throw ArgumentError("step_window: window_days must be >= 1");
  if (static_cast<Eigen::Index>(groups.size()) != discounts.size())
    throw DimensionError("step_window: discount vector does not match group count");

  std::vector<PeakObservation> out;
  out.reserve(groups.size() * 2);
  for (std::size_t g = 0; g < groups.size(); ++g)
    for (int rank = 1; rank <= 2; ++rank) {
      const double hourly = groups[g].peak_baseline(rank);
      out.push_back({static_cast<int>(g), rank, hourly * window_days, 0.0, 0.0});
    }

  std::uniform_real_distribution<double> eps(-noise, noise);
  for (int day = 0; day < window_days; ++day) {
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double p = reduction_probability(groups[g].true_lambda,
                                             scale.apply(discounts.units(static_cast<Eigen::Index>(g))));
      for (int rank = 1; rank <= 2; ++rank) {
        const double r = std::clamp(p + (noise > 0.0 ? eps(rng) : 0.0), 0.0, 1.0);
        out[g * 2 + static_cast<std::size_t>(rank - 1)].observed_usage += groups[g].peak_baseline(rank) * (1.0 - r);
      }
    }
  }
  for (auto& o : out) o.success_prob = std::clamp(1.0 - o.observed_usage / o.baseline_usage, 0.0, 1.0);
  return out;
}

Eigen::VectorXd group_success(const std::vector<PeakObservation>& observations, Eigen::Index groups) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(groups);
  for (const auto& o : observations) p(o.group) += 0.5 * o.success_prob;
  return p;
}

GridConfig GridConfig::defaults() {
  GridConfig config;
  struct Row {
    const char* name;
    double share;
    double lambda;
    int weight;
  };
  // Households respond fastest; offices barely move on small discounts.
  const Row rows[] = {{"G1", 0.50, 0.020, 4}, {"G2", 0.25, 0.004, 2}, {"G3", 0.12, 0.001, 1}, {"G4", 0.12, 0.001, 1}};
  for (const auto& r : rows) {
    GroupSpec g;
    g.name = r.name;
    g.usage_share = r.share;
    g.true_lambda = r.lambda;
    g.weight = r.weight;
    g.base_daily_curve = config.curve.curve_for(r.share);
    g.peak_hours = {config.curve.peak1_hour, config.curve.peak2_hour};
    config.groups.push_back(g);
  }
  return config;
}

void GridConfig::validate() const {
  if (groups.empty()) throw SchemaError("groups: at least one group required");
  double share = 0.0;
  for (const auto& g : groups) {
    g.validate();
    share += g.usage_share;
  }
  if (share > 1.0 + 1e-9) throw SchemaError("groups: usage shares sum to more than 1");
  if (window_days < 1) throw SchemaError("window_days: must be >= 1");
  if (weeks < 1) throw SchemaError("weeks: must be >= 1");
  if (windows() < 1) throw SchemaError("weeks: shorter than one window");
  if (budget < 1) throw SchemaError("budget: must be >= 1");
  if (!(scale > 0.0)) throw SchemaError("scale: must be > 0");
  if (!(noise >= 0.0) || noise > 1.0) throw SchemaError("noise.amplitude: must be in [0, 1]");
  if (!(penalty_rate >= 0.0)) throw SchemaError("penalty.rate: must be >= 0");
  if (batch_size < 0) throw SchemaError("batch_size: must be >= 0");
  if (!(rate_grid.step > 0.0) || !(rate_grid.lambda_max >= rate_grid.step))
    throw SchemaError("rate_grid: need step > 0 and lambda_max >= step");
}

CapacityPenalty GridConfig::penalty() const {
  if (threshold) return {*threshold, penalty_rate};
  // Fraction of the smaller of the two undiscounted all-group peaks, so both
  // peaks are charged when nothing is discounted.
  double demand[2] = {0.0, 0.0};
  for (const auto& g : groups) {
    demand[0] += g.peak_baseline(1);
    demand[1] += g.peak_baseline(2);
  }
  return {threshold_fraction * std::min(demand[0], demand[1]), penalty_rate};
}

namespace {

using nlohmann::json;

template <typename T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string where = path.empty() ? key : path + "." + key;
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) throw SchemaError(where + ": expected string");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw SchemaError(where + ": expected integer");
  } else {
    if (!v.is_number()) throw SchemaError(where + ": expected number");
  }
  out = v.get<T>();
}

const json& object_at(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw SchemaError(where + ": expected object");
  return v;
}

}  // namespace

GridConfig grid_config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("config: top level must be an object");

  GridConfig config = GridConfig::defaults();
  if (root.contains("curve")) {
    const json& c = object_at(root, "curve", "curve");
    read(c, "system_kwh", "curve", config.curve.system_kwh);
    read(c, "base", "curve", config.curve.base);
    read(c, "peak1_hour", "curve", config.curve.peak1_hour);
    read(c, "peak1_height", "curve", config.curve.peak1_height);
    read(c, "peak2_hour", "curve", config.curve.peak2_hour);
    read(c, "peak2_height", "curve", config.curve.peak2_height);
    read(c, "width", "curve", config.curve.width);
  }

  if (root.contains("groups")) {
    const json& groups = root.at("groups");
    if (!groups.is_array()) throw SchemaError("groups: expected array");
    config.groups.clear();
    for (std::size_t i = 0; i < groups.size(); ++i) {
      const std::string where = "groups[" + std::to_string(i) + "]";
      const json& g = groups[i];
      if (!g.is_object()) throw SchemaError(where + ": expected object");
      for (const char* key : {"usage_share", "true_lambda"})
        if (!g.contains(key)) throw SchemaError(where + "." + key + ": missing");
      GroupSpec spec;
      spec.name = "G" + std::to_string(i + 1);
      read(g, "name", where, spec.name);
      read(g, "usage_share", where, spec.usage_share);
      read(g, "true_lambda", where, spec.true_lambda);
      read(g, "weight", where, spec.weight);
      spec.peak_hours = {config.curve.peak1_hour, config.curve.peak2_hour};
      if (g.contains("peak_hours")) {
        const json& ph = g.at("peak_hours");
        if (!ph.is_array() || ph.size() != 2 || !ph[0].is_number_integer() || !ph[1].is_number_integer())
          throw SchemaError(where + ".peak_hours: expected two integer hours");
        spec.peak_hours = {ph[0].get<int>(), ph[1].get<int>()};
      }
      if (g.contains("curve")) {
        const json& cv = g.at("curve");
        if (!cv.is_array() || cv.size() != kHoursPerDay)
          throw SchemaError(where + ".curve: expected 24 numbers");
        for (std::size_t h = 0; h < kHoursPerDay; ++h) {
          if (!cv[h].is_number()) throw SchemaError(where + ".curve: expected 24 numbers");
          spec.base_daily_curve[h] = cv[h].get<double>();
        }
      } else {
        spec.base_daily_curve = config.curve.curve_for(spec.usage_share);
      }
      config.groups.push_back(spec);
    }
  } else if (root.contains("curve")) {
    for (auto& g : config.groups) g.base_daily_curve = config.curve.curve_for(g.usage_share);
  }

  if (root.contains("penalty")) {
    const json& p = object_at(root, "penalty", "penalty");
    read(p, "threshold_fraction", "penalty", config.threshold_fraction);
    read(p, "rate", "penalty", config.penalty_rate);
    if (p.contains("threshold")) {
      double t = 0.0;
      read(p, "threshold", "penalty", t);
      config.threshold = t;
    }
  }
  if (root.contains("noise")) {
    const json& n = object_at(root, "noise", "noise");
    read(n, "amplitude", "noise", config.noise);
  }
  if (root.contains("rate_grid")) {
    const json& r = object_at(root, "rate_grid", "rate_grid");
    read(r, "lambda_max", "rate_grid", config.rate_grid.lambda_max);
    read(r, "step", "rate_grid", config.rate_grid.step);
  }
  read(root, "window_days", "", config.window_days);
  read(root, "weeks", "", config.weeks);
  read(root, "budget", "", config.budget);
  read(root, "scale", "", config.scale);
  read(root, "batch_size", "", config.batch_size);

  config.validate();
  return config;
}

std::string grid_config_to_json(const GridConfig& config) {
  json groups = json::array();
  for (const auto& g : config.groups)
    groups.push_back({{"name", g.name},
                      {"usage_share", g.usage_share},
                      {"true_lambda", g.true_lambda},
                      {"weight", g.weight},
                      {"peak_hours", g.peak_hours},
                      {"curve", g.base_daily_curve}});
  json penalty = {{"threshold_fraction", config.threshold_fraction}, {"rate", config.penalty_rate}};
  if (config.threshold) penalty["threshold"] = *config.threshold;
  json root = {{"groups", groups},
               {"curve",
                {{"system_kwh", config.curve.system_kwh},
                 {"base", config.curve.base},
                 {"peak1_hour", config.curve.peak1_hour},
                 {"peak1_height", config.curve.peak1_height},
                 {"peak2_hour", config.curve.peak2_hour},
                 {"peak2_height", config.curve.peak2_height},
                 {"width", config.curve.width}}},
               {"penalty", penalty},
               {"noise", {{"amplitude", config.noise}}},
               {"rate_grid", {{"lambda_max", config.rate_grid.lambda_max}, {"step", config.rate_grid.step}}},
               {"window_days", config.window_days},
               {"weeks", config.weeks},
               {"budget", config.budget},
               {"scale", config.scale},
               {"batch_size", config.batch_size}};
  return root.dump(2);
}

GridEnvironment::GridEnvironment(const GridConfig& config, std::uint64_t seed)
    : config_(config), penalty_(config.penalty()), rng_(seed) {}

std::vector<AgentProfile> GridEnvironment::profiles() const {
  std::vector<AgentProfile> out;
  for (std::size_t g = 0; g < config_.groups.size(); ++g) {
    const auto& spec = config_.groups[g];
    const double usage = 0.5 * (spec.peak_baseline(1) + spec.peak_baseline(2));
    out.push_back({static_cast<int>(g), spec.true_lambda * config_.scale, spec.weight, usage});
  }
  return out;
}

Eigen::VectorXd GridEnvironment::observe(const Allocation& alloc, int batch_size) {
  const int window = static_cast<int>(log_.size());
  WindowRecord record;
  record.window = window;
  record.week = window * config_.window_days / 7;
  record.units = alloc.units;
  record.observations =
      step_window(config_.groups, alloc, DiscountScale(config_.scale), config_.window_days, config_.noise, rng_);
  record.penalty = penalty_.assess(record.observations, config_.window_days);
  const Eigen::VectorXd success = group_success(record.observations, alloc.size());
  log_.push_back(std::move(record));
  // Agents without a discount still report; record_batch ignores their mass.
  return static_cast<double>(batch_size) * success;
}

const StrategyRun& GridReport::at(const std::string& strategy) const {
  for (const auto& r : runs)
    if (r.summary.strategy == strategy) return r;
  throw std::out_of_range("GridReport: unknown strategy " + strategy);
}

StrategySummary summarize(const std::string& strategy, const std::vector<WindowRecord>& windows, int weeks,
                          int window_days) {
  StrategySummary s;
  s.strategy = strategy;
  const int last_from = std::max(0, weeks - 10);
  int days = 0, last_days = 0, last_windows = 0;
  double last_p1 = 0.0, last_p2 = 0.0, last_pen = 0.0;
  for (const auto& w : windows) {
    double p1 = 0.0, p2 = 0.0;
    for (const auto& o : w.observations) (o.peak_rank == 1 ? p1 : p2) += o.observed_usage;
    s.peak1_total += p1;
    s.peak2_total += p2;
    s.penalty_total += w.penalty;
    days += window_days;
    if (w.week >= last_from) {
      last_p1 += p1;
      last_p2 += p2;
      last_pen += w.penalty;
      last_days += window_days;
      ++last_windows;
    }
  }
  if (days > 0) {
    s.peak1_daily = s.peak1_total / days;
    s.peak2_daily = s.peak2_total / days;
    s.penalty_per_window = s.penalty_total / static_cast<double>(windows.size());
  }
  if (last_days > 0) {
    s.last_peak1_daily = last_p1 / last_days;
    s.last_peak2_daily = last_p2 / last_days;
    s.last_penalty_per_window = last_pen / last_windows;
  }
  return s;
}

GridReport run_grid_experiment(const GridConfig& config, std::uint64_t seed) {
  config.validate();
  const int n = static_cast<int>(config.groups.size());
  const int windows = config.windows();
  const int rounds = config.rounds_per_window();

  GridReport report;
  for (const auto& strategy : kGridStrategies) {
    // Same environment seed for every strategy: common noise draws.
    GridEnvironment env(config, seed);
    if (strategy == "no-discount" || strategy == "baseline") {
      const Allocation fixed =
          strategy == "baseline" ? uniform_allocate(n, config.budget) : Allocation::zeros(n, config.budget);
      for (int w = 0; w < windows; ++w) env.observe(fixed, rounds);
    } else {
      BanditConfig bandit;
      bandit.budget = config.budget;
      bandit.n_agents = n;
      bandit.batch_size = rounds;
      bandit.horizon = static_cast<std::int64_t>(windows) * rounds;
      bandit.rate_grid = config.rate_grid;
      bandit.rng_seed = seed ^ 0x9e3779b97f4a7c15ULL;
      bandit.weighted = strategy == "learner-w";
      bandit.selection = config.selection;
      bandit.optimism = config.optimism;
      bandit.init = config.init;
      run_bandit(bandit, env);
    }
    StrategyRun run;
    run.windows = env.log();
    run.summary = summarize(strategy, run.windows, config.weeks, config.window_days);
    report.runs.push_back(std::move(run));
  }
  return report;
}

}  // namespace expresponse
