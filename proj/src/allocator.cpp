#include "expresponse/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace expresponse {

namespace {

void require_budget(int budget, const char* who) {
  if (budget < 1) throw ArgumentError(std::string(who) + ": budget must be >= 1");
}

void require_rates(const Eigen::Ref<const Eigen::VectorXd>& lambdas, const char* who) {
  if (lambdas.size() == 0) throw ArgumentError(std::string(who) + ": empty lambda vector");
  for (Eigen::Index i = 0; i < lambdas.size(); ++i)
    if (!(lambdas(i) >= 0.0)) throw DomainError(std::string(who) + ": negative lambda");
}

// Unit-by-unit greedy. next(i, c) scores granting agent i one more unit on top
// of c; the strictly largest score wins, so the lowest index wins ties.
template <typename NextJump>
Allocation unit_greedy(Eigen::Index n, int budget, NextJump next) {
  Allocation alloc = Allocation::zeros(n, budget);
  Eigen::VectorXd cached(n);
  for (Eigen::Index i = 0; i < n; ++i) cached(i) = next(i, 0);

  for (int spent = 0; spent < budget; ++spent) {
    Eigen::Index best = 0;
    for (Eigen::Index d = 1; d < n; ++d)
      if (cached(d) > cached(best)) best = d;
    alloc.units(best) += 1;
    cached(best) = next(best, alloc.units(best));
  }
  return alloc;
}

// Block greedy: the chosen group receives weight_i units. Groups whose weight
// exceeds the remaining budget drop out.
template <typename NextJump>
Allocation block_greedy(const std::vector<AgentProfile>& profiles, int budget, SelectionCriterion criterion,
                        NextJump next) {
  const auto n = static_cast<Eigen::Index>(profiles.size());
  Allocation alloc = Allocation::zeros(n, budget);
  int remaining = budget;
  for (;;) {
    Eigen::Index best = -1;
    double best_score = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& p = profiles[static_cast<std::size_t>(i)];
      if (p.weight > remaining) continue;
      double score = next(i, alloc.units(i));
      if (criterion == SelectionCriterion::UsageWeighted) score *= p.peak_usage;
      if (best < 0 || score > best_score) {
        best = i;
        best_score = score;
      }
    }
    if (best < 0) break;
    const int w = profiles[static_cast<std::size_t>(best)].weight;
    alloc.units(best) += w;
    remaining -= w;
  }
  return alloc;
}

void require_intervals(const Eigen::Ref<const Eigen::VectorXd>& lo, const Eigen::Ref<const Eigen::VectorXd>& hi,
                       const char* who) {
  require_rates(lo, who);
  require_rates(hi, who);
  if (lo.size() != hi.size()) throw DimensionError(std::string(who) + ": lo/hi length mismatch");
  if (((hi - lo).array() < 0.0).any()) throw DomainError(std::string(who) + ": lo exceeds hi");
}

}  // namespace

Allocation mjs_allocate(const Eigen::Ref<const Eigen::VectorXd>& lambdas, int budget) {
  require_rates(lambdas, "mjs_allocate");
  require_budget(budget, "mjs_allocate");
  return unit_greedy(lambdas.size(), budget,
                     [&](Eigen::Index i, int c) { return jump(lambdas(i), static_cast<double>(c)); });
}

Allocation weighted_mjs_allocate(const std::vector<AgentProfile>& profiles, int budget,
                                 SelectionCriterion criterion) {
  if (profiles.empty()) throw ArgumentError("weighted_mjs_allocate: no profiles");
  require_budget(budget, "weighted_mjs_allocate");
  for (const auto& p : profiles) p.validate();
  return block_greedy(profiles, budget, criterion, [&](Eigen::Index i, int c) {
    return jump(profiles[static_cast<std::size_t>(i)].lambda, static_cast<double>(c));
  });
}

double optimistic_jump(double lo, double hi, int c) {
  if (!(lo >= 0.0) || !(hi >= lo)) throw DomainError("optimistic_jump: need 0 <= lo <= hi");
  if (c < 0) throw DomainError("optimistic_jump: negative discount");
  if (c == 0) return jump(hi, 0.0);
  const double peak = std::log1p(1.0 / c);
  return jump(std::clamp(peak, lo, hi), static_cast<double>(c));
}

Allocation mjs_allocate_interval(const Eigen::Ref<const Eigen::VectorXd>& lo,
                                 const Eigen::Ref<const Eigen::VectorXd>& hi, int budget) {
  require_intervals(lo, hi, "mjs_allocate_interval");
  require_budget(budget, "mjs_allocate_interval");
  return unit_greedy(lo.size(), budget, [&](Eigen::Index i, int c) { return optimistic_jump(lo(i), hi(i), c); });
}

Allocation weighted_mjs_allocate_interval(const std::vector<AgentProfile>& profiles,
                                          const Eigen::Ref<const Eigen::VectorXd>& lo,
                                          const Eigen::Ref<const Eigen::VectorXd>& hi, int budget,
                                          SelectionCriterion criterion) {
  if (profiles.empty()) throw ArgumentError("weighted_mjs_allocate_interval: no profiles");
  require_intervals(lo, hi, "weighted_mjs_allocate_interval");
  if (static_cast<Eigen::Index>(profiles.size()) != lo.size())
    throw DimensionError("weighted_mjs_allocate_interval: profile count differs from interval count");
  require_budget(budget, "weighted_mjs_allocate_interval");
  return block_greedy(profiles, budget, criterion,
                      [&](Eigen::Index i, int c) { return optimistic_jump(lo(i), hi(i), c); });
}

Allocation uniform_allocate(int n, int budget) {
  if (n < 1) throw ArgumentError("uniform_allocate: n must be >= 1");
  if (budget < 0) throw ArgumentError("uniform_allocate: budget must be >= 0");
  Allocation alloc = Allocation::zeros(n, budget);
  const int base = budget / n;
  const int extra = budget % n;
  for (int i = 0; i < n; ++i) alloc.units(i) = base + (i < extra ? 1 : 0);
  return alloc;
}

std::uint64_t count_allocations(int n, int budget) {
  // C(budget + n, n) computed incrementally; saturates well past the enumeration limit.
  std::uint64_t result = 1;
  for (int k = 1; k <= n; ++k) {
    result = result * static_cast<std::uint64_t>(budget + k) / static_cast<std::uint64_t>(k);
    if (result > kBruteForceLimit * 1000) return std::numeric_limits<std::uint64_t>::max();
  }
  return result;
}

Allocation brute_force_allocate(const Eigen::Ref<const Eigen::VectorXd>& lambdas, int budget) {
  require_rates(lambdas, "brute_force_allocate");
  if (budget < 0) throw ArgumentError("brute_force_allocate: negative budget");
  const auto n = static_cast<int>(lambdas.size());
  if (count_allocations(n, budget) > kBruteForceLimit)
    throw CapacityError("brute_force_allocate: instance too large to enumerate");

  Eigen::MatrixXd prob(n, budget + 1);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c <= budget; ++c) prob(i, c) = reduction_probability(lambdas(i), double(c));

  Eigen::VectorXi current = Eigen::VectorXi::Zero(n);
  Eigen::VectorXi best = current;
  double best_value = -1.0;

  // Odometer over compositions with sum <= budget, agent 0 most significant.
  int used = 0;
  for (;;) {
    double value = 0.0;
    for (int i = 0; i < n; ++i) value += prob(i, current(i));
    if (value > best_value) {
      best_value = value;
      best = current;
    }
    int pos = n - 1;
    while (pos >= 0 && used >= budget) {
      used -= current(pos);
      current(pos) = 0;
      --pos;
    }
    if (pos < 0) break;
    current(pos) += 1;
    used += 1;
  }
  return {best, budget};
}

Allocation optimal_weighted_allocate(const std::vector<AgentProfile>& profiles, int budget) {
  if (profiles.empty()) throw ArgumentError("optimal_weighted_allocate: no profiles");
  if (budget < 0) throw ArgumentError("optimal_weighted_allocate: negative budget");
  for (const auto& p : profiles) p.validate();

  const int n = static_cast<int>(profiles.size());
  // value(i, r): best objective from groups i..n-1 with r units left.
  Eigen::MatrixXd value = Eigen::MatrixXd::Zero(n + 1, budget + 1);
  Eigen::MatrixXi choice = Eigen::MatrixXi::Zero(n, budget + 1);
  for (int i = n - 1; i >= 0; --i) {
    const auto& p = profiles[static_cast<std::size_t>(i)];
    for (int r = 0; r <= budget; ++r) {
      double best = value(i + 1, r);
      int best_units = 0;
      for (int units = p.weight; units <= r; units += p.weight) {
        const double v =
            p.peak_usage * reduction_probability(p.lambda, double(units)) + value(i + 1, r - units);
        if (v > best) {
          best = v;
          best_units = units;
        }
      }
      value(i, r) = best;
      choice(i, r) = best_units;
    }
  }

  Allocation alloc = Allocation::zeros(n, budget);
  int r = budget;
  for (int i = 0; i < n; ++i) {
    alloc.units(i) = choice(i, r);
    r -= choice(i, r);
  }
  return alloc;
}

}  // namespace expresponse
