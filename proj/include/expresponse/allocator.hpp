#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "expresponse/response_model.hpp"

namespace expresponse {

// Greedy maximum-jump allocation. Each of the b units goes to the agent with
// the largest next jump; ties go to the lowest index. Spends exactly b units.
// O(n*b).
Allocation mjs_allocate(const Eigen::Ref<const Eigen::VectorXd>& lambdas, int budget);

/// How the weighted allocator ranks groups.
enum class SelectionCriterion {
  UsageWeighted,  // peak_usage_i * jump(lambda_i, c_i)
  RawJump,        // jump(lambda_i, c_i)
};

// Weighted group allocation: picks a group by SelectionCriterion among those whose
// weight still fits, grants it weight_i units. May leave budget unspent.
Allocation weighted_mjs_allocate(const std::vector<AgentProfile>& profiles, int budget,
                                 SelectionCriterion criterion = SelectionCriterion::UsageWeighted);

// Largest jump(l, c) over rates l in [lo, hi]. For c >= 1 the jump peaks at
// l = ln(1 + 1/c), so the maximizer is that point clamped into the interval;
// for c = 0 the jump increases in l and the maximizer is hi.
double optimistic_jump(double lo, double hi, int c);

// Maximum-jump greedy on optimistic jumps over per-agent rate intervals.
// Reduces to mjs_allocate when lo == hi.
Allocation mjs_allocate_interval(const Eigen::Ref<const Eigen::VectorXd>& lo,
                                 const Eigen::Ref<const Eigen::VectorXd>& hi, int budget);

// Weighted block greedy on optimistic jumps; profile lambdas are ignored.
Allocation weighted_mjs_allocate_interval(const std::vector<AgentProfile>& profiles,
                                          const Eigen::Ref<const Eigen::VectorXd>& lo,
                                          const Eigen::Ref<const Eigen::VectorXd>& hi, int budget,
                                          SelectionCriterion criterion = SelectionCriterion::UsageWeighted);

// Remainder goes to the lowest indices.
Allocation uniform_allocate(int n, int budget);

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Number of allocations with sum <= budget over n agents, C(budget+n, n), saturating.
std::uint64_t count_allocations(int n, int budget);

// Exhaustive search over all allocations with sum <= budget. Returns the first
// maximizer in lexicographic order. Throws CapacityError beyond kBruteForceLimit.
Allocation brute_force_allocate(const Eigen::Ref<const Eigen::VectorXd>& lambdas, int budget);

// Exact optimum of sum_i usage_i * p_i(c_i) with c_i restricted to multiples of
// weight_i and sum c_i <= budget (dynamic program, O(n*b^2)). Benchmark for
// weighted regret, where the block greedy has no optimality guarantee.
Allocation optimal_weighted_allocate(const std::vector<AgentProfile>& profiles, int budget);

}  // namespace expresponse
