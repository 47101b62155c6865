#pragma once

// Exponential reduction-probability model: an agent offered c discount units
// reduces its peak load with probability p(c) = 1 - exp(-lambda * c).

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Core>

#include "expresponse/errors.hpp"

namespace expresponse {

/// One agent (or customer group) as seen by the allocator.
struct AgentProfile {
  int id = 0;
  double lambda = 0.0;     // reduction rate per discount unit
  int weight = 1;          // discount multiplier used by the weighted allocator
  double peak_usage = 1.0; // kWh per peak slot

  void validate() const {
    if (!(lambda >= 0.0)) throw DomainError("AgentProfile: lambda must be >= 0");
    if (weight < 1) throw DomainError("AgentProfile: weight must be >= 1");
    if (!(peak_usage > 0.0)) throw DomainError("AgentProfile: peak_usage must be > 0");
  }
};

/// Integer discount units per agent under a budget.
struct Allocation {
  Eigen::VectorXi units;
  int budget = 0;

  Allocation() = default;
  Allocation(Eigen::VectorXi u, int b) : units(std::move(u)), budget(b) {}

  static Allocation zeros(Eigen::Index n, int b) { return {Eigen::VectorXi::Zero(n), b}; }

  Eigen::Index size() const { return units.size(); }
  int spent() const { return units.size() == 0 ? 0 : units.sum(); }
  bool feasible() const { return (units.array() >= 0).all() && spent() <= budget; }

  friend bool operator==(const Allocation& a, const Allocation& b) {
    return a.budget == b.budget && a.units.size() == b.units.size() && a.units == b.units;
  }
};

/// Maps integer discount units to tariff-percent discounts at the simulator boundary.
struct DiscountScale {
  double scalar = 1.0;

  explicit DiscountScale(double s = 1.0) : scalar(s) {
    if (!(s > 0.0)) throw DomainError("DiscountScale: scalar must be > 0");
  }
  double apply(int units) const { return scalar * units; }
};

template <typename Scalar>
Scalar reduction_probability(Scalar lambda, std::type_identity_t<Scalar> discount) {
  static_assert(std::is_floating_point_v<Scalar>);
  if (!(lambda >= Scalar(0))) throw DomainError("reduction_probability: negative rate");
  if (!(discount >= Scalar(0))) throw DomainError("reduction_probability: negative discount");
  // -expm1 keeps full relative precision for small lambda*discount.
  return -std::expm1(-lambda * discount);
}

/// Marginal gain p(c+1) - p(c) of granting one more unit on top of c.
template <typename Scalar>
Scalar jump(Scalar lambda, std::type_identity_t<Scalar> c) {
  static_assert(std::is_floating_point_v<Scalar>);
  if (!(lambda >= Scalar(0))) throw DomainError("jump: negative rate");
  if (!(c >= Scalar(0))) throw DomainError("jump: negative discount");
  // e^{-lc} - e^{-l(c+1)} = e^{-lc} (1 - e^{-l})
  return std::exp(-lambda * c) * -std::expm1(-lambda);
}

/// Sum of reduction probabilities, sum_i p_i(c_i).
template <typename DerivedL, typename DerivedC>
typename DerivedL::Scalar expected_reduction(const Eigen::MatrixBase<DerivedL>& lambdas,
                                             const Eigen::MatrixBase<DerivedC>& units) {
  using Scalar = typename DerivedL::Scalar;
  if (lambdas.size() != units.size())
    throw DimensionError("expected_reduction: lambda/allocation length mismatch");
  Scalar total(0);
  for (Eigen::Index i = 0; i < lambdas.size(); ++i)
    total += reduction_probability<Scalar>(lambdas(i), static_cast<Scalar>(units(i)));
  return total;
}

/// Usage-weighted form, sum_i usage_i * p_i(c_i).
template <typename DerivedL, typename DerivedU, typename DerivedC>
typename DerivedL::Scalar expected_reduction(const Eigen::MatrixBase<DerivedL>& lambdas,
                                             const Eigen::MatrixBase<DerivedU>& usage,
                                             const Eigen::MatrixBase<DerivedC>& units) {
  using Scalar = typename DerivedL::Scalar;
  if (lambdas.size() != units.size() || usage.size() != units.size())
    throw DimensionError("expected_reduction: lambda/usage/allocation length mismatch");
  Scalar total(0);
  for (Eigen::Index i = 0; i < lambdas.size(); ++i)
    total += usage(i) * reduction_probability<Scalar>(lambdas(i), static_cast<Scalar>(units(i)));
  return total;
}

inline Eigen::VectorXd lambdas_of(const std::vector<AgentProfile>& profiles) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(profiles.size()));
  for (std::size_t i = 0; i < profiles.size(); ++i) out(static_cast<Eigen::Index>(i)) = profiles[i].lambda;
  return out;
}

inline Eigen::VectorXd usages_of(const std::vector<AgentProfile>& profiles) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(profiles.size()));
  for (std::size_t i = 0; i < profiles.size(); ++i)
    out(static_cast<Eigen::Index>(i)) = profiles[i].peak_usage;
  return out;
}

inline double expected_reduction(const std::vector<AgentProfile>& profiles, const Allocation& alloc,
                                 bool weighted) {
  if (static_cast<Eigen::Index>(profiles.size()) != alloc.size())
    throw DimensionError("expected_reduction: profile/allocation length mismatch");
  const Eigen::VectorXd lambdas = lambdas_of(profiles);
  if (weighted) return expected_reduction(lambdas, usages_of(profiles), alloc.units);
  return expected_reduction(lambdas, alloc.units);
}

}  // namespace expresponse
