#include <doctest.h>

#include <random>

#include "expresponse/response_model.hpp"
#include "oracles.hpp"

using namespace expresponse;

TEST_CASE("reduction probability reference values") {
  CHECK(std::abs(reduction_probability(0.5, 2.0) - oracle::p_half_two) <= oracle::kTol);
  CHECK(reduction_probability(3.7, 0.0) == 0.0);
  CHECK(reduction_probability(0.0, 9.0) == 0.0);
}

TEST_CASE("jump reference values") {
  CHECK(std::abs(jump(0.5, 0.0) - oracle::jump_half_zero) <= oracle::kTol);
  CHECK(std::abs(jump(0.5, 1.0) - oracle::jump_half_one) <= oracle::kTol);
  CHECK(jump(0.0, 7.0) == 0.0);
  CHECK(jump(1e-9, 3.0) > 0.0);
}

TEST_CASE("negative inputs are domain errors") {
  CHECK_THROWS_AS(reduction_probability(-0.1, 1.0), DomainError);
  CHECK_THROWS_AS(reduction_probability(0.1, -1.0), DomainError);
  CHECK_THROWS_AS(jump(-0.1, 1.0), DomainError);
  CHECK_THROWS_AS(jump(0.1, -1.0), DomainError);
  CHECK_THROWS_AS(DiscountScale(0.0), DomainError);
}

TEST_CASE("expected reduction") {
  const std::vector<AgentProfile> two{{0, 0.5, 1, 1.0}, {1, 0.1, 1, 1.0}};
  CHECK(expected_reduction(two, Allocation::zeros(2, 3), false) == 0.0);
  CHECK(std::abs(expected_reduction(two, {Eigen::Vector2i(3, 0), 3}, false) - oracle::reduction_30) <= oracle::kTol);
  CHECK_THROWS_AS(expected_reduction(two, Allocation::zeros(3, 3), false), DimensionError);

  // An agent using 10 kWh with reduction probability 0.6 saves 6 kWh in expectation.
  const double lambda = -std::log(0.4) / 5.0;
  const std::vector<AgentProfile> one{{0, lambda, 1, 10.0}};
  CHECK(std::abs(expected_reduction(one, {Eigen::VectorXi::Constant(1, 5), 5}, true) - 6.0) <= 1e-12);
}

TEST_CASE("profile and allocation invariants") {
  CHECK_THROWS_AS((AgentProfile{0, -1.0, 1, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((AgentProfile{0, 1.0, 0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((AgentProfile{0, 1.0, 1, 0.0}.validate()), DomainError);
  Allocation a{Eigen::Vector3i(1, 2, 0), 3};
  CHECK(a.feasible());
  a.units(2) = 1;
  CHECK_FALSE(a.feasible());
  CHECK(DiscountScale(0.5).apply(3) == 1.5);
}

TEST_CASE("property: jumps never increase with the discount") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rate(0.0, 5.0);
  std::uniform_int_distribution<int> level(1, 50);
  for (int k = 0; k < 5000; ++k) {
    const double l = rate(rng);
    const int j = level(rng);
    CHECK(jump(l, j - 1.0) >= jump(l, double(j)));
  }
}

TEST_CASE("property: jumps telescope to the reduction probability") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> rate(0.0, 5.0);
  std::uniform_int_distribution<int> level(0, 60);
  for (int k = 0; k < 2000; ++k) {
    const double l = rate(rng);
    const int c = level(rng);
    double sum = 0.0;
    for (int j = 0; j < c; ++j) sum += jump(l, double(j));
    CHECK(std::abs(sum - reduction_probability(l, double(c))) <= 1e-12);
  }
}

TEST_CASE("property: probability stays in [0, 1) and is monotone in both arguments") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> rate(0.0, 5.0);
  std::uniform_int_distribution<int> level(0, 30);
  for (int k = 0; k < 2000; ++k) {
    const double l = rate(rng);
    const int c = level(rng);
    const double p = reduction_probability(l, double(c));
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    if (l * c < 30.0) CHECK(p < 1.0);
    CHECK(reduction_probability(l, c + 1.0) >= p);
    CHECK(reduction_probability(l + 0.1, double(c)) >= p);
  }
}
