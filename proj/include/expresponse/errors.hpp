#pragma once

#include <stdexcept>
#include <string>

namespace expresponse {

// Bad numeric input to the response model (negative rate or discount).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Vectors/matrices whose sizes do not agree.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Empty inputs, zero budgets and similar argument-level rejections.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Instance too large for exhaustive enumeration.
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

// Observations that contradict the recorded offers (more successes than offers).
struct ConsistencyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Discount level outside the 1..b history columns.
struct IndexError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// Environment and configuration disagree on the experiment shape.
struct SetupError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed configuration file. The message names the offending key.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Output path that cannot be opened or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace expresponse
