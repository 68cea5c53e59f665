#pragma once

#include <stdexcept>
#include <string>

namespace enaqt {

/// Precondition violated by a caller-supplied value.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The steady-state nullspace is not one-dimensional.
class DegenerateSteadyState : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A linear solve or post-solve validation failed.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A closed-form expression was evaluated where its denominator vanishes.
class DegenerateInput : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Rank correlation requested for data with zero rank variance.
class UndefinedCorrelation : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

}  // namespace enaqt
