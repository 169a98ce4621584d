#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace tumorfbs {

/// Thrown when an argument violates a documented precondition or invariant.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a solver cannot produce a usable result (blow-up, singular
/// system, bound violation in strict mode).
class SolverError : public std::runtime_error {
public:
  explicit SolverError(const std::string &what, std::size_t step = npos)
      : std::runtime_error(what), step_(step) {}

  /// Time step (or iteration) at which the failure was detected, or npos.
  std::size_t step() const noexcept { return step_; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
  std::size_t step_;
};

/// An iterative method hit its iteration cap. Carries the iterate history.
class ConvergenceError : public SolverError {
public:
  ConvergenceError(const std::string &what, std::vector<double> history)
      : SolverError(what, history.size()), history_(std::move(history)) {}

  const std::vector<double> &history() const noexcept { return history_; }

private:
  std::vector<double> history_;
};

} // namespace tumorfbs
