#pragma once

#include <span>
#include <vector>

namespace tumorfbs {

/// Tridiagonal system; row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1].
/// lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
  std::size_t size() const noexcept { return diag.size(); }
};

/// Thomas algorithm. Overwrites rhs with the solution. Throws SolverError
/// on a zero pivot.
void solve_tridiagonal(const Tridiagonal &A, std::span<double> rhs);

} // namespace tumorfbs
