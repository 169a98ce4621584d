#include "tumorfbs/tridiagonal.hpp"

#include "tumorfbs/error.hpp"

#include <cmath>

namespace tumorfbs {

void solve_tridiagonal(const Tridiagonal &A, std::span<double> rhs) {
  const std::size_t n = A.size();
  if (rhs.size() != n) throw InvalidArgument("solve_tridiagonal: size mismatch");
  if (n == 0) return;

  std::vector<double> c(n);
  double pivot = A.diag[0];
  if (pivot == 0.0 || !std::isfinite(pivot)) throw SolverError("tridiagonal solve: zero pivot", 0);
  c[0] = A.upper[0] / pivot;
  rhs[0] /= pivot;
  for (std::size_t i = 1; i < n; ++i) {
    pivot = A.diag[i] - A.lower[i] * c[i - 1];
    if (pivot == 0.0 || !std::isfinite(pivot))
      throw SolverError("tridiagonal solve: zero pivot", i);
    c[i] = i + 1 < n ? A.upper[i] / pivot : 0.0;
    rhs[i] = (rhs[i] - A.lower[i] * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

} // namespace tumorfbs
