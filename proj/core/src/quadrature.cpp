#include "tumorfbs/quadrature.hpp"

#include "tumorfbs/error.hpp"

namespace tumorfbs {

double trapz(std::span<const double> values, double spacing) {
  if (values.size() < 2) throw InvalidArgument("trapz needs at least two samples");
  if (!(spacing > 0.0)) throw InvalidArgument("trapz spacing must be positive");
  double interior = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) interior += values[i];
  return spacing * (interior + 0.5 * (values.front() + values.back()));
}

double trapz_product(std::span<const double> a, std::span<const double> b, double spacing) {
  if (a.size() != b.size()) throw InvalidArgument("trapz_product: length mismatch");
  if (a.size() < 2) throw InvalidArgument("trapz needs at least two samples");
  if (!(spacing > 0.0)) throw InvalidArgument("trapz spacing must be positive");
  double interior = 0.0;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) interior += a[i] * b[i];
  return spacing * (interior + 0.5 * (a.front() * b.front() + a.back() * b.back()));
}

} // namespace tumorfbs
