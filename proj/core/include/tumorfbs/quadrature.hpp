#pragma once

#include <span>

namespace tumorfbs {

/// Composite trapezoid rule over equally spaced samples. Requires at least
/// two samples and positive spacing.
double trapz(std::span<const double> values, double spacing);

/// Composite trapezoid rule of the pointwise product a*b.
double trapz_product(std::span<const double> a, std::span<const double> b, double spacing);

} // namespace tumorfbs
