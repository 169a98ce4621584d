#pragma once

#include "tumorfbs/model.hpp"

#include <vector>

namespace tumorfbs {

struct RootSolverConfig {
  double abs_tol = 1e-12;
  int max_iter = 100;
  double bracket_lo = 1e-6;
  double bracket_hi = 50.0;
  /// Bisection stops once the bracket is this narrow; Newton takes over.
  double bisection_width = 1e-6;

  void validate() const;
};

/// g(x) = tanh(x)/x with g(0) = 1. Strictly decreasing on [0, inf).
double g_eval(double x);

/// g'(x); 0 at x = 0.
double g_derivative(double x);

/// Positive x with |g(x) - s| <= cfg.abs_tol, for s in (0,1).
/// Bracketed bisection followed by Newton polish; the upper bracket end is
/// raised to 1/s when s is small enough to need it.
double g_inverse(double s, const RootSolverConfig &cfg = {});

/// Steady thickness for a constant control: sqrt(1+m) rho = g^{-1}(sigma_tilde).
double steady_rho(double m, const ModelParams &params, const RootSolverConfig &cfg = {});

/// d rho / d m = -g^{-1}(sigma_tilde) / (2 (1+m)^{3/2}).
double steady_drho_dm(double m, const ModelParams &params, const RootSolverConfig &cfg = {});

/// cosh(sqrt(1+m) rho xi) / cosh(sqrt(1+m) rho) on the grid nodes.
std::vector<double> steady_u_profile(double m, double rho, const Grid &grid);

/// Unclamped root of m (1+m)^{3/2} = g^{-1}(sigma_tilde) / (4B).
/// Returns +inf-free values; if the root lies beyond the search bracket the
/// bracket end is returned.
double optimal_m_unclamped(const ModelParams &params, const RootSolverConfig &cfg = {});

/// Steady optimal control min{m_*, M}. Requires B > 0.
double optimal_m_direct(const ModelParams &params, const RootSolverConfig &cfg = {});

/// Steady adjoint scalar from 1/(mu lambda) = g(x) - sech^2(x), x = sqrt(1+m) rho.
double steady_lambda(double m, double rho, const ModelParams &params);

/// w(xi) = mu lambda rho / (1+m) (1 - cosh(x xi)/cosh(x)).
std::vector<double> steady_w_profile(double m, double rho, double lambda,
                                     const ModelParams &params, const Grid &grid);

/// J(m) = rho(m) + B m^2.
double steady_objective(double m, const ModelParams &params, const RootSolverConfig &cfg = {});

/// Fixed-point iteration on the steady optimality system:
///   m_{i+1} = clamp(int_0^1 w_i u_i dxi / (2B), 0, M)
/// until |m_{i+1} - m_i| < tol. Throws ConvergenceError after max_iter.
SteadyStateSolution steady_fixed_point(double m0, const ModelParams &params, const Grid &grid,
                                       double tol, int max_iter = 500,
                                       const RootSolverConfig &cfg = {});

/// Steady bundle (profiles, lambda, J) at a given constant control.
SteadyStateSolution steady_bundle(double m, const ModelParams &params, const Grid &grid,
                                  const RootSolverConfig &cfg = {});

} // namespace tumorfbs
