#pragma once

#include "tumorfbs/model.hpp"
#include "tumorfbs/pde.hpp"

#include <string>
#include <vector>

namespace tumorfbs {

struct FbsConfig {
  double tol = 1e-3;  ///< stop when the sup-norm control change drops below this
  int max_iter = 200;
  double omega = 1.0; ///< relaxation, m_{i+1} = (1-omega) m_i + omega Phi(m_i)
  /// Halve omega (down to omega_floor) after this many consecutive increases of J.
  int ascent_window = 3;
  double omega_floor = 1.0 / 16.0;
  bool adaptive_relaxation = true;

  void validate() const;
};

struct OptimizationResult {
  ControlPath m_star;
  StateSolution state;
  AdjointSolution adjoint;
  double J = 0.0;
  std::vector<double> J_history;      ///< J of every evaluated iterate
  std::vector<double> change_history; ///< sup-norm control change per iteration
  std::vector<double> omega_history;  ///< relaxation used per iteration
  std::vector<std::string> events;    ///< relaxation adjustments
  int iterations = 0;
  bool converged = false;
};

/// J = int_0^T (rho(t) + B m(t)^2) dt with the trapezoid rule in time.
double objective(const StateSolution &state, const ControlPath &m, const ModelParams &params,
                 const Grid &grid);

/// Box projection onto [0, M]. NaN maps to 0.
double project_to_box(double value, double M);

/// m(t_n) = clamp(int_0^1 w u dxi / (2B), 0, M). Requires B > 0.
ControlPath characterize_control(const StateSolution &state, const AdjointSolution &adjoint,
                                 const ModelParams &params, const Grid &grid);

/// int_0^T h (2 B m - int_0^1 w u dxi) dt.
///
/// The control enters the step into level n with weight theta and the step
/// out of it with weight 1 - theta, so the w u term is paired as
/// dt <theta w^n + (1-theta) w^{n+1}, u^n> (no theta part at n = 0). This is
/// the trapezoid rule up to the end nodes and makes the result the exact
/// derivative of the discrete objective.
double adjoint_directional_derivative(const StateSolution &state,
                                      const AdjointSolution &adjoint, const ControlPath &m,
                                      const ControlPath &h, const ModelParams &params,
                                      const Grid &grid, const SchemeConfig &scheme = {});

/// Pointwise gradient density 2 B m(t_n) - int_0^1 w u dxi.
std::vector<double> gradient_density(const StateSolution &state, const AdjointSolution &adjoint,
                                     const ControlPath &m, const ModelParams &params,
                                     const Grid &grid);

/// int_0^T m dt (trapezoid).
double control_integral(const ControlPath &m, const Grid &grid);

/// Length of the initial interval on which m stays at the upper bound M
/// (within `tol`); 0 when m(0) < M - tol.
double time_at_upper_bound(const ControlPath &m, const Grid &grid, double M, double tol = 1e-9);

/// Forward-backward sweep: state forward, adjoint backward, projected and
/// relaxed control update, until the sup-norm change is below fbs.tol.
/// Non-convergence is reported through `converged`, not thrown.
OptimizationResult fbs_optimize(const ControlPath &m0, const ModelParams &params,
                                const Grid &grid, const SchemeConfig &scheme = {},
                                const FbsConfig &fbs = {});

} // namespace tumorfbs
