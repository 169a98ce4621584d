#pragma once

#include "tumorfbs/model.hpp"
#include "tumorfbs/tridiagonal.hpp"

#include <span>
#include <vector>

namespace tumorfbs {

enum class Advection {
  centered, ///< second-order central differences (default)
  upwind,   ///< first-order upwinding, fallback when the bounds monitor trips
};

struct SchemeConfig {
  double theta = 1.0; ///< implicitness weight; 1 = backward Euler
  double bounds_monitor_tol = 1e-8;
  Advection advection = Advection::centered;
  bool strict_bounds = false; ///< throw instead of counting monitor violations

  void validate() const;
};

struct AdjointOptions {
  /// When false the nonlocal couplings (mu int w xi u_xi, mu lambda rho and
  /// the w-dependent part of the lambda equation) are dropped.
  bool nonlocal_sources = true;
};

/// Nutrient/thickness evolution on the fixed strip [0,1] x [0,T].
///
/// Per step n -> n+1:
///   I_n        = mu (int_0^1 u^n dxi - sigma_tilde)
///   rho^{n+1}  = rho^n (1 + dt I_n)
///   rho'^{n+1} = rho^{n+1} I_n
///   (u^{n+1} - u^n)/dt + theta A_{n+1} u^{n+1} + (1-theta) A_n u^n = 0
/// with A u = -(rho'/rho) xi u_xi - u_xixi / rho^2 + (1+m) u, u(1) = 1 and a
/// ghost-node Neumann condition at xi = 0.
StateSolution solve_state(const ControlPath &m, const ModelParams &params, const Grid &grid,
                          const SchemeConfig &scheme = {});

/// Backward adjoint system for (w, lambda):
///   -w_t + (rho'/rho)(xi w)_xi - w_xixi/rho^2 + (1+m) w = mu int w xi u_xi + mu lambda rho
///   -lambda' = 1 + lambda int mu (u - sigma_tilde) + (2/rho^3) int w_xi u_xi
/// with w(1,t) = 0, w_xi(0,t) = 0, w(.,T) = 0, lambda(T) = 0.
///
/// Marched in tau = T - t. The spatial operator is the trapezoid-weighted
/// transpose of the state operator, and the nonlocal terms use the previous
/// tau level, so for theta = 1 the recursion is the exact transpose of the
/// linearized state step.
AdjointSolution solve_adjoint(const StateSolution &state, const ControlPath &m,
                              const ModelParams &params, const Grid &grid,
                              const SchemeConfig &scheme = {},
                              const AdjointOptions &options = {});

/// Linearized state response (v, eta) to a control direction h, discretized
/// as the exact linearization of solve_state.
SensitivityPair solve_sensitivity(const StateSolution &state, const ControlPath &m,
                                  const ControlPath &h, const ModelParams &params,
                                  const Grid &grid, const SchemeConfig &scheme = {});

namespace stencil {

/// Spatial state operator at one time level, rows 0..n_xi-2. upper.back()
/// holds the coupling to the Dirichlet node.
Tridiagonal state_operator(const Grid &grid, double advection, double diffusion,
                           double reaction, Advection kind);

/// W^{-1} A^T W on the free nodes, W = trapezoid weights.
Tridiagonal adjoint_operator(const Tridiagonal &state_op);

/// (A u) on the free nodes; u has n_xi entries including the Dirichlet node.
std::vector<double> apply(const Tridiagonal &op, std::span<const double> u);

} // namespace stencil

} // namespace tumorfbs
