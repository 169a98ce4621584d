#pragma once

#include "tumorfbs/model.hpp"
#include "tumorfbs/pde.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace tumorfbs {

/// Central difference (J(m + eps h) - J(m - eps h)) / (2 eps). The perturbed
/// controls are not projected, so m +- eps h may leave [0, M].
double fd_objective_derivative(const ControlPath &m, const ControlPath &h, double eps,
                               const ModelParams &params, const Grid &grid,
                               const SchemeConfig &scheme = {});

struct SensitivityCheck {
  double eta_rel_error = 0.0; ///< sup |eta - dq(rho)| / sup |dq(rho)|
  double v_rel_error = 0.0;   ///< same for v against dq(u)
};

/// Compares solve_sensitivity with central difference quotients of the state.
SensitivityCheck sensitivity_fd_check(const ControlPath &m, const ControlPath &h, double eps,
                                      const ModelParams &params, const Grid &grid,
                                      const SchemeConfig &scheme = {});

struct BoundsViolation {
  enum class Kind { nutrient_below, nutrient_above, thickness_below, thickness_above };
  Kind kind;
  std::size_t step;  ///< time index
  std::size_t node;  ///< spatial index (0 for thickness)
  double value;
};

struct BoundsReport {
  std::vector<BoundsViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

/// Checks 0 < u < 1 (within tol) and
/// rho0 exp(-mu sigma_tilde t) <= rho <= rho0 exp(mu (1 - sigma_tilde) t)
/// (within 1e-6 relative slack) at every grid node.
BoundsReport audit_state_bounds(const StateSolution &state, const ModelParams &params,
                                double tol = 1e-8);

std::string describe(const BoundsViolation &v);

struct SteadyCrosscheck {
  double rho_final = 0.0;
  double rho_steady = 0.0;
  double final_deviation = 0.0; ///< |rho(T_long) - rho_steady|
  double max_deviation = 0.0;   ///< sup over the horizon
};

/// Runs the parabolic solver with constant control m over [0, T_long] (same
/// n_xi and time step as `grid`) and compares rho with the steady value.
/// When `start_at_steady` is set, rho0 and u0 are replaced by the steady data.
SteadyCrosscheck steady_parabolic_crosscheck(double m, double T_long, const ModelParams &params,
                                             const Grid &grid, bool start_at_steady = false,
                                             const SchemeConfig &scheme = {});

struct AdjointIdentity {
  double forward = 0.0;  ///< <L(v,eta), (w,lambda)>
  double backward = 0.0; ///< <(v,eta), L*(w,lambda)>
  double mismatch() const;
};

/// Evaluates both sides of the duality pairing between the linearized state
/// operator and the adjoint operator on seeded smooth test fields compatible
/// with the boundary, initial and terminal conditions. Derivatives are
/// finite differences on `grid`; coefficients come from the state at m.
AdjointIdentity adjoint_identity_check(const ControlPath &m, const ModelParams &params,
                                       const Grid &grid, std::uint64_t seed,
                                       const SchemeConfig &scheme = {});

} // namespace tumorfbs
