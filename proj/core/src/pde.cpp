#include "tumorfbs/pde.hpp"

#include "tumorfbs/error.hpp"
#include "tumorfbs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tumorfbs {

void SchemeConfig::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw InvalidArgument("theta must lie in [0,1]");
  if (!(bounds_monitor_tol > 0.0)) throw InvalidArgument("bounds_monitor_tol must be positive");
}

namespace stencil {

Tridiagonal state_operator(const Grid &grid, double advection, double diffusion,
                           double reaction, Advection kind) {
  const std::size_t F = grid.n_xi() - 1;
  const double h = grid.dxi();
  const double dd = diffusion / (h * h);
  Tridiagonal op(F);
  op.diag[0] = 2.0 * dd + reaction;
  op.upper[0] = -2.0 * dd;
  for (std::size_t j = 1; j < F; ++j) {
    const double ax = advection * grid.xi(j);
    op.diag[j] = 2.0 * dd + reaction;
    op.lower[j] = -dd;
    op.upper[j] = -dd;
    if (kind == Advection::centered) {
      op.lower[j] += ax / (2.0 * h);
      op.upper[j] -= ax / (2.0 * h);
    } else if (advection > 0.0) {
      op.diag[j] += ax / h;
      op.upper[j] -= ax / h;
    } else {
      op.diag[j] -= ax / h;
      op.lower[j] += ax / h;
    }
  }
  return op;
}

Tridiagonal adjoint_operator(const Tridiagonal &A) {
  const std::size_t F = A.size();
  const auto weight = [](std::size_t j) { return j == 0 ? 0.5 : 1.0; };
  Tridiagonal out(F);
  for (std::size_t j = 0; j < F; ++j) {
    out.diag[j] = A.diag[j];
    if (j >= 1) out.lower[j] = weight(j - 1) * A.upper[j - 1] / weight(j);
    if (j + 1 < F) out.upper[j] = weight(j + 1) * A.lower[j + 1] / weight(j);
  }
  return out;
}

std::vector<double> apply(const Tridiagonal &op, std::span<const double> u) {
  const std::size_t F = op.size();
  if (u.size() != F + 1) throw InvalidArgument("stencil::apply: size mismatch");
  std::vector<double> out(F);
  for (std::size_t j = 0; j < F; ++j) {
    double s = op.diag[j] * u[j] + op.upper[j] * u[j + 1];
    if (j > 0) s += op.lower[j] * u[j - 1];
    out[j] = s;
  }
  return out;
}

} // namespace stencil

namespace {

void check_inputs(const ControlPath &m, const ModelParams &params, const Grid &grid,
                  const SchemeConfig &scheme) {
  params.validate();
  scheme.validate();
  if (std::abs(grid.T() - params.T) > 1e-12 * std::max(1.0, params.T))
    throw InvalidArgument("grid horizon does not match params.T");
  if (m.size() != grid.n_t()) throw InvalidArgument("control length does not match n_t");
  for (double v : m.values)
    if (!std::isfinite(v) || !(v > -1.0))
      throw InvalidArgument("control values must be finite and exceed -1");
}

void check_state(const StateSolution &state, const Grid &grid) {
  if (state.u.rows() != grid.n_t() || state.u.cols() != grid.n_xi() ||
      state.rho.size() != grid.n_t() || state.rho_prime.size() != grid.n_t())
    throw InvalidArgument("state was not solved on this grid");
}

// Derivative of the state operator with respect to the advection coefficient.
Tridiagonal advection_unit(const Grid &grid, double advection, Advection kind) {
  if (kind == Advection::upwind && advection < 0.0) {
    Tridiagonal op = stencil::state_operator(grid, -1.0, 0.0, 0.0, kind);
    for (std::size_t j = 0; j < op.size(); ++j) {
      op.lower[j] = -op.lower[j];
      op.diag[j] = -op.diag[j];
      op.upper[j] = -op.upper[j];
    }
    return op;
  }
  return stencil::state_operator(grid, 1.0, 0.0, 0.0, kind);
}

Tridiagonal diffusion_unit(const Grid &grid) {
  return stencil::state_operator(grid, 0.0, 1.0, 0.0, Advection::centered);
}

// Growth rate I_n = mu (int u^n - sigma_tilde) at every level.
std::vector<double> growth_rates(const Field &u, const ModelParams &params, double dxi) {
  std::vector<double> I(u.rows());
  for (std::size_t n = 0; n < u.rows(); ++n)
    I[n] = params.mu * (trapz(u.row(n), dxi) - params.sigma_tilde);
  return I;
}

// Advection coefficient rho'/rho used by the operator at level n.
double advection_at(const std::vector<double> &I, std::size_t n) {
  return n == 0 ? I[0] : I[n - 1];
}

// One theta step on the free nodes:
//   (x_new - x_old)/dt + theta op_new x_new + (1-theta) op_old x_old = source
// x_old has n_xi entries; the Dirichlet value of x_new is `boundary`.
void theta_step(const Tridiagonal &op_new, const Tridiagonal &op_old,
                std::span<const double> x_old, std::span<const double> source, double boundary,
                double dt, double theta, std::span<double> x_new, std::size_t step) {
  const std::size_t F = op_new.size();
  Tridiagonal M(F);
  std::vector<double> rhs(F);
  for (std::size_t j = 0; j < F; ++j) {
    M.lower[j] = theta * op_new.lower[j];
    M.diag[j] = 1.0 / dt + theta * op_new.diag[j];
    M.upper[j] = j + 1 < F ? theta * op_new.upper[j] : 0.0;
    rhs[j] = x_old[j] / dt + source[j];
  }
  rhs[F - 1] -= theta * op_new.upper[F - 1] * boundary;
  if (theta < 1.0) {
    const auto old = stencil::apply(op_old, x_old);
    for (std::size_t j = 0; j < F; ++j) rhs[j] -= (1.0 - theta) * old[j];
  }
  try {
    solve_tridiagonal(M, rhs);
  } catch (const SolverError &e) {
    throw SolverError(std::string(e.what()), step);
  }
  for (std::size_t j = 0; j < F; ++j) {
    if (!std::isfinite(rhs[j])) {
      std::ostringstream os;
      os << "non-finite value at time step " << step;
      throw SolverError(os.str(), step);
    }
    x_new[j] = rhs[j];
  }
  x_new[F] = boundary;
}

// sum_j W_j dxi a_j b_j over the free nodes (trapezoid with a zero Dirichlet value).
double weighted_dot(std::span<const double> a, std::span<const double> b, double dxi) {
  double s = 0.5 * a[0] * b[0];
  for (std::size_t j = 1; j < b.size(); ++j) s += a[j] * b[j];
  return dxi * s;
}

} // namespace

StateSolution solve_state(const ControlPath &m, const ModelParams &params, const Grid &grid,
                          const SchemeConfig &scheme) {
  check_inputs(m, params, grid, scheme);
  const std::size_t Nt = grid.n_t();
  const std::size_t N = grid.n_xi();
  const double dt = grid.dt();

  StateSolution s;
  s.u = Field(Nt, N);
  s.rho.assign(Nt, 0.0);
  s.rho_prime.assign(Nt, 0.0);

  const auto u0 = build_initial_profile(params, grid);
  std::copy(u0.begin(), u0.end(), s.u.row(0).begin());
  s.rho[0] = params.rho0;

  const double tol = scheme.bounds_monitor_tol;
  s.monitor.min_u = *std::min_element(u0.begin(), u0.end());
  s.monitor.max_u = *std::max_element(u0.begin(), u0.end());

  double I = params.mu * (trapz(s.u.row(0), grid.dxi()) - params.sigma_tilde);
  s.rho_prime[0] = s.rho[0] * I;
  const std::vector<double> no_source(N - 1, 0.0);
  Tridiagonal op_old = stencil::state_operator(grid, I, 1.0 / (s.rho[0] * s.rho[0]),
                                               1.0 + m[0], scheme.advection);

  for (std::size_t n = 0; n + 1 < Nt; ++n) {
    const double factor = 1.0 + dt * I;
    if (!(factor > 0.0)) throw SolverError("thickness update lost positivity", n + 1);
    const double rho = s.rho[n] * factor;
    s.rho[n + 1] = rho;
    s.rho_prime[n + 1] = rho * I;

    Tridiagonal op_new =
        stencil::state_operator(grid, I, 1.0 / (rho * rho), 1.0 + m[n + 1], scheme.advection);
    theta_step(op_new, op_old, s.u.row(n), no_source, 1.0, dt, scheme.theta, s.u.row(n + 1),
               n + 1);

    for (double v : s.u.row(n + 1)) {
      s.monitor.min_u = std::min(s.monitor.min_u, v);
      s.monitor.max_u = std::max(s.monitor.max_u, v);
      if (v < -tol || v > 1.0 + tol) {
        ++s.monitor.violations;
        if (scheme.strict_bounds) {
          std::ostringstream os;
          os << "nutrient left [0,1] at time step " << n + 1 << " (u = " << v << ")";
          throw SolverError(os.str(), n + 1);
        }
      }
    }
    I = params.mu * (trapz(s.u.row(n + 1), grid.dxi()) - params.sigma_tilde);
    op_old = std::move(op_new);
  }
  return s;
}

AdjointSolution solve_adjoint(const StateSolution &state, const ControlPath &m,
                              const ModelParams &params, const Grid &grid,
                              const SchemeConfig &scheme, const AdjointOptions &options) {
  check_inputs(m, params, grid, scheme);
  check_state(state, grid);
  const std::size_t Nt = grid.n_t();
  const std::size_t N = grid.n_xi();
  const double dt = grid.dt();
  const double dxi = grid.dxi();
  const double theta = scheme.theta;

  const auto I = growth_rates(state.u, params, dxi);
  const Tridiagonal diff = diffusion_unit(grid);

  AdjointSolution out;
  out.w = Field(Nt, N);
  out.lambda.assign(Nt, 0.0);

  std::vector<double> source(N - 1);
  std::vector<double> w_hat(N);
  for (std::size_t n = Nt - 1; n-- > 0;) {
    const std::size_t k = n + 1;
    const double rho_k = state.rho[k];

    // Adjoint weight of the level-k operator: theta w^k + (1-theta) w^{k+1}.
    for (std::size_t j = 0; j < N; ++j) {
      const double later = k + 1 < Nt ? out.w(k + 1, j) : 0.0;
      w_hat[j] = theta * out.w(k, j) + (1.0 - theta) * later;
    }

    // The stored terminal value is lambda(T) = 0; the trapezoid end weight of
    // rho(T) in the objective enters here instead.
    double lambda_mid = k + 1 == Nt ? 0.5 * dt : out.lambda[k];
    double advective = 0.0;
    if (options.nonlocal_sources) {
      const auto uk = state.u.row(k);
      // int w u_xixi = -int w_xi u_xi after summation by parts.
      const double w_uxx = -weighted_dot(w_hat, stencil::apply(diff, uk), dxi);
      lambda_mid -= dt * 2.0 / (rho_k * rho_k * rho_k) * w_uxx;
      const Tridiagonal adv = advection_unit(grid, advection_at(I, k), scheme.advection);
      advective = -weighted_dot(w_hat, stencil::apply(adv, uk), dxi);
    }
    out.lambda[n] = dt + (1.0 + dt * I[n]) * lambda_mid;

    const double rho_n = state.rho[n];
    const double s = options.nonlocal_sources ? params.mu * (lambda_mid * rho_n + advective) : 0.0;
    std::fill(source.begin(), source.end(), s);

    const Tridiagonal op = stencil::adjoint_operator(stencil::state_operator(
        grid, advection_at(I, n), 1.0 / (rho_n * rho_n), 1.0 + m[n], scheme.advection));
    theta_step(op, op, out.w.row(k), source, 0.0, dt, theta, out.w.row(n), n);
    if (!std::isfinite(out.lambda[n])) throw SolverError("non-finite adjoint scalar", n);
  }
  return out;
}

SensitivityPair solve_sensitivity(const StateSolution &state, const ControlPath &m,
                                  const ControlPath &h, const ModelParams &params,
                                  const Grid &grid, const SchemeConfig &scheme) {
  check_inputs(m, params, grid, scheme);
  check_state(state, grid);
  if (h.size() != grid.n_t()) throw InvalidArgument("direction length does not match n_t");
  const std::size_t Nt = grid.n_t();
  const std::size_t N = grid.n_xi();
  const double dt = grid.dt();
  const double dxi = grid.dxi();
  const double theta = scheme.theta;

  const auto I = growth_rates(state.u, params, dxi);
  const Tridiagonal diff = diffusion_unit(grid);

  SensitivityPair out;
  out.v = Field(Nt, N);
  out.eta.assign(Nt, 0.0);

  // -(dA) u at level k for perturbations (d advection, d diffusion, d reaction).
  const auto forcing = [&](std::size_t k, double da, double dd) {
    const auto uk = state.u.row(k);
    const Tridiagonal adv = advection_unit(grid, advection_at(I, k), scheme.advection);
    const auto adv_u = stencil::apply(adv, uk);
    const auto diff_u = stencil::apply(diff, uk);
    std::vector<double> f(N - 1);
    for (std::size_t j = 0; j < N - 1; ++j)
      f[j] = -(da * adv_u[j] + dd * diff_u[j] + h[k] * uk[j]);
    return f;
  };

  std::vector<double> f_old = forcing(0, 0.0, 0.0);
  Tridiagonal op_old = stencil::state_operator(grid, advection_at(I, 0),
                                               1.0 / (state.rho[0] * state.rho[0]), 1.0 + m[0],
                                               scheme.advection);
  std::vector<double> source(N - 1);
  for (std::size_t n = 0; n + 1 < Nt; ++n) {
    const double dI = params.mu * trapz(out.v.row(n), dxi);
    out.eta[n + 1] = out.eta[n] * (1.0 + dt * I[n]) + state.rho[n] * dt * dI;

    const double rho = state.rho[n + 1];
    const double d_diffusion = -2.0 * out.eta[n + 1] / (rho * rho * rho);
    std::vector<double> f_new = forcing(n + 1, dI, d_diffusion);
    for (std::size_t j = 0; j < N - 1; ++j)
      source[j] = theta * f_new[j] + (1.0 - theta) * f_old[j];

    Tridiagonal op_new = stencil::state_operator(grid, I[n], 1.0 / (rho * rho), 1.0 + m[n + 1],
                                                 scheme.advection);
    theta_step(op_new, op_old, out.v.row(n), source, 0.0, dt, theta, out.v.row(n + 1), n + 1);
    if (!std::isfinite(out.eta[n + 1])) throw SolverError("non-finite eta", n + 1);
    op_old = std::move(op_new);
    f_old = std::move(f_new);
  }
  return out;
}

} // namespace tumorfbs
