#include "tumorfbs/control.hpp"

#include "tumorfbs/error.hpp"
#include "tumorfbs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tumorfbs {

void FbsConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidArgument("fbs tol must be positive");
  if (max_iter <= 0) throw InvalidArgument("fbs max_iter must be positive");
  if (!(omega > 0.0 && omega <= 1.0)) throw InvalidArgument("relaxation omega must lie in (0,1]");
  if (!(omega_floor > 0.0 && omega_floor <= omega))
    throw InvalidArgument("omega_floor must lie in (0, omega]");
  if (ascent_window < 1) throw InvalidArgument("ascent_window must be at least 1");
}

namespace {

void check_time_grid(std::size_t n, const Grid &grid, const char *what) {
  if (n != grid.n_t()) {
    std::ostringstream os;
    os << what << " has " << n << " time samples, grid has " << grid.n_t();
    throw InvalidArgument(os.str());
  }
}

void check_fields(const StateSolution &state, const AdjointSolution &adjoint, const Grid &grid) {
  check_time_grid(state.u.rows(), grid, "state");
  check_time_grid(adjoint.w.rows(), grid, "adjoint");
  if (state.u.cols() != grid.n_xi() || adjoint.w.cols() != grid.n_xi())
    throw InvalidArgument("state/adjoint spatial size does not match grid");
}

double sup_distance(const ControlPath &a, const ControlPath &b) {
  double d = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) d = std::max(d, std::abs(a[n] - b[n]));
  return d;
}

} // namespace

double objective(const StateSolution &state, const ControlPath &m, const ModelParams &params,
                 const Grid &grid) {
  check_time_grid(state.rho.size(), grid, "thickness");
  check_time_grid(m.size(), grid, "control");
  std::vector<double> integrand(grid.n_t());
  for (std::size_t n = 0; n < grid.n_t(); ++n)
    integrand[n] = state.rho[n] + params.B * m[n] * m[n];
  return trapz(integrand, grid.dt());
}

double project_to_box(double value, double M) {
  if (!(value > 0.0)) return 0.0;
  return value > M ? M : value;
}

ControlPath characterize_control(const StateSolution &state, const AdjointSolution &adjoint,
                                 const ModelParams &params, const Grid &grid) {
  if (!(params.B > 0.0)) throw InvalidArgument("control characterization requires B > 0");
  check_fields(state, adjoint, grid);
  ControlPath m{std::vector<double>(grid.n_t())};
  for (std::size_t n = 0; n < grid.n_t(); ++n) {
    const double wu = trapz_product(adjoint.w.row(n), state.u.row(n), grid.dxi());
    m.values[n] = project_to_box(wu / (2.0 * params.B), params.M);
  }
  return m;
}

std::vector<double> gradient_density(const StateSolution &state, const AdjointSolution &adjoint,
                                     const ControlPath &m, const ModelParams &params,
                                     const Grid &grid) {
  check_fields(state, adjoint, grid);
  check_time_grid(m.size(), grid, "control");
  std::vector<double> g(grid.n_t());
  for (std::size_t n = 0; n < grid.n_t(); ++n)
    g[n] = 2.0 * params.B * m[n] - trapz_product(adjoint.w.row(n), state.u.row(n), grid.dxi());
  return g;
}

double adjoint_directional_derivative(const StateSolution &state,
                                      const AdjointSolution &adjoint, const ControlPath &m,
                                      const ControlPath &h, const ModelParams &params,
                                      const Grid &grid, const SchemeConfig &scheme) {
  check_fields(state, adjoint, grid);
  check_time_grid(m.size(), grid, "control");
  check_time_grid(h.size(), grid, "direction");
  const std::size_t Nt = grid.n_t();
  const double dt = grid.dt(), dxi = grid.dxi(), theta = scheme.theta;

  std::vector<double> penalty(Nt);
  for (std::size_t n = 0; n < Nt; ++n) penalty[n] = 2.0 * params.B * m[n] * h[n];
  double coupling = 0.0;
  for (std::size_t n = 0; n < Nt; ++n) {
    const auto u = state.u.row(n);
    double wu = 0.0;
    if (n > 0) wu += theta * trapz_product(adjoint.w.row(n), u, dxi);
    if (n + 1 < Nt) wu += (1.0 - theta) * trapz_product(adjoint.w.row(n + 1), u, dxi);
    coupling += h[n] * wu;
  }
  return trapz(penalty, dt) - dt * coupling;
}

double control_integral(const ControlPath &m, const Grid &grid) {
  check_time_grid(m.size(), grid, "control");
  return trapz(m.values, grid.dt());
}

double time_at_upper_bound(const ControlPath &m, const Grid &grid, double M, double tol) {
  check_time_grid(m.size(), grid, "control");
  std::size_t n = 0;
  while (n < m.size() && m[n] >= M - tol) ++n;
  if (n == 0) return 0.0;
  return grid.t(n - 1);
}

OptimizationResult fbs_optimize(const ControlPath &m0, const ModelParams &params,
                                const Grid &grid, const SchemeConfig &scheme,
                                const FbsConfig &fbs) {
  params.validate();
  fbs.validate();
  if (!(params.B > 0.0)) throw InvalidArgument("fbs_optimize requires B > 0");
  check_time_grid(m0.size(), grid, "initial control");
  if (!is_admissible(m0, params)) throw InvalidArgument("initial control is not admissible");

  OptimizationResult r;
  ControlPath m = m0;
  double omega = fbs.omega;
  int ascents = 0;

  for (int iter = 0; iter < fbs.max_iter; ++iter) {
    StateSolution state = solve_state(m, params, grid, scheme);
    AdjointSolution adjoint = solve_adjoint(state, m, params, grid, scheme);
    const double J = objective(state, m, params, grid);

    if (!r.J_history.empty() && J > r.J_history.back()) {
      ++ascents;
    } else {
      ascents = 0;
    }
    r.J_history.push_back(J);
    if (fbs.adaptive_relaxation && ascents >= fbs.ascent_window && omega > fbs.omega_floor) {
      omega = std::max(0.5 * omega, fbs.omega_floor);
      ascents = 0;
      std::ostringstream os;
      os << "iteration " << iter << ": J increased " << fbs.ascent_window
         << " times in a row, relaxation reduced to " << omega;
      r.events.push_back(os.str());
    }

    const ControlPath target = characterize_control(state, adjoint, params, grid);
    ControlPath next{std::vector<double>(m.size())};
    for (std::size_t n = 0; n < m.size(); ++n)
      next.values[n] = (1.0 - omega) * m[n] + omega * target[n];
    const double change = sup_distance(next, m);
    r.change_history.push_back(change);
    r.omega_history.push_back(omega);
    r.iterations = iter + 1;

    if (change < fbs.tol) {
      r.converged = true;
      r.m_star = std::move(next);
      r.state = solve_state(r.m_star, params, grid, scheme);
      r.adjoint = solve_adjoint(r.state, r.m_star, params, grid, scheme);
      r.J = objective(r.state, r.m_star, params, grid);
      return r;
    }
    if (iter + 1 == fbs.max_iter) {
      r.m_star = std::move(m);
      r.state = std::move(state);
      r.adjoint = std::move(adjoint);
      r.J = J;
      return r;
    }
    m = std::move(next);
  }
  return r;
}

} // namespace tumorfbs
