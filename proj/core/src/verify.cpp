#include "tumorfbs/verify.hpp"

#include "tumorfbs/control.hpp"
#include "tumorfbs/error.hpp"
#include "tumorfbs/quadrature.hpp"
#include "tumorfbs/steady.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace tumorfbs {

namespace {

ControlPath shifted(const ControlPath &m, const ControlPath &h, double s) {
  ControlPath out{m.values};
  for (std::size_t n = 0; n < out.size(); ++n) out.values[n] += s * h[n];
  return out;
}

double relative_sup_error(std::span<const double> approx, std::span<const double> ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    num = std::max(num, std::abs(approx[i] - ref[i]));
    den = std::max(den, std::abs(ref[i]));
  }
  return den > 0.0 ? num / den : num;
}

} // namespace

double fd_objective_derivative(const ControlPath &m, const ControlPath &h, double eps,
                               const ModelParams &params, const Grid &grid,
                               const SchemeConfig &scheme) {
  if (!(eps > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  if (h.size() != m.size()) throw InvalidArgument("direction and control sizes differ");
  const ControlPath plus = shifted(m, h, eps);
  const ControlPath minus = shifted(m, h, -eps);
  const double jp = objective(solve_state(plus, params, grid, scheme), plus, params, grid);
  const double jm = objective(solve_state(minus, params, grid, scheme), minus, params, grid);
  return (jp - jm) / (2.0 * eps);
}

SensitivityCheck sensitivity_fd_check(const ControlPath &m, const ControlPath &h, double eps,
                                      const ModelParams &params, const Grid &grid,
                                      const SchemeConfig &scheme) {
  if (!(eps > 0.0)) throw InvalidArgument("finite-difference step must be positive");
  if (h.size() != m.size()) throw InvalidArgument("direction and control sizes differ");
  const StateSolution base = solve_state(m, params, grid, scheme);
  const SensitivityPair sens = solve_sensitivity(base, m, h, params, grid, scheme);
  const StateSolution sp = solve_state(shifted(m, h, eps), params, grid, scheme);
  const StateSolution sm = solve_state(shifted(m, h, -eps), params, grid, scheme);

  std::vector<double> dq_rho(grid.n_t());
  for (std::size_t n = 0; n < grid.n_t(); ++n) dq_rho[n] = (sp.rho[n] - sm.rho[n]) / (2.0 * eps);
  std::vector<double> dq_u(sp.u.data().size());
  for (std::size_t i = 0; i < dq_u.size(); ++i)
    dq_u[i] = (sp.u.data()[i] - sm.u.data()[i]) / (2.0 * eps);

  SensitivityCheck out;
  out.eta_rel_error = relative_sup_error(sens.eta, dq_rho);
  out.v_rel_error = relative_sup_error(sens.v.data(), dq_u);
  return out;
}

BoundsReport audit_state_bounds(const StateSolution &state, const ModelParams &params,
                                double tol) {
  using Kind = BoundsViolation::Kind;
  constexpr double slack = 1e-6;
  BoundsReport report;
  const std::size_t n_t = state.rho.size();
  if (n_t < 2 || state.u.rows() != n_t)
    throw InvalidArgument("state has inconsistent time dimensions");
  const double dt = params.T / static_cast<double>(n_t - 1);

  for (std::size_t n = 0; n < n_t; ++n) {
    for (std::size_t j = 0; j < state.u.cols(); ++j) {
      const double u = state.u(n, j);
      if (!(u > -tol)) report.violations.push_back({Kind::nutrient_below, n, j, u});
      else if (!(u < 1.0 + tol)) report.violations.push_back({Kind::nutrient_above, n, j, u});
    }
    const double t = dt * static_cast<double>(n);
    const double lo = params.rho0 * std::exp(-params.mu * params.sigma_tilde * t);
    const double hi = params.rho0 * std::exp(params.mu * (1.0 - params.sigma_tilde) * t);
    const double rho = state.rho[n];
    if (!(rho >= lo * (1.0 - slack))) report.violations.push_back({Kind::thickness_below, n, 0, rho});
    else if (!(rho <= hi * (1.0 + slack)))
      report.violations.push_back({Kind::thickness_above, n, 0, rho});
  }
  return report;
}

std::string describe(const BoundsViolation &v) {
  using Kind = BoundsViolation::Kind;
  std::ostringstream os;
  switch (v.kind) {
  case Kind::nutrient_below: os << "u below 0"; break;
  case Kind::nutrient_above: os << "u above 1"; break;
  case Kind::thickness_below: os << "rho below decay envelope"; break;
  case Kind::thickness_above: os << "rho above growth envelope"; break;
  }
  os << " at step " << v.step << ", node " << v.node << ": " << v.value;
  return os.str();
}

SteadyCrosscheck steady_parabolic_crosscheck(double m, double T_long, const ModelParams &params,
                                             const Grid &grid, bool start_at_steady,
                                             const SchemeConfig &scheme) {
  if (!(T_long > 0.0)) throw InvalidArgument("crosscheck horizon must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(T_long / grid.dt()));
  const Grid long_grid(grid.n_xi(), std::max<std::size_t>(steps, 1) + 1, T_long);

  ModelParams p = params;
  p.T = T_long;
  SteadyCrosscheck out;
  out.rho_steady = steady_rho(m, params);
  if (start_at_steady) {
    p.rho0 = out.rho_steady;
    p.u0_table = steady_u_profile(m, out.rho_steady, long_grid);
  }
  const StateSolution s = solve_state(ControlPath::constant(long_grid, m), p, long_grid, scheme);
  out.rho_final = s.rho.back();
  out.final_deviation = std::abs(out.rho_final - out.rho_steady);
  for (double r : s.rho) out.max_deviation = std::max(out.max_deviation, std::abs(r - out.rho_steady));
  return out;
}

double AdjointIdentity::mismatch() const { return std::abs(forward - backward); }

namespace {

// Finite-difference helpers on a row of n_xi samples with Neumann data at 0.
std::vector<double> d_xi(std::span<const double> f, double h, bool neumann_at_zero) {
  const std::size_t N = f.size();
  std::vector<double> d(N);
  d[0] = neumann_at_zero ? 0.0 : (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  for (std::size_t j = 1; j + 1 < N; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * h);
  d[N - 1] = (3.0 * f[N - 1] - 4.0 * f[N - 2] + f[N - 3]) / (2.0 * h);
  return d;
}

std::vector<double> d_xixi(std::span<const double> f, double h) {
  const std::size_t N = f.size();
  const double h2 = h * h;
  std::vector<double> d(N);
  d[0] = 2.0 * (f[1] - f[0]) / h2;
  for (std::size_t j = 1; j + 1 < N; ++j) d[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / h2;
  d[N - 1] = (2.0 * f[N - 1] - 5.0 * f[N - 2] + 4.0 * f[N - 3] - f[N - 4]) / h2;
  return d;
}

double d_t(std::span<const double> f, std::size_t n, double dt) {
  return n == 0 ? (f[1] - f[0]) / dt : (f[n] - f[n - 1]) / dt;
}

struct TestFields {
  Field v, w;
  std::vector<double> eta, lambda;
};

TestFields make_test_fields(const Grid &grid, std::uint64_t seed) {
  constexpr int modes = 3;
  constexpr double pi = std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  double a[modes], b[modes], c[modes], d[modes];
  for (int k = 0; k < modes; ++k) {
    a[k] = coef(rng);
    b[k] = coef(rng);
    c[k] = coef(rng);
    d[k] = coef(rng);
  }
  const double e0 = coef(rng), e1 = coef(rng), l0 = coef(rng), l1 = coef(rng);

  TestFields f{Field(grid.n_t(), grid.n_xi()), Field(grid.n_t(), grid.n_xi()),
               std::vector<double>(grid.n_t()), std::vector<double>(grid.n_t())};
  const double T = grid.T();
  for (std::size_t n = 0; n < grid.n_t(); ++n) {
    const double s = grid.t(n) / T;
    f.eta[n] = s * (e0 + e1 * std::cos(pi * s));
    f.lambda[n] = (1.0 - s) * (l0 + l1 * std::sin(pi * s));
    for (std::size_t j = 0; j < grid.n_xi(); ++j) {
      double v = 0.0, w = 0.0;
      for (int k = 0; k < modes; ++k) {
        const double phi = std::cos((k + 0.5) * pi * grid.xi(j));
        v += a[k] * s * (1.0 + b[k] * std::cos(pi * s)) * phi;
        w += c[k] * (1.0 - s) * (1.0 + d[k] * std::sin(pi * s)) * phi;
      }
      f.v(n, j) = v;
      f.w(n, j) = w;
    }
  }
  return f;
}

std::vector<double> column_in_time(const Field &f, std::size_t j) {
  std::vector<double> c(f.rows());
  for (std::size_t n = 0; n < f.rows(); ++n) c[n] = f(n, j);
  return c;
}

} // namespace

AdjointIdentity adjoint_identity_check(const ControlPath &m, const ModelParams &params,
                                       const Grid &grid, std::uint64_t seed,
                                       const SchemeConfig &scheme) {
  if (grid.n_xi() < 5 || grid.n_t() < 3)
    throw InvalidArgument("adjoint identity check needs n_xi >= 5 and n_t >= 3");
  const StateSolution st = solve_state(m, params, grid, scheme);
  const TestFields tf = make_test_fields(grid, seed);
  const std::size_t Nx = grid.n_xi(), Nt = grid.n_t();
  const double h = grid.dxi(), dt = grid.dt(), mu = params.mu;
  const auto xi = grid.xi_nodes();

  std::vector<std::vector<double>> v_cols(Nx), w_cols(Nx);
  for (std::size_t j = 0; j < Nx; ++j) {
    v_cols[j] = column_in_time(tf.v, j);
    w_cols[j] = column_in_time(tf.w, j);
  }

  std::vector<double> fwd(Nt), bwd(Nt);
  std::vector<double> f1(Nx), g1(Nx), xw(Nx), tmp(Nx);
  for (std::size_t n = 0; n < Nt; ++n) {
    const auto u = st.u.row(n);
    const auto v = tf.v.row(n);
    const auto w = tf.w.row(n);
    const double rho = st.rho[n];
    const double adv = st.rho_prime[n] / rho;
    const double I = mu * (trapz(u, h) - params.sigma_tilde);
    const double inv_rho2 = 1.0 / (rho * rho);
    const double react = 1.0 + m[n];

    const auto u_x = d_xi(u, h, true);
    const auto u_xx = d_xixi(u, h);
    const auto v_x = d_xi(v, h, true);
    const auto v_xx = d_xixi(v, h);
    const auto w_x = d_xi(w, h, true);
    const auto w_xx = d_xixi(w, h);
    for (std::size_t j = 0; j < Nx; ++j) xw[j] = xi[j] * w[j];
    const auto xw_x = d_xi(xw, h, false);

    const double int_v = trapz(v, h);
    for (std::size_t j = 0; j < Nx; ++j) tmp[j] = w[j] * xi[j] * u_x[j];
    const double int_w_xi_ux = trapz(tmp, h);
    const double int_wx_ux = trapz_product(w_x, u_x, h);

    for (std::size_t j = 0; j < Nx; ++j) {
      f1[j] = d_t(v_cols[j], n, dt) - adv * xi[j] * v_x[j] - inv_rho2 * v_xx[j] + react * v[j] -
              mu * int_v * xi[j] * u_x[j] + 2.0 * tf.eta[n] / (rho * rho * rho) * u_xx[j];
      g1[j] = -d_t(w_cols[j], n, dt) + adv * xw_x[j] - inv_rho2 * w_xx[j] + react * w[j] -
              mu * int_w_xi_ux - mu * tf.lambda[n] * rho;
    }
    const double f2 = d_t(tf.eta, n, dt) - tf.eta[n] * I - rho * mu * int_v;
    const double g2 = -d_t(tf.lambda, n, dt) - tf.lambda[n] * I -
                      2.0 / (rho * rho * rho) * int_wx_ux;

    fwd[n] = trapz_product(f1, w, h) + f2 * tf.lambda[n];
    bwd[n] = trapz_product(v, g1, h) + tf.eta[n] * g2;
  }
  return {trapz(fwd, dt), trapz(bwd, dt)};
}

} // namespace tumorfbs
