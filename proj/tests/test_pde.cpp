#include <tumorfbs/control.hpp>
#include <tumorfbs/error.hpp>
#include <tumorfbs/pde.hpp>
#include <tumorfbs/quadrature.hpp>
#include <tumorfbs/tridiagonal.hpp>
#include <tumorfbs/verify.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace tumorfbs;

namespace {

constexpr double pi = std::numbers::pi;

ModelParams base_params() { return ModelParams{}; }

// Dense Gaussian elimination with partial pivoting.
std::vector<double> dense_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
    std::swap(A[k], A[piv]);
    std::swap(b[k], b[piv]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

double weighted_dot(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0.5 * a[0] * b[0];
  for (std::size_t j = 1; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

} // namespace

TEST(Tridiagonal, MatchesDenseSolve) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> d(-1, 1);
  const std::size_t n = 9;
  Tridiagonal A(n);
  std::vector<std::vector<double>> dense(n, std::vector<double>(n, 0.0));
  std::vector<double> b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A.lower[i] = i > 0 ? d(rng) : 0.0;
    A.upper[i] = i + 1 < n ? d(rng) : 0.0;
    A.diag[i] = 3.0 + d(rng);
    dense[i][i] = A.diag[i];
    if (i > 0) dense[i][i - 1] = A.lower[i];
    if (i + 1 < n) dense[i][i + 1] = A.upper[i];
    b[i] = d(rng);
  }
  const auto expected = dense_solve(dense, b);
  solve_tridiagonal(A, b);
  for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(b[i], expected[i], 1e-13);
}

TEST(Tridiagonal, ZeroPivotThrows) {
  Tridiagonal A(2);
  A.diag = {0.0, 1.0};
  std::vector<double> b{1.0, 1.0};
  EXPECT_THROW(solve_tridiagonal(A, b), SolverError);
}

TEST(Stencil, AdjointOperatorIsWeightedTranspose) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1, 1);
  const Grid g(12, 2, 1.0);
  for (auto kind : {Advection::centered, Advection::upwind}) {
    for (double a : {0.37, -0.21}) {
      const auto op = stencil::state_operator(g, a, 0.3, 1.4, kind);
      const auto adj = stencil::adjoint_operator(op);
      std::vector<double> u(g.n_xi()), w(g.n_xi());
      for (std::size_t j = 0; j + 1 < g.n_xi(); ++j) {
        u[j] = d(rng);
        w[j] = d(rng);
      }
      u.back() = 0.0;
      w.back() = 0.0;
      auto Au = stencil::apply(op, u);
      auto Aw = stencil::apply(adj, w);
      std::vector<double> uf(u.begin(), u.end() - 1), wf(w.begin(), w.end() - 1);
      EXPECT_NEAR(weighted_dot(Au, wf), weighted_dot(uf, Aw), 1e-12);
    }
  }
}

TEST(Stencil, SecondOrderConsistency) {
  // A u = -a xi u' - d u'' + c u for u = cos(pi xi / 2) + 1 (u'(0) = 0).
  const double a = 0.4, dcoef = 0.2, c = 1.3;
  const auto err = [&](std::size_t n) {
    const Grid g(n, 2, 1.0);
    std::vector<double> u(n);
    for (std::size_t j = 0; j < n; ++j) u[j] = std::cos(pi * g.xi(j) / 2) + 1;
    const auto Au = stencil::apply(stencil::state_operator(g, a, dcoef, c, Advection::centered), u);
    double e = 0.0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double x = g.xi(j);
      const double exact = a * x * (pi / 2) * std::sin(pi * x / 2) +
                           dcoef * (pi * pi / 4) * std::cos(pi * x / 2) + c * u[j];
      e = std::max(e, std::abs(Au[j] - exact));
    }
    return e;
  };
  EXPECT_NEAR(std::log2(err(41) / err(81)), 2.0, 0.2);
}

TEST(State, InitialAndBoundaryData) {
  const auto p = base_params();
  const Grid g(51, 201, p.T);
  const auto s = solve_state(ControlPath::constant(g, 0.35), p, g);
  ASSERT_EQ(s.u.rows(), g.n_t());
  ASSERT_EQ(s.u.cols(), g.n_xi());
  EXPECT_EQ(s.rho[0], p.rho0);
  const auto u0 = build_initial_profile(p, g);
  for (std::size_t j = 0; j < g.n_xi(); ++j) EXPECT_EQ(s.u(0, j), u0[j]);
  for (std::size_t n = 0; n < g.n_t(); ++n) EXPECT_EQ(s.u(n, g.n_xi() - 1), 1.0);
  EXPECT_EQ(s.monitor.violations, 0u);
  EXPECT_GT(s.monitor.min_u, 0.0);
  EXPECT_LE(s.monitor.max_u, 1.0);
}

TEST(State, ThicknessFollowsTheDiscreteGrowthLaw) {
  const auto p = base_params();
  const Grid g(41, 101, p.T);
  const auto s = solve_state(ControlPath::constant(g, 0.2), p, g);
  for (std::size_t n = 0; n + 1 < g.n_t(); ++n) {
    const double I = p.mu * (trapz(s.u.row(n), g.dxi()) - p.sigma_tilde);
    EXPECT_NEAR(s.rho[n + 1], s.rho[n] * (1 + g.dt() * I), 1e-13);
    EXPECT_NEAR(s.rho_prime[n + 1], s.rho[n + 1] * I, 1e-13);
  }
}

TEST(State, FirstOrderInTime) {
  auto p = base_params();
  p.T = 1.0;
  const auto rho_end = [&](std::size_t nt) {
    const Grid g(101, nt, p.T);
    return solve_state(ControlPath::constant(g, 0.35), p, g).rho.back();
  };
  const double r1 = rho_end(51), r2 = rho_end(101), r3 = rho_end(201);
  EXPECT_NEAR(std::log2(std::abs(r1 - r2) / std::abs(r2 - r3)), 1.0, 0.15);
}

TEST(State, ControlReducesThickness) {
  const auto p = base_params();
  const Grid g(51, 201, p.T);
  const auto free = solve_state(ControlPath::constant(g, 0.0), p, g);
  const auto treated = solve_state(ControlPath::constant(g, 0.5), p, g);
  // rho(t_1) only sees u0; the control acts from the second step on.
  EXPECT_EQ(treated.rho[1], free.rho[1]);
  for (std::size_t n = 2; n < g.n_t(); ++n) EXPECT_LT(treated.rho[n], free.rho[n]);
}

TEST(State, RejectsMismatchedInputs) {
  const auto p = base_params();
  const Grid g(21, 51, p.T);
  EXPECT_THROW(solve_state(ControlPath::constant(Grid(21, 50, p.T), 0.1), p, g), InvalidArgument);
  EXPECT_THROW(solve_state(ControlPath::constant(g, 0.1), p, Grid(21, 51, 3.0)), InvalidArgument);
  SchemeConfig bad;
  bad.theta = 1.5;
  EXPECT_THROW(solve_state(ControlPath::constant(g, 0.1), p, g, bad), InvalidArgument);
}

TEST(State, MonitorCountsAndStrictModeThrows) {
  auto p = base_params();
  const Grid g(21, 41, p.T);
  p.u0_table.assign(g.n_xi(), 1.0);
  for (std::size_t j = 0; j < 10; ++j) p.u0_table[j] = 1.8;
  const auto s = solve_state(ControlPath::constant(g, 0.0), p, g);
  EXPECT_GT(s.monitor.violations, 0u);
  EXPECT_GT(s.monitor.max_u, 1.0);
  SchemeConfig strict;
  strict.strict_bounds = true;
  EXPECT_THROW(solve_state(ControlPath::constant(g, 0.0), p, g, strict), SolverError);
}

TEST(State, CrankNicolsonAndUpwindAgreeWithDefault) {
  const auto p = base_params();
  const Grid g(101, 801, p.T);
  const auto m = ControlPath::constant(g, 0.35);
  const double ref = solve_state(m, p, g).rho.back();
  SchemeConfig cn;
  cn.theta = 0.5;
  SchemeConfig up;
  up.advection = Advection::upwind;
  EXPECT_NEAR(solve_state(m, p, g, cn).rho.back(), ref, 5e-3);
  EXPECT_NEAR(solve_state(m, p, g, up).rho.back(), ref, 5e-3);
}

TEST(Adjoint, TerminalAndBoundaryConditions) {
  const auto p = base_params();
  const Grid g(41, 101, p.T);
  const auto m = ControlPath::constant(g, 0.35);
  const auto s = solve_state(m, p, g);
  const auto a = solve_adjoint(s, m, p, g);
  EXPECT_EQ(a.lambda.back(), 0.0);
  for (std::size_t j = 0; j < g.n_xi(); ++j) EXPECT_EQ(a.w(g.n_t() - 1, j), 0.0);
  for (std::size_t n = 0; n < g.n_t(); ++n) EXPECT_EQ(a.w(n, g.n_xi() - 1), 0.0);
  for (double l : a.lambda) EXPECT_TRUE(std::isfinite(l));
  EXPECT_GT(a.lambda.front(), 0.0);
}

TEST(Adjoint, NonlocalSourcesMatter) {
  const auto p = base_params();
  const Grid g(41, 101, p.T);
  const auto m = ControlPath::constant(g, 0.35);
  const auto s = solve_state(m, p, g);
  const auto full = solve_adjoint(s, m, p, g);
  const auto local = solve_adjoint(s, m, p, g, {}, AdjointOptions{false});
  double diff = 0.0;
  for (std::size_t i = 0; i < full.w.data().size(); ++i)
    diff = std::max(diff, std::abs(full.w.data()[i] - local.w.data()[i]));
  EXPECT_GT(diff, 1e-3);
}

TEST(Adjoint, ComponentwiseGradientIsExact) {
  // d J / d m_n by finite differences on single time nodes.
  const auto p = base_params();
  const Grid g(31, 81, p.T);
  const auto m = ControlPath::cosine(g, 0.35, 0.1, 4.0);
  const auto s = solve_state(m, p, g);
  const auto a = solve_adjoint(s, m, p, g);
  for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{17}, std::size_t{79},
                        std::size_t{80}}) {
    ControlPath e = ControlPath::constant(g, 0.0);
    e.values[n] = 1.0;
    const double adj = adjoint_directional_derivative(s, a, m, e, p, g);
    const double fd = fd_objective_derivative(m, e, 1e-5, p, g);
    EXPECT_NEAR(adj, fd, 1e-8 + 1e-5 * std::abs(fd)) << "node " << n;
  }
}

TEST(Adjoint, GradientExactForOtherSchemes) {
  const auto p = base_params();
  const Grid g(31, 101, p.T);
  const auto m = ControlPath::cosine(g, 0.35, 0.1, 4.0);
  const auto h = ControlPath::cosine(g, 0.0, 1.0, 2.0);
  SchemeConfig cn;
  cn.theta = 0.5;
  SchemeConfig up;
  up.advection = Advection::upwind;
  for (const auto &scheme : {cn, up}) {
    const auto s = solve_state(m, p, g, scheme);
    const auto a = solve_adjoint(s, m, p, g, scheme);
    const double adj = adjoint_directional_derivative(s, a, m, h, p, g, scheme);
    const double fd = fd_objective_derivative(m, h, 1e-5, p, g, scheme);
    EXPECT_NEAR(adj, fd, 1e-6 * std::abs(fd));
  }
}

TEST(Sensitivity, ZeroDirectionGivesZeroResponse) {
  const auto p = base_params();
  const Grid g(21, 51, p.T);
  const auto m = ControlPath::constant(g, 0.35);
  const auto s = solve_state(m, p, g);
  const auto r = solve_sensitivity(s, m, ControlPath::constant(g, 0.0), p, g);
  for (double e : r.eta) EXPECT_EQ(e, 0.0);
  for (double v : r.v.data()) EXPECT_EQ(v, 0.0);
}

TEST(Sensitivity, LinearInDirection) {
  const auto p = base_params();
  const Grid g(21, 51, p.T);
  const auto m = ControlPath::constant(g, 0.35);
  const auto s = solve_state(m, p, g);
  const auto h1 = ControlPath::constant(g, 1.0);
  const auto h2 = ControlPath::cosine(g, 0.0, 1.0, 4.0);
  ControlPath comb = h1;
  for (std::size_t n = 0; n < comb.size(); ++n) comb.values[n] = 2.0 * h1[n] - 3.0 * h2[n];
  const auto r1 = solve_sensitivity(s, m, h1, p, g);
  const auto r2 = solve_sensitivity(s, m, h2, p, g);
  const auto rc = solve_sensitivity(s, m, comb, p, g);
  for (std::size_t n = 0; n < g.n_t(); ++n)
    EXPECT_NEAR(rc.eta[n], 2.0 * r1.eta[n] - 3.0 * r2.eta[n], 1e-12);
}

TEST(Sensitivity, InitialAndBoundaryData) {
  const auto p = base_params();
  const Grid g(21, 51, p.T);
  const auto m = ControlPath::constant(g, 0.35);
  const auto s = solve_state(m, p, g);
  const auto r = solve_sensitivity(s, m, ControlPath::constant(g, 1.0), p, g);
  EXPECT_EQ(r.eta[0], 0.0);
  for (std::size_t j = 0; j < g.n_xi(); ++j) EXPECT_EQ(r.v(0, j), 0.0);
  for (std::size_t n = 0; n < g.n_t(); ++n) EXPECT_EQ(r.v(n, g.n_xi() - 1), 0.0);
  // More inhibitor, thinner layer.
  for (std::size_t n = 2; n < g.n_t(); ++n) EXPECT_LT(r.eta[n], 0.0);
}

TEST(Sensitivity, AgreesWithDifferenceQuotients) {
  const auto p = base_params();
  const Grid g(31, 101, p.T);
  const auto m = ControlPath::constant(g, 0.35);
  const auto c = sensitivity_fd_check(m, ControlPath::cosine(g, 0.0, 1.0, 4.0), 1e-5, p, g);
  EXPECT_LT(c.eta_rel_error, 1e-5);
  EXPECT_LT(c.v_rel_error, 1e-5);
}

TEST(Sensitivity, DualityWithAdjoint) {
  // dJ[h] from the adjoint equals int (eta + 2 B m h) dt from the sensitivity.
  const auto p = base_params();
  const Grid g(31, 101, p.T);
  const auto m = ControlPath::cosine(g, 0.4, 0.2, 3.0);
  const auto h = ControlPath::cosine(g, 0.5, 1.0, 1.0);
  const auto s = solve_state(m, p, g);
  const auto r = solve_sensitivity(s, m, h, p, g);
  std::vector<double> integrand(g.n_t());
  for (std::size_t n = 0; n < g.n_t(); ++n) integrand[n] = r.eta[n] + 2 * p.B * m[n] * h[n];
  const double via_sensitivity = trapz(integrand, g.dt());
  const double via_adjoint =
      adjoint_directional_derivative(s, solve_adjoint(s, m, p, g), m, h, p, g);
  EXPECT_NEAR(via_adjoint, via_sensitivity, 1e-10 * std::abs(via_sensitivity) + 1e-12);
}
