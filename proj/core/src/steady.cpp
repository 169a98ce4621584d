#include "tumorfbs/steady.hpp"

#include "tumorfbs/error.hpp"
#include "tumorfbs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace tumorfbs {

void RootSolverConfig::validate() const {
  if (!(abs_tol > 0.0)) throw InvalidArgument("root solver tolerance must be positive");
  if (max_iter <= 0) throw InvalidArgument("root solver max_iter must be positive");
  if (!(bracket_lo < bracket_hi)) throw InvalidArgument("root bracket must satisfy lo < hi");
  if (!(bisection_width > 0.0)) throw InvalidArgument("bisection width must be positive");
}

namespace {

// Root of a strictly monotone f on [lo, hi] given f(lo) and f(hi) of
// opposite sign. Residual is measured as |f| / scale.
double hybrid_root(const std::function<double(double)> &f,
                   const std::function<double(double)> &df, double lo, double hi, double scale,
                   const RootSolverConfig &cfg, const char *what) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    std::ostringstream os;
    os << what << ": root not bracketed in [" << lo << ", " << hi << "]";
    throw SolverError(os.str());
  }

  int iter = 0;
  while (hi - lo > cfg.bisection_width && iter < cfg.max_iter) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
    ++iter;
  }

  double x = 0.5 * (lo + hi);
  for (; iter < cfg.max_iter; ++iter) {
    const double fx = f(x);
    if (std::abs(fx) <= cfg.abs_tol * scale) return x;
    if ((fx > 0.0) == (flo > 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = (d != 0.0 && std::isfinite(d)) ? x - fx / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) return x;
    x = next;
  }
  std::ostringstream os;
  os << what << ": no convergence within " << cfg.max_iter << " iterations";
  throw SolverError(os.str(), static_cast<std::size_t>(cfg.max_iter));
}

} // namespace

double g_eval(double x) {
  if (!(x >= 0.0)) throw InvalidArgument("g(x) is defined for x >= 0");
  if (x < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0;
  }
  return std::tanh(x) / x;
}

double g_derivative(double x) {
  if (!(x >= 0.0)) throw InvalidArgument("g(x) is defined for x >= 0");
  if (x < 1e-4) return -2.0 * x / 3.0 + 8.0 * x * x * x / 15.0;
  const double sech = 1.0 / std::cosh(x);
  return (x * sech * sech - std::tanh(x)) / (x * x);
}

double g_inverse(double s, const RootSolverConfig &cfg) {
  cfg.validate();
  if (!(s > 0.0 && s < 1.0)) throw InvalidArgument("g_inverse: argument must lie in (0,1)");
  // g(x) < 1/x, so the bracket is widened to 1/s for small s.
  const double hi = std::max(cfg.bracket_hi, 1.0 / s);
  return hybrid_root([s](double x) { return g_eval(x) - s; }, g_derivative, cfg.bracket_lo, hi,
                     1.0, cfg, "g_inverse");
}

double steady_rho(double m, const ModelParams &params, const RootSolverConfig &cfg) {
  if (!(m >= 0.0)) throw InvalidArgument("steady_rho: control must be nonnegative");
  return g_inverse(params.sigma_tilde, cfg) / std::sqrt(1.0 + m);
}

double steady_drho_dm(double m, const ModelParams &params, const RootSolverConfig &cfg) {
  if (!(m >= 0.0)) throw InvalidArgument("steady_drho_dm: control must be nonnegative");
  return -0.5 * g_inverse(params.sigma_tilde, cfg) / std::pow(1.0 + m, 1.5);
}

std::vector<double> steady_u_profile(double m, double rho, const Grid &grid) {
  if (!(m >= 0.0)) throw InvalidArgument("steady_u_profile: control must be nonnegative");
  if (!(rho > 0.0)) throw InvalidArgument("steady_u_profile: rho must be positive");
  const double k = std::sqrt(1.0 + m) * rho;
  const double denom = std::cosh(k);
  std::vector<double> u(grid.n_xi());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = std::cosh(k * grid.xi(j)) / denom;
  u.back() = 1.0;
  return u;
}

double optimal_m_unclamped(const ModelParams &params, const RootSolverConfig &cfg) {
  params.validate();
  if (!(params.B > 0.0)) throw InvalidArgument("optimal_m_direct requires B > 0");
  const double rhs = g_inverse(params.sigma_tilde, cfg) / (4.0 * params.B);
  const double hi = std::max(params.M, 100.0);
  const auto h = [rhs](double m) { return m * std::pow(1.0 + m, 1.5) - rhs; };
  const auto dh = [](double m) {
    return std::pow(1.0 + m, 1.5) + 1.5 * m * std::sqrt(1.0 + m);
  };
  if (h(hi) < 0.0) return hi;
  RootSolverConfig local = cfg;
  local.max_iter = std::max(cfg.max_iter, 200);
  return hybrid_root(h, dh, 0.0, hi, std::max(1.0, rhs), local, "optimal control equation");
}

double optimal_m_direct(const ModelParams &params, const RootSolverConfig &cfg) {
  return std::min(optimal_m_unclamped(params, cfg), params.M);
}

double steady_lambda(double m, double rho, const ModelParams &params) {
  if (!(m >= 0.0) || !(rho > 0.0))
    throw InvalidArgument("steady_lambda: need m >= 0 and rho > 0");
  const double x = std::sqrt(1.0 + m) * rho;
  const double sech = 1.0 / std::cosh(x);
  const double denom = params.mu * (g_eval(x) - sech * sech);
  if (!(denom > 0.0)) throw SolverError("steady_lambda: non-positive denominator; (m, rho) inconsistent");
  return 1.0 / denom;
}

std::vector<double> steady_w_profile(double m, double rho, double lambda,
                                     const ModelParams &params, const Grid &grid) {
  if (!(m >= 0.0) || !(rho > 0.0))
    throw InvalidArgument("steady_w_profile: need m >= 0 and rho > 0");
  const double k = std::sqrt(1.0 + m) * rho;
  const double scale = params.mu * lambda * rho / (1.0 + m);
  const double denom = std::cosh(k);
  std::vector<double> w(grid.n_xi());
  for (std::size_t j = 0; j < w.size(); ++j)
    w[j] = scale * (1.0 - std::cosh(k * grid.xi(j)) / denom);
  w.back() = 0.0;
  return w;
}

double steady_objective(double m, const ModelParams &params, const RootSolverConfig &cfg) {
  return steady_rho(m, params, cfg) + params.B * m * m;
}

SteadyStateSolution steady_bundle(double m, const ModelParams &params, const Grid &grid,
                                  const RootSolverConfig &cfg) {
  SteadyStateSolution s;
  s.m = m;
  s.rho = steady_rho(m, params, cfg);
  s.u_profile = steady_u_profile(m, s.rho, grid);
  s.lambda = steady_lambda(m, s.rho, params);
  s.w_profile = steady_w_profile(m, s.rho, s.lambda, params, grid);
  s.J = s.rho + params.B * m * m;
  return s;
}

SteadyStateSolution steady_fixed_point(double m0, const ModelParams &params, const Grid &grid,
                                       double tol, int max_iter, const RootSolverConfig &cfg) {
  params.validate();
  if (!(params.B > 0.0)) throw InvalidArgument("steady_fixed_point requires B > 0");
  if (!(m0 >= 0.0 && m0 <= params.M)) throw InvalidArgument("m0 must lie in [0, M]");
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");

  std::vector<double> history{m0};
  double m = m0;
  for (int i = 0; i < max_iter; ++i) {
    const SteadyStateSolution it = steady_bundle(m, params, grid, cfg);
    const double raw = trapz_product(it.w_profile, it.u_profile, grid.dxi()) / (2.0 * params.B);
    const double next = std::clamp(raw, 0.0, params.M);
    history.push_back(next);
    if (std::abs(next - m) < tol) {
      SteadyStateSolution out = steady_bundle(next, params, grid, cfg);
      out.history = std::move(history);
      return out;
    }
    m = next;
  }
  throw ConvergenceError("steady fixed point did not converge", std::move(history));
}

} // namespace tumorfbs
