#include "tumorfbs/model.hpp"

#include "tumorfbs/error.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tumorfbs {

namespace {

void require(bool ok, const std::string &message) {
  if (!ok) throw InvalidArgument(message);
}

bool is_odd_half_multiple(double k) {
  const double twice = 2.0 * k;
  const double nearest = std::round(twice);
  return std::abs(twice - nearest) <= 1e-12 && std::fmod(std::abs(nearest), 2.0) == 1.0;
}

} // namespace

void ModelParams::validate() const {
  require(std::isfinite(sigma_tilde) && sigma_tilde > 0.0 && sigma_tilde < 1.0,
          "sigma_tilde must lie in (0,1)");
  require(std::isfinite(mu) && mu > 0.0, "mu must be positive");
  require(std::isfinite(B) && B >= 0.0, "B must be nonnegative");
  require(std::isfinite(M) && M > 0.0, "M must be positive");
  require(std::isfinite(rho0) && rho0 > 0.0, "rho0 must be positive");
  require(std::isfinite(T) && T > 0.0, "T must be positive");
  require(std::isfinite(u0_perturb_amp), "u0_perturb_amp must be finite");
  require(std::isfinite(u0_perturb_freq) && u0_perturb_freq > 0.0,
          "u0_perturb_freq must be positive");
  if (u0_perturb_amp != 0.0) {
    require(is_odd_half_multiple(u0_perturb_freq),
            "u0_perturb_freq must be an odd multiple of 1/2 so that u0(1) = 1");
  }
}

Grid::Grid(std::size_t n_xi, std::size_t n_t, double T) : n_xi_(n_xi), n_t_(n_t), T_(T) {
  require(n_xi >= 3, "n_xi must be at least 3");
  require(n_t >= 2, "n_t must be at least 2");
  require(std::isfinite(T) && T > 0.0, "T must be positive");
  dxi_ = 1.0 / static_cast<double>(n_xi - 1);
  dt_ = T / static_cast<double>(n_t - 1);
}

double Grid::xi(std::size_t j) const noexcept {
  return j + 1 == n_xi_ ? 1.0 : static_cast<double>(j) * dxi_;
}

double Grid::t(std::size_t n) const noexcept {
  return n + 1 == n_t_ ? T_ : static_cast<double>(n) * dt_;
}

std::vector<double> Grid::xi_nodes() const {
  std::vector<double> out(n_xi_);
  for (std::size_t j = 0; j < n_xi_; ++j) out[j] = xi(j);
  return out;
}

std::vector<double> Grid::t_nodes() const {
  std::vector<double> out(n_t_);
  for (std::size_t n = 0; n < n_t_; ++n) out[n] = t(n);
  return out;
}

Grid Grid::refined() const { return Grid(2 * n_xi_ - 1, 2 * n_t_ - 1, T_); }

ControlPath ControlPath::constant(const Grid &grid, double value) {
  return ControlPath{std::vector<double>(grid.n_t(), value)};
}

ControlPath ControlPath::cosine(const Grid &grid, double base, double amp, double freq) {
  ControlPath m{std::vector<double>(grid.n_t())};
  for (std::size_t n = 0; n < grid.n_t(); ++n)
    m.values[n] = base + amp * std::cos(freq * std::numbers::pi * grid.t(n));
  return m;
}

std::vector<ControlViolation> validate_control(const ControlPath &m, const ModelParams &params) {
  std::vector<ControlViolation> out;
  for (std::size_t n = 0; n < m.size(); ++n) {
    const double v = m.values[n];
    if (!(v >= 0.0 && v <= params.M)) out.push_back({n, v});
  }
  return out;
}

bool is_admissible(const ControlPath &m, const ModelParams &params) {
  return validate_control(m, params).empty();
}

std::vector<double> build_initial_profile(const ModelParams &params, const Grid &grid) {
  params.validate();
  if (!params.u0_table.empty()) {
    check_initial_profile(params.u0_table, grid);
    return params.u0_table;
  }
  std::vector<double> u0(grid.n_xi());
  const double denom = std::cosh(params.rho0);
  const double k = params.u0_perturb_freq * std::numbers::pi;
  for (std::size_t j = 0; j < grid.n_xi(); ++j) {
    const double x = grid.xi(j);
    u0[j] = std::cosh(params.rho0 * x) / denom + params.u0_perturb_amp * std::cos(k * x);
  }
  // cos(k pi) is zero only up to round-off; the Dirichlet value is exact.
  u0.back() = 1.0;
  return u0;
}

void check_initial_profile(std::span<const double> u0, const Grid &grid) {
  if (u0.size() != grid.n_xi()) {
    std::ostringstream os;
    os << "initial profile has " << u0.size() << " values, grid has " << grid.n_xi()
       << " nodes";
    throw InvalidArgument(os.str());
  }
  for (double v : u0) require(std::isfinite(v), "initial profile contains non-finite values");
  require(std::abs(u0.back() - 1.0) <= 1e-12, "initial profile must satisfy u0(1) = 1");
}

std::vector<double> read_profile_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open profile file: " + path);
  std::vector<double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    double v;
    if (!(is >> v)) {
      std::string rest;
      if (std::istringstream(line) >> rest) {
        throw InvalidArgument(path + ":" + std::to_string(lineno) + ": malformed value");
      }
      continue;
    }
    std::string trailing;
    if (is >> trailing)
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected one value per line");
    values.push_back(v);
  }
  return values;
}

std::vector<std::size_t> initial_profile_out_of_range(std::span<const double> u0) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < u0.size(); ++j)
    if (u0[j] < 0.0 || u0[j] > 1.0) out.push_back(j);
  return out;
}

} // namespace tumorfbs
