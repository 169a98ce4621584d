#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace tumorfbs {

/// Physical and optimization constants of the controlled flat-tumor model.
///
/// The initial nutrient profile is either the analytic one,
///   u0(xi) = cosh(rho0 xi) / cosh(rho0) + a cos(k pi xi),
/// or a tabulated profile (`u0_table`, one value per spatial node).
struct ModelParams {
  double sigma_tilde = 0.25; ///< nutrient threshold, in (0,1)
  double mu = 0.5;           ///< proliferation intensity
  double B = 0.05;           ///< side-effect weight
  double M = 1.0;            ///< upper control bound
  double rho0 = 2.0;         ///< initial thickness
  double T = 5.0;            ///< time horizon
  double u0_perturb_amp = 0.1;
  double u0_perturb_freq = 3.5; ///< multiple of pi
  std::vector<double> u0_table; ///< empty: use the analytic profile

  /// Throws InvalidArgument naming the first violated invariant.
  void validate() const;
};

/// Uniform space-time grid on [0,1] x [0,T].
class Grid {
public:
  Grid(std::size_t n_xi, std::size_t n_t, double T);

  std::size_t n_xi() const noexcept { return n_xi_; }
  std::size_t n_t() const noexcept { return n_t_; }
  double T() const noexcept { return T_; }
  double dxi() const noexcept { return dxi_; }
  double dt() const noexcept { return dt_; }
  double xi(std::size_t j) const noexcept;
  double t(std::size_t n) const noexcept;

  std::vector<double> xi_nodes() const;
  std::vector<double> t_nodes() const;

  /// Same grid with spacing halved in both directions.
  Grid refined() const;

  bool operator==(const Grid &) const = default;

private:
  std::size_t n_xi_;
  std::size_t n_t_;
  double T_;
  double dxi_;
  double dt_;
};

/// Row-major n_t x n_xi field sampled on a Grid.
class Field {
public:
  Field() = default;
  Field(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double &operator()(std::size_t n, std::size_t j) { return data_[n * cols_ + j]; }
  double operator()(std::size_t n, std::size_t j) const { return data_[n * cols_ + j]; }

  std::span<double> row(std::size_t n) { return {data_.data() + n * cols_, cols_}; }
  std::span<const double> row(std::size_t n) const {
    return {data_.data() + n * cols_, cols_};
  }

  const std::vector<double> &data() const noexcept { return data_; }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Time-sampled inhibitor schedule m(t_n).
struct ControlPath {
  std::vector<double> values;

  static ControlPath constant(const Grid &grid, double value);
  /// m(t) = base + amp cos(freq pi t)
  static ControlPath cosine(const Grid &grid, double base, double amp, double freq);

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t n) const { return values[n]; }
};

struct ControlViolation {
  std::size_t index;
  double value;
};

/// Every index where m leaves [0, M]. Empty means m is admissible.
std::vector<ControlViolation> validate_control(const ControlPath &m, const ModelParams &params);

bool is_admissible(const ControlPath &m, const ModelParams &params);

/// Monitor counters filled in by the state solver.
struct BoundsMonitor {
  double min_u = 0.0;
  double max_u = 0.0;
  std::size_t violations = 0; ///< nodes outside [-tol, 1+tol]
};

/// Solution of the front-fixed state system.
struct StateSolution {
  Field u;                        ///< u(xi_j, t_n)
  std::vector<double> rho;        ///< rho(t_n)
  std::vector<double> rho_prime;  ///< rho'(t_n) from the ODE right-hand side
  BoundsMonitor monitor;
};

/// Backward-in-time adjoint pair (w, lambda).
struct AdjointSolution {
  Field w;
  std::vector<double> lambda;
};

/// Linearized response (v, eta) of the state to a control direction h.
struct SensitivityPair {
  Field v;
  std::vector<double> eta;
};

/// Steady optimizer bundle.
struct SteadyStateSolution {
  double m = 0.0;
  double rho = 0.0;
  std::vector<double> u_profile;
  std::vector<double> w_profile;
  double lambda = 0.0;
  double J = 0.0;
  std::vector<double> history; ///< control iterates m_0, m_1, ...
};

/// u0 on the grid. Uses `params.u0_table` when non-empty (after
/// check_initial_profile), the analytic profile otherwise.
std::vector<double> build_initial_profile(const ModelParams &params, const Grid &grid);

/// Compatibility check for tabulated data: size n_xi and |u0(1) - 1| <= 1e-12.
void check_initial_profile(std::span<const double> u0, const Grid &grid);

/// Reads one real per line (blank lines and '#' comments ignored).
std::vector<double> read_profile_file(const std::string &path);

/// Nodes where u0 leaves [0,1]. Reported, not rejected.
std::vector<std::size_t> initial_profile_out_of_range(std::span<const double> u0);

} // namespace tumorfbs
