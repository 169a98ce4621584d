#pragma once

#include <tumorfbs/control.hpp>
#include <tumorfbs/model.hpp>
#include <tumorfbs/pde.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace tumorfbs::app {

enum class Command { steady, simulate, optimize, gradcheck, crosscheck, sweep };
enum class InitialControl { constant, cosine, file };

/// Invalid configuration; `where()` is "path:line", "--flag" or "configuration".
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string where, const std::string &what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string &where() const noexcept { return where_; }

private:
  std::string where_;
};

struct RunConfig {
  Command command = Command::optimize;
  ModelParams params;
  std::string u0_file; ///< optional tabulated initial profile
  std::size_t n_xi = 201;
  std::size_t n_t = 2001;
  SchemeConfig scheme;
  FbsConfig fbs;

  InitialControl m0_kind = InitialControl::constant;
  double m0_value = 0.35;
  double m0_cos_amp = 0.1;
  double m0_cos_freq = 4.0; ///< multiple of pi
  std::string m0_file;
  std::string output_dir = "out";

  // steady
  double steady_m0 = 0.8;
  double steady_tol = 1e-5;
  int steady_max_iter = 500;
  // gradcheck
  double fd_eps = 1e-4;
  double gradcheck_freq = 4.0; ///< second direction cos(freq pi t)
  // crosscheck
  double crosscheck_T = 50.0;
  // sweep
  std::vector<double> sweep_sigma_tilde, sweep_B, sweep_M, sweep_mu;
  unsigned workers = 0; ///< 0: hardware concurrency
  bool sweep_fail_on_error = false;
  // output
  std::size_t nutrient_stride = 1; ///< write every k-th time level of u

  Grid grid() const { return Grid(n_xi, n_t, params.T); }
};

std::string to_string(Command c);

/// Source of one key = value assignment, used in error messages.
struct Assignment {
  std::string key;
  std::string value;
  std::string where;
};

/// Reads `key = value` lines ('#' starts a comment). Syntax errors carry the
/// file line.
std::vector<Assignment> read_config_file(const std::string &path);

/// Applies assignments in order (later wins), then validates every
/// invariant. Errors name the line or flag that set the offending key.
RunConfig build_config(const std::vector<Assignment> &assignments);

/// Every recognised key.
const std::vector<std::string> &config_keys();

/// `key = value` lines reproducing the configuration.
std::string echo_config(const RunConfig &config);

} // namespace tumorfbs::app
