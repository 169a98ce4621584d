#include "tumorfbs_app/run.hpp"

#include "tumorfbs_app/csv.hpp"

#include <tumorfbs/control.hpp>
#include <tumorfbs/error.hpp>
#include <tumorfbs/steady.hpp>
#include <tumorfbs/verify.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace tumorfbs::app {

namespace {

struct Outcome {
  int code = exit_ok;
  double J = std::nan("");
  double integral_m = std::nan("");
  double time_at_upper = std::nan("");
  int iterations = 0;
  bool converged = false;
  std::string message;
};

std::string path_in(const RunConfig &c, const char *name) {
  return (fs::path(c.output_dir) / name).string();
}

struct Setup {
  Grid grid;
  ModelParams params;
};

Setup prepare(const RunConfig &c, std::ostream &log) {
  Setup s{c.grid(), c.params};
  if (!c.u0_file.empty()) {
    s.params.u0_table = read_profile_file(c.u0_file);
    check_initial_profile(s.params.u0_table, s.grid);
  }
  const auto u0 = build_initial_profile(s.params, s.grid);
  if (const auto bad = initial_profile_out_of_range(u0); !bad.empty())
    log << "warning: initial nutrient leaves [0,1] at " << bad.size() << " node(s), first at xi = "
        << s.grid.xi(bad.front()) << "\n";
  return s;
}

ControlPath initial_control(const RunConfig &c, const Grid &grid) {
  switch (c.m0_kind) {
  case InitialControl::constant: return ControlPath::constant(grid, c.m0_value);
  case InitialControl::cosine:
    return ControlPath::cosine(grid, c.m0_value, c.m0_cos_amp, c.m0_cos_freq);
  case InitialControl::file: return read_control_csv(c.m0_file, grid);
  }
  return {};
}

void report_monitor(const StateSolution &s, std::ostream &log) {
  if (s.monitor.violations > 0)
    log << "warning: nutrient left [0,1] at " << s.monitor.violations
        << " node(s) (min " << s.monitor.min_u << ", max " << s.monitor.max_u
        << "); consider advection = upwind\n";
}

std::string kv(const std::string &key, double v) { return key + " = " + format_real(v) + "\n"; }

Outcome run_steady(const RunConfig &c, const Setup &s, std::ostream &) {
  Outcome out;
  const double direct = optimal_m_direct(s.params);
  SteadyStateSolution sol;
  try {
    sol = steady_fixed_point(c.steady_m0, s.params, s.grid, c.steady_tol, c.steady_max_iter);
    out.converged = true;
  } catch (const ConvergenceError &e) {
    sol.history = e.history();
    out.code = exit_not_converged;
    out.message = e.what();
  }
  CsvWriter it({"iteration", "m"});
  for (std::size_t i = 0; i < sol.history.size(); ++i)
    it.add_row(std::vector<std::string>{std::to_string(i), format_real(sol.history[i])});
  it.save(path_in(c, "iterates.csv"));

  std::string text;
  if (out.converged) {
    text += kv("m", sol.m) + kv("rho", sol.rho) + kv("lambda", sol.lambda) + kv("J", sol.J);
    out.J = sol.J;
  }
  text += kv("m_direct", direct);
  text += "iterations = " + std::to_string(sol.history.empty() ? 0 : sol.history.size() - 1) + "\n";
  text += std::string("converged = ") + (out.converged ? "true" : "false") + "\n";
  write_text_file(path_in(c, "steady.txt"), text);
  out.iterations = static_cast<int>(sol.history.size());
  return out;
}

void write_trajectory(const RunConfig &c, const Setup &s, const ControlPath &m,
                      const StateSolution &state, const StateSolution &uncontrolled) {
  write_control_csv(path_in(c, "control.csv"), s.grid, m);
  write_thickness_csv(path_in(c, "thickness.csv"), s.grid, state.rho, &uncontrolled.rho);
  write_nutrient_csv(path_in(c, "nutrient.csv"), s.grid, state.u, c.nutrient_stride);
}

Outcome run_simulate(const RunConfig &c, const Setup &s, std::ostream &log) {
  const ControlPath m = initial_control(c, s.grid);
  if (!is_admissible(m, s.params))
    log << "warning: control leaves [0, M] at " << validate_control(m, s.params).size()
        << " node(s)\n";
  const StateSolution state = solve_state(m, s.params, s.grid, c.scheme);
  const StateSolution base = solve_state(ControlPath::constant(s.grid, 0.0), s.params, s.grid, c.scheme);
  report_monitor(state, log);
  write_trajectory(c, s, m, state, base);

  Outcome out;
  out.J = objective(state, m, s.params, s.grid);
  out.converged = true;
  write_text_file(path_in(c, "summary.txt"),
                  kv("J", out.J) + kv("rho_final", state.rho.back()) +
                      kv("rho_uncontrolled_final", base.rho.back()) +
                      kv("min_u", state.monitor.min_u) + kv("max_u", state.monitor.max_u) +
                      "monitor_violations = " + std::to_string(state.monitor.violations) +
                      "\n\n# parameters\n" + echo_config(c));
  return out;
}

Outcome run_optimize(const RunConfig &c, const Setup &s, std::ostream &log) {
  const ControlPath m0 = initial_control(c, s.grid);
  const OptimizationResult r = fbs_optimize(m0, s.params, s.grid, c.scheme, c.fbs);
  for (const auto &e : r.events) log << "note: " << e << "\n";
  report_monitor(r.state, log);
  const StateSolution base = solve_state(ControlPath::constant(s.grid, 0.0), s.params, s.grid, c.scheme);
  write_trajectory(c, s, r.m_star, r.state, base);
  write_history_csv(path_in(c, "history.csv"), r);

  Outcome out;
  out.J = r.J;
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.integral_m = control_integral(r.m_star, s.grid);
  out.time_at_upper = time_at_upper_bound(r.m_star, s.grid, s.params.M);
  std::string text = kv("J", r.J) + kv("J_initial", r.J_history.front()) +
                     "iterations = " + std::to_string(r.iterations) + "\n" +
                     "converged = " + (r.converged ? "true" : "false") + "\n" +
                     kv("final_change", r.change_history.back()) +
                     kv("rho_final", r.state.rho.back()) +
                     kv("rho_uncontrolled_final", base.rho.back()) +
                     kv("integral_m", out.integral_m) + kv("time_at_upper_bound", out.time_at_upper);
  for (const auto &e : r.events) text += "# " + e + "\n";
  text += "\n# parameters\n" + echo_config(c);
  write_text_file(path_in(c, "summary.txt"), text);
  if (!r.converged) {
    out.code = exit_not_converged;
    out.message = "forward-backward sweep did not converge in " + std::to_string(r.iterations) +
                  " iterations (last change " + format_real(r.change_history.back()) + ")";
  }
  return out;
}

Outcome run_gradcheck(const RunConfig &c, const Setup &s, std::ostream &) {
  const ControlPath m = initial_control(c, s.grid);
  const StateSolution state = solve_state(m, s.params, s.grid, c.scheme);
  const AdjointSolution adjoint = solve_adjoint(state, m, s.params, s.grid, c.scheme);

  CsvWriter csv({"direction", "adjoint", "finite_difference", "relative_error",
                 "eta_relative_error", "v_relative_error"});
  const std::pair<std::string, ControlPath> directions[] = {
      {"constant", ControlPath::constant(s.grid, 1.0)},
      {"cosine", ControlPath::cosine(s.grid, 0.0, 1.0, c.gradcheck_freq)}};
  Outcome out;
  out.J = objective(state, m, s.params, s.grid);
  out.converged = true;
  for (const auto &[name, h] : directions) {
    const double adj = adjoint_directional_derivative(state, adjoint, m, h, s.params, s.grid, c.scheme);
    const double fd = fd_objective_derivative(m, h, c.fd_eps, s.params, s.grid, c.scheme);
    const double rel = std::abs(adj - fd) / std::max(std::abs(fd), 1e-300);
    const auto sens = sensitivity_fd_check(m, h, c.fd_eps, s.params, s.grid, c.scheme);
    csv.add_row(std::vector<std::string>{name, format_real(adj), format_real(fd), format_real(rel),
                                         format_real(sens.eta_rel_error),
                                         format_real(sens.v_rel_error)});
  }
  csv.save(path_in(c, "gradcheck.csv"));
  write_text_file(path_in(c, "summary.txt"), kv("J", out.J) + "\n# parameters\n" + echo_config(c));
  return out;
}

Outcome run_crosscheck(const RunConfig &c, const Setup &s, std::ostream &) {
  const auto r = steady_parabolic_crosscheck(c.m0_value, c.crosscheck_T, s.params, s.grid, false, c.scheme);
  write_text_file(path_in(c, "crosscheck.txt"),
                  kv("m", c.m0_value) + kv("horizon", c.crosscheck_T) +
                      kv("rho_final", r.rho_final) + kv("rho_steady", r.rho_steady) +
                      kv("final_deviation", r.final_deviation));
  Outcome out;
  out.converged = true;
  return out;
}

Outcome dispatch(const RunConfig &c, std::ostream &log) {
  try {
    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    if (ec || !fs::is_directory(c.output_dir))
      return {exit_bad_config, NAN, NAN, NAN, 0, false,
              "output_dir is not writable: " + c.output_dir};
    const Setup s = prepare(c, log);
    switch (c.command) {
    case Command::steady: return run_steady(c, s, log);
    case Command::simulate: return run_simulate(c, s, log);
    case Command::optimize: return run_optimize(c, s, log);
    case Command::gradcheck: return run_gradcheck(c, s, log);
    case Command::crosscheck: return run_crosscheck(c, s, log);
    case Command::sweep: break;
    }
    return {exit_bad_config, NAN, NAN, NAN, 0, false, "sweep must be run through sweep()"};
  } catch (const ConfigError &e) {
    return {exit_bad_config, NAN, NAN, NAN, 0, false, e.what()};
  } catch (const InvalidArgument &e) {
    return {exit_bad_config, NAN, NAN, NAN, 0, false, e.what()};
  } catch (const ConvergenceError &e) {
    return {exit_not_converged, NAN, NAN, NAN, 0, false, e.what()};
  } catch (const std::exception &e) {
    return {exit_solver_failure, NAN, NAN, NAN, 0, false, e.what()};
  }
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

} // namespace

int run(const RunConfig &config, std::ostream &log) {
  if (config.command == Command::sweep) return sweep(config, log);
  const Outcome out = dispatch(config, log);
  if (out.code != exit_ok) log << "error: " << out.message << "\n";
  return out.code;
}

int sweep(const RunConfig &config, std::ostream &log) {
  const auto axis = [](const std::vector<double> &v, double base) {
    return v.empty() ? std::vector<double>{base} : v;
  };
  const auto sig = axis(config.sweep_sigma_tilde, config.params.sigma_tilde);
  const auto Bs = axis(config.sweep_B, config.params.B);
  const auto Ms = axis(config.sweep_M, config.params.M);
  const auto mus = axis(config.sweep_mu, config.params.mu);

  std::vector<RunConfig> runs;
  for (double s : sig)
    for (double b : Bs)
      for (double m : Ms)
        for (double u : mus) {
          RunConfig r = config;
          r.command = Command::optimize;
          r.params.sigma_tilde = s;
          r.params.B = b;
          r.params.M = m;
          r.params.mu = u;
          char name[32];
          std::snprintf(name, sizeof name, "run_%03zu", runs.size());
          r.output_dir = (fs::path(config.output_dir) / name).string();
          runs.push_back(std::move(r));
        }

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec || !fs::is_directory(config.output_dir)) {
    log << "error: output_dir is not writable: " << config.output_dir << "\n";
    return exit_bad_config;
  }

  std::vector<Outcome> outcomes(runs.size());
  std::vector<std::string> logs(runs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < runs.size();) {
      std::ostringstream run_log;
      outcomes[i] = dispatch(runs[i], run_log);
      logs[i] = run_log.str();
    }
  };
  unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(runs.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto &t : pool) t.join();

  CsvWriter index({"run", "sigma_tilde", "B", "M", "mu", "status", "J", "integral_m",
                   "time_at_upper_bound", "iterations", "converged", "directory"});
  int worst = exit_ok;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto &r = runs[i];
    const auto &o = outcomes[i];
    std::string status = "ok";
    if (o.code == exit_not_converged) status = "not_converged";
    else if (o.code != exit_ok) status = "error: " + sanitize(o.message);
    if (o.code != exit_ok) {
      log << "run " << i << ": " << o.message << "\n";
      if (worst == exit_ok || o.code == exit_solver_failure) worst = o.code;
    }
    if (!logs[i].empty()) log << "run " << i << ":\n" << logs[i];
    index.add_row(std::vector<std::string>{
        std::to_string(i), format_real(r.params.sigma_tilde), format_real(r.params.B),
        format_real(r.params.M), format_real(r.params.mu), status, format_real(o.J),
        format_real(o.integral_m), format_real(o.time_at_upper), std::to_string(o.iterations),
        o.converged ? "true" : "false", fs::path(r.output_dir).filename().string()});
  }
  index.save((fs::path(config.output_dir) / "index.csv").string());
  return config.sweep_fail_on_error ? worst : exit_ok;
}

} // namespace tumorfbs::app
