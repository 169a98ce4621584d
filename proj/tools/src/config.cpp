#include "tumorfbs_app/config.hpp"

#include <tumorfbs/error.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace tumorfbs::app {

namespace {

struct Malformed : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string &s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Malformed("expected a real number, got '" + s + "'");
  return v;
}

long long parse_integer(const std::string &s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw Malformed("expected an integer, got '" + s + "'");
  return v;
}

std::size_t parse_count(const std::string &s) {
  const long long v = parse_integer(s);
  if (v < 0) throw Malformed("expected a nonnegative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

bool parse_bool(const std::string &s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw Malformed("expected true or false, got '" + s + "'");
}

std::vector<double> parse_list(const std::string &s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + fmt(v[i]);
  return out;
}

Command parse_command(const std::string &s) {
  static const std::map<std::string, Command> table{
      {"steady", Command::steady},         {"simulate", Command::simulate},
      {"optimize", Command::optimize},     {"gradcheck", Command::gradcheck},
      {"crosscheck", Command::crosscheck}, {"sweep", Command::sweep}};
  const auto it = table.find(s);
  if (it == table.end()) throw Malformed("unknown command '" + s + "'");
  return it->second;
}

InitialControl parse_m0_kind(const std::string &s) {
  if (s == "constant") return InitialControl::constant;
  if (s == "cosine") return InitialControl::cosine;
  if (s == "file") return InitialControl::file;
  throw Malformed("m0_kind must be constant, cosine or file, got '" + s + "'");
}

const char *m0_kind_name(InitialControl k) {
  switch (k) {
  case InitialControl::constant: return "constant";
  case InitialControl::cosine: return "cosine";
  case InitialControl::file: return "file";
  }
  return "?";
}

struct Key {
  std::string name;
  std::function<void(RunConfig &, const std::string &)> set;
  std::function<std::string(const RunConfig &)> get;
};

#define REAL_KEY(key, member)                                                                   \
  Key {                                                                                         \
    key, [](RunConfig &c, const std::string &v) { c.member = parse_double(v); },                \
        [](const RunConfig &c) { return fmt(c.member); }                                        \
  }
#define COUNT_KEY(key, member)                                                                  \
  Key {                                                                                         \
    key, [](RunConfig &c, const std::string &v) { c.member = parse_count(v); },                 \
        [](const RunConfig &c) { return std::to_string(c.member); }                             \
  }
#define INT_KEY(key, member)                                                                    \
  Key {                                                                                         \
    key, [](RunConfig &c, const std::string &v) { c.member = static_cast<int>(parse_integer(v)); }, \
        [](const RunConfig &c) { return std::to_string(c.member); }                             \
  }
#define BOOL_KEY(key, member)                                                                   \
  Key {                                                                                         \
    key, [](RunConfig &c, const std::string &v) { c.member = parse_bool(v); },                  \
        [](const RunConfig &c) { return std::string(c.member ? "true" : "false"); }             \
  }
#define TEXT_KEY(key, member)                                                                   \
  Key {                                                                                         \
    key, [](RunConfig &c, const std::string &v) { c.member = v; },                              \
        [](const RunConfig &c) { return c.member; }                                             \
  }
#define LIST_KEY(key, member)                                                                   \
  Key {                                                                                         \
    key, [](RunConfig &c, const std::string &v) { c.member = parse_list(v); },                  \
        [](const RunConfig &c) { return fmt_list(c.member); }                                   \
  }

const std::vector<Key> &key_table() {
  static const std::vector<Key> keys{
      Key{"command", [](RunConfig &c, const std::string &v) { c.command = parse_command(v); },
          [](const RunConfig &c) { return to_string(c.command); }},
      REAL_KEY("sigma_tilde", params.sigma_tilde),
      REAL_KEY("mu", params.mu),
      REAL_KEY("B", params.B),
      REAL_KEY("M", params.M),
      REAL_KEY("rho0", params.rho0),
      REAL_KEY("T", params.T),
      REAL_KEY("u0_perturb_amp", params.u0_perturb_amp),
      REAL_KEY("u0_perturb_freq", params.u0_perturb_freq),
      TEXT_KEY("u0_file", u0_file),
      COUNT_KEY("n_xi", n_xi),
      COUNT_KEY("n_t", n_t),
      REAL_KEY("theta", scheme.theta),
      REAL_KEY("bounds_monitor_tol", scheme.bounds_monitor_tol),
      Key{"advection",
          [](RunConfig &c, const std::string &v) {
            if (v == "centered") c.scheme.advection = Advection::centered;
            else if (v == "upwind") c.scheme.advection = Advection::upwind;
            else throw Malformed("advection must be centered or upwind, got '" + v + "'");
          },
          [](const RunConfig &c) {
            return std::string(c.scheme.advection == Advection::upwind ? "upwind" : "centered");
          }},
      BOOL_KEY("strict_bounds", scheme.strict_bounds),
      REAL_KEY("tol", fbs.tol),
      INT_KEY("max_iter", fbs.max_iter),
      REAL_KEY("omega", fbs.omega),
      REAL_KEY("omega_floor", fbs.omega_floor),
      INT_KEY("ascent_window", fbs.ascent_window),
      BOOL_KEY("adaptive_relaxation", fbs.adaptive_relaxation),
      Key{"m0_kind", [](RunConfig &c, const std::string &v) { c.m0_kind = parse_m0_kind(v); },
          [](const RunConfig &c) { return std::string(m0_kind_name(c.m0_kind)); }},
      REAL_KEY("m0_value", m0_value),
      REAL_KEY("m0_cos_amp", m0_cos_amp),
      REAL_KEY("m0_cos_freq", m0_cos_freq),
      TEXT_KEY("m0_file", m0_file),
      TEXT_KEY("output_dir", output_dir),
      REAL_KEY("steady_m0", steady_m0),
      REAL_KEY("steady_tol", steady_tol),
      INT_KEY("steady_max_iter", steady_max_iter),
      REAL_KEY("fd_eps", fd_eps),
      REAL_KEY("gradcheck_freq", gradcheck_freq),
      REAL_KEY("crosscheck_T", crosscheck_T),
      LIST_KEY("sweep_sigma_tilde", sweep_sigma_tilde),
      LIST_KEY("sweep_B", sweep_B),
      LIST_KEY("sweep_M", sweep_M),
      LIST_KEY("sweep_mu", sweep_mu),
      Key{"workers",
          [](RunConfig &c, const std::string &v) {
            c.workers = static_cast<unsigned>(parse_count(v));
          },
          [](const RunConfig &c) { return std::to_string(c.workers); }},
      BOOL_KEY("sweep_fail_on_error", sweep_fail_on_error),
      COUNT_KEY("nutrient_stride", nutrient_stride),
  };
  return keys;
}

#undef REAL_KEY
#undef COUNT_KEY
#undef INT_KEY
#undef BOOL_KEY
#undef TEXT_KEY
#undef LIST_KEY

const Key *find_key(const std::string &name) {
  for (const auto &k : key_table())
    if (k.name == name) return &k;
  return nullptr;
}

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// First configuration key mentioned as a whole word in an error message.
std::string key_mentioned(const std::string &message) {
  std::string best;
  std::size_t best_pos = std::string::npos;
  for (const auto &k : key_table()) {
    std::size_t pos = 0;
    while ((pos = message.find(k.name, pos)) != std::string::npos) {
      const std::size_t end = pos + k.name.size();
      const bool left = pos == 0 || !is_word_char(message[pos - 1]);
      const bool right = end == message.size() || !is_word_char(message[end]);
      if (left && right) {
        if (pos < best_pos) {
          best_pos = pos;
          best = k.name;
        }
        break;
      }
      pos = end;
    }
  }
  return best;
}

void validate(const RunConfig &c, const std::map<std::string, std::string> &where) {
  const auto fail = [&](const std::string &message) {
    const std::string key = key_mentioned(message);
    const auto it = where.find(key);
    throw ConfigError(it != where.end() ? it->second : "configuration", message);
  };
  const auto check = [&](bool ok, const std::string &message) {
    if (!ok) fail(message);
  };
  try {
    c.params.validate();
    c.scheme.validate();
    c.fbs.validate();
    (void)c.grid();
  } catch (const InvalidArgument &e) {
    fail(e.what());
  }

  check(c.n_xi >= 5, "n_xi must be at least 5");
  check(c.n_t >= 3, "n_t must be at least 3");
  check(c.nutrient_stride >= 1, "nutrient_stride must be at least 1");
  check(c.steady_tol > 0.0, "steady_tol must be positive");
  check(c.steady_max_iter > 0, "steady_max_iter must be positive");
  check(c.steady_m0 >= 0.0 && c.steady_m0 <= c.params.M, "steady_m0 must lie in [0, M]");
  check(c.fd_eps > 0.0, "fd_eps must be positive");
  check(std::isfinite(c.gradcheck_freq), "gradcheck_freq must be finite");
  check(c.crosscheck_T > 0.0, "crosscheck_T must be positive");
  check(!c.output_dir.empty(), "output_dir must not be empty");
  check(c.u0_file.empty() || std::filesystem::is_regular_file(c.u0_file),
        "u0_file does not exist: " + c.u0_file);
  if (c.command == Command::steady || c.command == Command::sweep ||
      c.command == Command::optimize)
    check(c.params.B > 0.0, "B must be positive for optimization commands");

  switch (c.m0_kind) {
  case InitialControl::file:
    check(!c.m0_file.empty(), "m0_file is required when m0_kind = file");
    check(std::filesystem::is_regular_file(c.m0_file), "m0_file does not exist: " + c.m0_file);
    break;
  case InitialControl::constant:
    check(c.m0_value >= 0.0 && c.m0_value <= c.params.M, "m0_value must lie in [0, M]");
    break;
  case InitialControl::cosine:
    check(c.m0_value - std::abs(c.m0_cos_amp) >= 0.0 &&
              c.m0_value + std::abs(c.m0_cos_amp) <= c.params.M,
          "m0_value +- m0_cos_amp must stay within [0, M]");
    break;
  }

  const auto check_sweep = [&](const std::vector<double> &values, const char *key,
                               void (*apply)(ModelParams &, double)) {
    for (double v : values) {
      ModelParams p = c.params;
      apply(p, v);
      try {
        p.validate();
        if (!(p.B > 0.0)) throw InvalidArgument("B must be positive");
      } catch (const InvalidArgument &e) {
        const auto it = where.find(key);
        throw ConfigError(it != where.end() ? it->second : "configuration",
                          std::string(key) + " entry " + fmt(v) + ": " + e.what());
      }
    }
  };
  check_sweep(c.sweep_sigma_tilde, "sweep_sigma_tilde",
              [](ModelParams &p, double v) { p.sigma_tilde = v; });
  check_sweep(c.sweep_B, "sweep_B", [](ModelParams &p, double v) { p.B = v; });
  check_sweep(c.sweep_M, "sweep_M", [](ModelParams &p, double v) { p.M = v; });
  check_sweep(c.sweep_mu, "sweep_mu", [](ModelParams &p, double v) { p.mu = v; });
}

} // namespace

std::string to_string(Command c) {
  switch (c) {
  case Command::steady: return "steady";
  case Command::simulate: return "simulate";
  case Command::optimize: return "optimize";
  case Command::gradcheck: return "gradcheck";
  case Command::crosscheck: return "crosscheck";
  case Command::sweep: return "sweep";
  }
  return "?";
}

const std::vector<std::string> &config_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto &k : key_table()) n.push_back(k.name);
    return n;
  }();
  return names;
}

std::vector<Assignment> read_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open configuration file");
  std::vector<Assignment> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = path + ":" + std::to_string(lineno);
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected 'key = value'");
    Assignment a{trim(std::string_view(text).substr(0, eq)),
                 trim(std::string_view(text).substr(eq + 1)), where};
    if (a.key.empty()) throw ConfigError(where, "missing key before '='");
    out.push_back(std::move(a));
  }
  return out;
}

RunConfig build_config(const std::vector<Assignment> &assignments) {
  RunConfig c;
  std::map<std::string, std::string> where;
  for (const auto &a : assignments) {
    const Key *key = find_key(a.key);
    if (!key) throw ConfigError(a.where, "unknown key '" + a.key + "'");
    try {
      key->set(c, a.value);
    } catch (const Malformed &e) {
      throw ConfigError(a.where, "malformed value for '" + a.key + "': " + e.what());
    }
    where[a.key] = a.where;
  }
  validate(c, where);
  return c;
}

std::string echo_config(const RunConfig &config) {
  std::string out;
  for (const auto &k : key_table()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

} // namespace tumorfbs::app
