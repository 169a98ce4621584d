#include "tumorfbs_app/csv.hpp"

#include "tumorfbs_app/config.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace tumorfbs::app {

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  add_row(header);
}

void CsvWriter::add_row(const std::vector<std::string> &row) {
  if (row.size() != columns_) throw std::invalid_argument("CSV row has the wrong column count");
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) text_ += ',';
    text_ += row[i];
  }
  text_ += '\n';
}

void CsvWriter::add_row(const std::vector<double> &row) {
  std::vector<std::string> cells;
  cells.reserve(row.size());
  for (double v : row) cells.push_back(format_real(v));
  add_row(cells);
}

void CsvWriter::save(const std::string &path) const { write_text_file(path, text_); }

void write_text_file(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_control_csv(const std::string &path, const Grid &grid, const ControlPath &m) {
  CsvWriter csv({"t", "m"});
  for (std::size_t n = 0; n < grid.n_t(); ++n) csv.add_row(std::vector<double>{grid.t(n), m[n]});
  csv.save(path);
}

ControlPath read_control_csv(const std::string &path, const Grid &grid) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open control file");
  ControlPath m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line == "t,m") continue;
    const auto comma = line.find(',');
    const std::string where = path + ":" + std::to_string(lineno);
    if (comma == std::string::npos) throw ConfigError(where, "expected 't,m'");
    double t = 0.0, v = 0.0;
    const auto parse = [&](std::string_view s, double &out) {
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      if (ec != std::errc() || p != s.data() + s.size())
        throw ConfigError(where, "malformed number '" + std::string(s) + "'");
    };
    parse(std::string_view(line).substr(0, comma), t);
    parse(std::string_view(line).substr(comma + 1), v);
    const std::size_t n = m.values.size();
    if (n >= grid.n_t() || std::abs(t - grid.t(n)) > 1e-9 * std::max(1.0, grid.T()))
      throw ConfigError(where, "time node does not match the configured grid");
    m.values.push_back(v);
  }
  if (m.size() != grid.n_t())
    throw ConfigError(path, "expected " + std::to_string(grid.n_t()) + " time nodes, found " +
                                std::to_string(m.size()));
  return m;
}

void write_thickness_csv(const std::string &path, const Grid &grid,
                         const std::vector<double> &rho,
                         const std::vector<double> *rho_uncontrolled) {
  CsvWriter csv(rho_uncontrolled ? std::vector<std::string>{"t", "rho", "rho_uncontrolled"}
                                 : std::vector<std::string>{"t", "rho"});
  for (std::size_t n = 0; n < grid.n_t(); ++n) {
    if (rho_uncontrolled)
      csv.add_row(std::vector<double>{grid.t(n), rho[n], (*rho_uncontrolled)[n]});
    else
      csv.add_row(std::vector<double>{grid.t(n), rho[n]});
  }
  csv.save(path);
}

void write_nutrient_csv(const std::string &path, const Grid &grid, const Field &u,
                        std::size_t stride) {
  if (stride == 0) stride = 1;
  std::vector<std::string> header{"t"};
  for (std::size_t j = 0; j < grid.n_xi(); ++j) header.push_back(format_real(grid.xi(j)));
  CsvWriter csv(std::move(header));
  std::vector<double> row(grid.n_xi() + 1);
  for (std::size_t n = 0; n < grid.n_t(); ++n) {
    if (n % stride != 0 && n + 1 != grid.n_t()) continue;
    row[0] = grid.t(n);
    for (std::size_t j = 0; j < grid.n_xi(); ++j) row[j + 1] = u(n, j);
    csv.add_row(row);
  }
  csv.save(path);
}

void write_history_csv(const std::string &path, const OptimizationResult &result) {
  CsvWriter csv({"iteration", "J", "change", "omega"});
  for (std::size_t i = 0; i < result.J_history.size(); ++i)
    csv.add_row(std::vector<std::string>{std::to_string(i), format_real(result.J_history[i]),
                                         format_real(result.change_history[i]),
                                         format_real(result.omega_history[i])});
  csv.save(path);
}

} // namespace tumorfbs::app
