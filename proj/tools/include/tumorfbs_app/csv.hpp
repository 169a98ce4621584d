#pragma once

#include <tumorfbs/control.hpp>
#include <tumorfbs/model.hpp>

#include <string>
#include <vector>

namespace tumorfbs::app {

/// Shortest-safe lossless decimal: 17 significant digits.
std::string format_real(double v);

/// Comma-separated table with a header row and LF line endings.
class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  void add_row(const std::vector<double> &row);
  void add_row(const std::vector<std::string> &row);
  const std::string &text() const noexcept { return text_; }
  void save(const std::string &path) const;

private:
  std::size_t columns_;
  std::string text_;
};

void write_text_file(const std::string &path, const std::string &text);

/// control.csv: t,m
void write_control_csv(const std::string &path, const Grid &grid, const ControlPath &m);
/// Reads the m column of a control.csv; time nodes must match `grid`.
ControlPath read_control_csv(const std::string &path, const Grid &grid);

/// thickness.csv: t,rho[,rho_uncontrolled]
void write_thickness_csv(const std::string &path, const Grid &grid,
                         const std::vector<double> &rho,
                         const std::vector<double> *rho_uncontrolled);

/// nutrient.csv: header "t,xi_0,...,xi_N", then one row "t_n,u(xi_0,t_n),..." per
/// `stride`-th time level (the last level is always written).
void write_nutrient_csv(const std::string &path, const Grid &grid, const Field &u,
                        std::size_t stride = 1);

/// history.csv: iteration,J,change,omega
void write_history_csv(const std::string &path, const OptimizationResult &result);

} // namespace tumorfbs::app
