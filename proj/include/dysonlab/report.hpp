#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace dysonlab {

using Cell = std::variant<std::int64_t, double, std::string>;

/// Tabular experiment result: ordered metadata plus rows under a fixed
/// column schema.
struct ExperimentReport {
  std::string name;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  ExperimentReport() = default;
  ExperimentReport(std::string report_name, std::vector<std::string> column_names)
      : name(std::move(report_name)), columns(std::move(column_names)) {}

  void add_row(std::vector<Cell> row);
  void set_meta(const std::string& key, std::string value);

  std::size_t column(const std::string& column_name) const;
  /// Numeric cell (integer cells are widened).
  double number(std::size_t row, const std::string& column_name) const;
  const std::string& text(std::size_t row, const std::string& column_name) const;
};

/// Shortest round-trip text for a double, "%.17g" style.
std::string format_number(double v);

/// RFC-4180 CSV: header row, CRLF line ends, quoted fields where needed.
void write_csv(const ExperimentReport& report, std::ostream& out);

nlohmann::ordered_json to_json(const ExperimentReport& report);

}  // namespace dysonlab
