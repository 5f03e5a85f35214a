#include "dysonlab/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <stdexcept>

#include "dysonlab/errors.hpp"
#include "dysonlab/parallel.hpp"

namespace dysonlab {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DYSONLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void ExperimentReport::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size())
    throw DomainError("ExperimentReport '" + name + "': row width does not match the column schema");
  rows.push_back(std::move(row));
}

void ExperimentReport::set_meta(const std::string& key, std::string value) {
  for (auto& [k, v] : metadata) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  metadata.emplace_back(key, std::move(value));
}

std::size_t ExperimentReport::column(const std::string& column_name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == column_name) return i;
  throw DomainError("ExperimentReport '" + name + "': no column '" + column_name + "'");
}

double ExperimentReport::number(std::size_t row, const std::string& column_name) const {
  const Cell& c = rows.at(row).at(column(column_name));
  if (const auto* d = std::get_if<double>(&c)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
  throw DomainError("ExperimentReport '" + name + "': column '" + column_name + "' is not numeric");
}

const std::string& ExperimentReport::text(std::size_t row, const std::string& column_name) const {
  return std::get<std::string>(rows.at(row).at(column(column_name)));
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

}  // namespace

void write_csv(const ExperimentReport& report, std::ostream& out) {
  for (std::size_t i = 0; i < report.columns.size(); ++i)
    out << (i ? "," : "") << csv_field(report.columns[i]);
  out << "\r\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_field(cell_text(row[i]));
    out << "\r\n";
  }
}

nlohmann::ordered_json to_json(const ExperimentReport& report) {
  nlohmann::ordered_json j;
  j["name"] = report.name;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.metadata) meta[k] = v;
  j["metadata"] = meta;
  j["columns"] = report.columns;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array();
    for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace dysonlab
