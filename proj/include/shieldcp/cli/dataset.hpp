#pragma once

// Self-describing tabular output: a commented metadata preamble, a header
// row of "name [unit]" columns, then data.  Numbers are printed in
// scientific notation with 9 significant digits so reruns are byte-identical.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace shieldcp::cli {

inline constexpr const char* tool_version = "shieldcp 0.1.0";

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless, "" for text
};

using Cell = std::variant<double, std::string>;

struct Dataset {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> notes;

  void add_meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }
};

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.8e", v);
  return buf;
}

inline std::string format_cell(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  return std::get<std::string>(c);
}

inline std::string column_header(const Column& c) {
  return c.unit.empty() ? c.name : c.name + " [" + c.unit + "]";
}

inline std::string to_csv(const Dataset& d) {
  std::ostringstream os;
  for (const auto& [k, v] : d.metadata) os << "# " << k << ": " << v << '\n';
  for (const auto& n : d.notes) os << "# note: " << n << '\n';
  for (std::size_t i = 0; i < d.columns.size(); ++i) os << (i ? "," : "") << column_header(d.columns[i]);
  os << '\n';
  for (const auto& row : d.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

/// JSON form.  Numeric cells are rounded to the same 9 digits as CSV;
/// non-finite values become null.
inline std::string to_structured(const Dataset& d) {
  nlohmann::ordered_json j;
  auto& meta = j["metadata"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : d.metadata) meta[k] = v;
  j["notes"] = d.notes;
  auto& cols = j["columns"] = nlohmann::ordered_json::array();
  for (const auto& c : d.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  auto& rows = j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : d.rows) {
    auto row = nlohmann::ordered_json::array();
    for (const auto& c : r) {
      if (const auto* v = std::get_if<double>(&c)) {
        if (std::isfinite(*v))
          row.push_back(std::stod(format_number(*v)));
        else
          row.push_back(nullptr);
      } else {
        row.push_back(std::get<std::string>(c));
      }
    }
    rows.push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

/// 64-bit FNV-1a, used to fingerprint the effective configuration.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace shieldcp::cli
