#pragma once

// Flat result tables and their CSV / JSON writers.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "maxlab/errors.hpp"

namespace maxlab {

using Cell = std::variant<double, std::int64_t, std::string, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw UsageError("table row width does not match header");
    rows.push_back(std::move(row));
  }
};

/// 12 significant digits, shortest form ("%.12g").
inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace detail {

inline std::string cell_text(const Cell& cell) {
  struct {
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  } visitor;
  return std::visit(visitor, cell);
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline nlohmann::ordered_json cell_json(const Cell& cell) {
  if (const auto* x = std::get_if<double>(&cell)) {
    if (!std::isfinite(*x)) return nullptr;
    // Round-trip through the 12-digit text so JSON and CSV carry the same value.
    return std::stod(format_number(*x));
  }
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return *i;
  if (const auto* b = std::get_if<bool>(&cell)) return *b;
  return std::get<std::string>(cell);
}

}  // namespace detail

inline void write_csv(std::ostream& out, const Table& table) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out << (i ? "," : "") << detail::csv_quote(table.columns[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << detail::csv_quote(detail::cell_text(row[i]));
    }
    out << '\n';
  }
}

inline nlohmann::ordered_json to_json(const Table& table) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[table.columns[i]] = detail::cell_json(row[i]);
    arr.push_back(std::move(obj));
  }
  return arr;
}

inline void write_json(std::ostream& out, const Table& table) { out << to_json(table).dump(2) << '\n'; }

enum class Format { Csv, Json };

inline Format parse_format(const std::string& s) {
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  throw ValidationError("format", "expected csv or json, got '" + s + "'");
}

inline std::string render(const Table& table, Format format) {
  std::ostringstream out;
  if (format == Format::Csv) {
    write_csv(out, table);
  } else {
    write_json(out, table);
  }
  return out.str();
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Writes a table to `path`, or to `fallback` when the path is empty.
inline void emit(const Table& table, Format format, const std::string& path, std::ostream& fallback) {
  const std::string text = render(table, format);
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw IoError("failed writing '" + path + "'");
}

}  // namespace maxlab
