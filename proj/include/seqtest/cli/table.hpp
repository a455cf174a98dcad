#pragma once

// Tabular command output. CSV: '#' metadata lines, a header row, RFC 4180
// quoting. JSON: one object per line, the metadata object first. Numbers use
// the shortest round-trip form; non-finite values are written as inf, -inf
// or nan (strings in JSON).

#include <charconv>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "seqtest/errors.hpp"

namespace seqtest::cli {

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) return format_number(std::get<double>(c));
  if (std::holds_alternative<std::int64_t>(c)) return std::to_string(std::get<std::int64_t>(c));
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return "";
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

inline nlohmann::ordered_json json_cell(const Cell& c) {
  if (std::holds_alternative<double>(c)) {
    const double v = std::get<double>(c);
    if (!std::isfinite(v)) return format_number(v);
    return v;
  }
  if (std::holds_alternative<std::int64_t>(c)) return std::get<std::int64_t>(c);
  if (std::holds_alternative<std::string>(c)) return std::get<std::string>(c);
  return nullptr;
}

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row) {
    if (row.size() != columns_.size()) throw ShapeError("table row has the wrong number of cells");
    rows_.push_back(std::move(row));
  }

  // Insertion order is kept.
  void set_meta(const std::string& key, const Cell& value) {
    for (auto& kv : meta_) {
      if (kv.first == key) {
        kv.second = value;
        return;
      }
    }
    meta_.emplace_back(key, value);
  }

  void add_warning(const std::string& w) { warnings_.push_back(w); }

  const std::vector<std::string>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }
  const std::vector<std::pair<std::string, Cell>>& meta() const { return meta_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
      if (columns_[i] == name) return i;
    }
    throw ShapeError("no column named '" + name + "'");
  }

  void write_csv(std::ostream& os) const {
    for (const auto& [k, v] : meta_) os << "# " << k << "=" << format_cell(v) << "\n";
    for (const auto& w : warnings_) os << "# warning=" << w << "\n";
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << csv_quote(columns_[i]);
    os << "\n";
    for (const auto& row : rows_) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_quote(format_cell(row[i]));
      os << "\n";
    }
  }

  void write_json(std::ostream& os) const {
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta_) m[k] = json_cell(v);
    m["warnings"] = warnings_;
    m["columns"] = columns_;
    os << nlohmann::ordered_json{{"metadata", m}}.dump() << "\n";
    for (const auto& row : rows_) {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (std::size_t i = 0; i < row.size(); ++i) obj[columns_[i]] = json_cell(row[i]);
      os << obj.dump() << "\n";
    }
  }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "csv") {
      write_csv(os);
    } else if (format == "json") {
      write_json(os);
    } else {
      throw ValidationError("unknown output format '" + format + "' (expected csv or json)");
    }
  }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, Cell>> meta_;
  std::vector<std::string> warnings_;
};

}  // namespace seqtest::cli
