#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "critpol/errors.hpp"

namespace critpol::cli {

/// Empty for missing or non-finite values, otherwise 17 significant digits.
inline std::string format_cell(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

struct Table {
  std::vector<std::pair<std::string, std::string>> metadata;  ///< emitted as "# key: value"
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void meta(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }
  void meta(std::string key, double value) { metadata.emplace_back(std::move(key), format_cell(value)); }
};

inline void write_csv(std::ostream& out, const Table& t) {
  for (const auto& [k, v] : t.metadata) out << "# " << k << ": " << v << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw Error("csv: row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

inline std::string to_csv(const Table& t) {
  std::ostringstream os;
  write_csv(os, t);
  return os.str();
}

inline void write_csv_file(const std::string& path, const Table& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  write_csv(out, t);
  if (!out) throw Error("failed writing '" + path + "'");
}

/// Minimal reader for the files write_csv produces.
struct CsvData {
  std::vector<std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return i;
    throw InvalidArgument("csv: no column '" + name + "'");
  }
};

inline CsvData read_csv(std::istream& in) {
  CsvData d;
  auto split = [](const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
  };
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) d.metadata.push_back(line.substr(2));
    else if (d.columns.empty()) d.columns = split(line);
    else d.rows.push_back(split(line));
  }
  return d;
}

inline CsvData read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace critpol::cli
