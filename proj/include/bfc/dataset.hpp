#pragma once

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfc/data.hpp"

namespace bfc {

enum class DataFormat { csv, libsvm, xy_label };

inline DataFormat data_format_from_string(const std::string& s) {
  if (s == "csv") return DataFormat::csv;
  if (s == "libsvm") return DataFormat::libsvm;
  if (s == "xy") return DataFormat::xy_label;
  throw std::invalid_argument("unknown data format: " + s + " (csv|libsvm|xy)");
}

inline const char* to_string(DataFormat f) {
  switch (f) {
    case DataFormat::csv: return "csv";
    case DataFormat::libsvm: return "libsvm";
    default: return "xy";
  }
}

namespace detail {

[[noreturn]] inline void parse_error(const std::string& path, std::size_t line,
                                     const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

inline double parse_double(const std::string& path, std::size_t line,
                           const std::string& token) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0')
    parse_error(path, line, "expected a number, got '" + token + "'");
  if (!std::isfinite(v))
    parse_error(path, line, "non-finite value '" + token + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string tok;
  std::istringstream is(s);
  while (std::getline(is, tok, sep)) out.push_back(tok);
  return out;
}

}  // namespace detail

/// Comma-separated file with a header line; all columns numeric, the last
/// column is the regressand.
inline DataMatrix load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) detail::parse_error(path, 1, "missing header");
  ++lineno;
  const std::size_t columns = detail::split(line, ',').size();
  if (columns < 2)
    detail::parse_error(path, 1, "need at least one feature and a regressand column");

  DataMatrix m;
  std::vector<double> row(columns - 1);
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tokens = detail::split(line, ',');
    if (tokens.size() != columns)
      detail::parse_error(path, lineno,
                          "expected " + std::to_string(columns) + " fields, got " +
                              std::to_string(tokens.size()));
    for (std::size_t c = 0; c + 1 < columns; ++c)
      row[c] = detail::parse_double(path, lineno, tokens[c]);
    m.append_row(row);
    m.targets().push_back(detail::parse_double(path, lineno, tokens.back()));
  }
  if (m.rows() == 0) detail::parse_error(path, lineno, "no data rows");
  return m;
}

/// LIBSVM sparse format, densified: "<target> idx:value ..." with 1-based
/// feature indices. The feature count is the largest index seen.
inline DataMatrix load_libsvm(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::vector<double> targets;
  std::vector<std::vector<std::pair<std::size_t, double>>> rows;
  std::size_t dims = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream is(line);
    std::string token;
    if (!(is >> token)) continue;
    targets.push_back(detail::parse_double(path, lineno, token));
    rows.emplace_back();
    while (is >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos)
        detail::parse_error(path, lineno, "expected idx:value, got '" + token + "'");
      const double idx = detail::parse_double(path, lineno, token.substr(0, colon));
      const double val = detail::parse_double(path, lineno, token.substr(colon + 1));
      if (idx < 1 || idx != std::floor(idx))
        detail::parse_error(path, lineno, "feature index must be a positive integer");
      const std::size_t i = static_cast<std::size_t>(idx);
      dims = std::max(dims, i);
      rows.back().emplace_back(i - 1, val);
    }
  }
  if (rows.empty()) detail::parse_error(path, lineno ? lineno : 1, "no data rows");
  DataMatrix m(rows.size(), dims);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [c, v] : rows[r]) m.at(r, c) = v;
  m.targets() = std::move(targets);
  return m;
}

/// Whitespace-separated "x y label" rows, the shape-dataset layout of the
/// clustering benchmark files.
inline DataMatrix load_xy_label(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  DataMatrix m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream is(line);
    std::string sx, sy, sl;
    if (!(is >> sx)) continue;  // blank line
    if (!(is >> sy >> sl))
      detail::parse_error(path, lineno, "expected 'x y label'");
    std::string extra;
    if (is >> extra)
      detail::parse_error(path, lineno, "trailing fields after 'x y label'");
    const double coords[2] = {detail::parse_double(path, lineno, sx),
                              detail::parse_double(path, lineno, sy)};
    const double lbl = detail::parse_double(path, lineno, sl);
    if (lbl != std::floor(lbl))
      detail::parse_error(path, lineno, "label must be an integer");
    m.append_row(coords);
    m.labels().push_back(static_cast<int>(lbl));
  }
  if (m.rows() == 0) detail::parse_error(path, lineno ? lineno : 1, "no data rows");
  return m;
}

inline DataMatrix load_dataset(const std::string& path, DataFormat format) {
  DataMatrix m;
  switch (format) {
    case DataFormat::csv: m = load_csv(path); break;
    case DataFormat::libsvm: m = load_libsvm(path); break;
    case DataFormat::xy_label: m = load_xy_label(path); break;
  }
  if (!m.all_finite())
    throw std::runtime_error(path + ": dataset contains non-finite values");
  return m;
}

/// Picks the format from the file extension: .csv, .svm/.libsvm, else the
/// whitespace shape layout.
inline DataFormat guess_format(const std::string& path) {
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "csv") return DataFormat::csv;
  if (ext == "svm" || ext == "libsvm") return DataFormat::libsvm;
  return DataFormat::xy_label;
}

}  // namespace bfc
