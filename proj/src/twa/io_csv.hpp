#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "io_json.hpp"
#include "metric.hpp"
#include "num.hpp"

namespace twa::io {

namespace detail {

inline std::vector<std::vector<std::string>> csv_cells(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty()) continue;
    std::vector<std::string> cells;
    size_t c = 0;
    while (true) {
      size_t comma = line.find(',', c);
      std::string_view cell = line.substr(c, comma == std::string_view::npos ? std::string_view::npos : comma - c);
      while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
      while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.remove_suffix(1);
      cells.emplace_back(cell);
      if (comma == std::string_view::npos) break;
      c = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

inline bool numeric_cell(const std::string& cell) {
  try {
    parse_number<double>(cell, "cell");
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline bool numeric_row(const std::vector<std::string>& row) {
  for (const auto& cell : row) {
    if (!numeric_cell(cell)) return false;
  }
  return !row.empty();
}

}  // namespace detail

/// Square distance-matrix CSV; an optional leading non-numeric row names the
/// points. Validated against the metric invariants on load.
template <class R>
LabeledMetric<R> metric_from_matrix_csv(std::string_view text) {
  auto rows = detail::csv_cells(text);
  if (rows.empty()) fail(errc::parse_error, "empty distance-matrix CSV");
  std::vector<std::string> labels;
  size_t first = 0;
  if (!detail::numeric_row(rows[0])) {
    labels.assign(rows[0].begin(), rows[0].end());
    first = 1;
  }
  const size_t n = rows.size() - first;
  if (n == 0) fail(errc::parse_error, "distance-matrix CSV has a header but no rows");
  if (labels.empty()) {
    labels = default_labels(static_cast<uint32_t>(n));
  } else if (labels.size() != n) {
    fail(errc::parse_error, "distance-matrix CSV header names " + std::to_string(labels.size()) + " points but has " +
                                std::to_string(n) + " rows");
  }
  std::vector<R> dist;
  dist.reserve(n * n);
  for (size_t i = 0; i < n; ++i) {
    const auto& row = rows[first + i];
    if (row.size() != n) {
      fail(errc::parse_error, "distance-matrix CSV row " + std::to_string(i + 1) + " has " +
                                  std::to_string(row.size()) + " cells, expected " + std::to_string(n));
    }
    for (const auto& cell : row) dist.push_back(parse_number<R>(cell, "distance cell"));
  }
  auto index = label_index(labels);
  return {FiniteMetric<R>::from_matrix(static_cast<uint32_t>(n), std::move(dist)), std::move(labels),
          std::move(index)};
}

/// Point-set CSV: one row of coordinates per point (optional non-numeric
/// header row is skipped); the metric is Euclidean. Float mode only.
inline LabeledMetric<double> metric_from_points_csv(std::string_view text) {
  auto rows = detail::csv_cells(text);
  size_t first = 0;
  if (!rows.empty() && !detail::numeric_row(rows[0])) first = 1;
  const size_t n = rows.size() - first;
  if (n == 0) fail(errc::parse_error, "point-set CSV has no coordinate rows");
  std::vector<std::vector<double>> pts;
  pts.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& row = rows[first + i];
    if (row.size() != rows[first].size()) {
      fail(errc::parse_error, "point-set CSV row " + std::to_string(i + 1) + " has inconsistent dimension");
    }
    std::vector<double> p;
    p.reserve(row.size());
    for (const auto& cell : row) p.push_back(parse_number<double>(cell, "coordinate"));
    pts.push_back(std::move(p));
  }
  std::vector<double> dist(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      double sq = 0;
      for (size_t k = 0; k < pts[i].size(); ++k) {
        double d = pts[i][k] - pts[j][k];
        sq += d * d;
      }
      double d = std::sqrt(sq);
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }
  std::vector<std::string> labels(n);
  for (size_t i = 0; i < n; ++i) labels[i] = "p" + std::to_string(i);
  auto index = label_index(labels);
  return {FiniteMetric<double>::from_matrix(static_cast<uint32_t>(n), std::move(dist)), std::move(labels),
          std::move(index)};
}

}  // namespace twa::io
