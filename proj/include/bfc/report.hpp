#pragma once

#include <cstdio>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bfc/data.hpp"
#include "bfc/hierarchy.hpp"
#include "bfc/partition.hpp"

namespace bfc {

/// Shortest exact decimal form of a double; report files must be
/// byte-reproducible across runs.
inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct LevelRow {
  int level = 0;
  std::size_t clusters = 0;
  double hci = 0.0;
};

struct ProcessRow {
  std::uint32_t process = 0;
  std::uint64_t load = 0;
  std::vector<std::uint32_t> groups;
};

struct RegressionRow {
  std::string model;
  std::string kernel;
  double sigma = 0.0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double cost = 0.0;
  double mse = 0.0;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<LevelRow> levels;
  std::vector<ProcessRow> processes;
  std::vector<RegressionRow> regressions;
};

inline std::vector<LevelRow> level_rows(const Hierarchy& h) {
  std::vector<LevelRow> rows;
  rows.reserve(h.levels.size());
  for (std::size_t k = 0; k < h.levels.size(); ++k)
    rows.push_back({h.levels[k].level, h.levels[k].cluster_count(), h.hci[k]});
  return rows;
}

inline std::vector<ProcessRow> process_rows(const PartitionPlan& plan) {
  std::vector<ProcessRow> rows(plan.processes);
  for (std::uint32_t p = 0; p < plan.processes; ++p) {
    rows[p].process = p;
    rows[p].load = plan.loads[p];
  }
  for (std::size_t g = 0; g < plan.groups.size(); ++g)
    rows[plan.owner[g]].groups.push_back(plan.groups[g].id);
  return rows;
}

inline void write_report_csv(const std::string& path, const Report& report) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "key,value\n";
  for (const auto& [k, v] : report.meta) out << k << "," << v << "\n";
  if (!report.levels.empty()) {
    out << "\nlevel,clusters,hci\n";
    for (const LevelRow& r : report.levels)
      out << r.level << "," << r.clusters << "," << format_double(r.hci) << "\n";
  }
  if (!report.processes.empty()) {
    out << "\nprocess,load,groups\n";
    for (const ProcessRow& r : report.processes) {
      out << r.process << "," << r.load << ",";
      for (std::size_t i = 0; i < r.groups.size(); ++i)
        out << (i ? " " : "") << r.groups[i];
      out << "\n";
    }
  }
  if (!report.regressions.empty()) {
    out << "\nmodel,kernel,sigma,lambda,epsilon,cost,mse\n";
    for (const RegressionRow& r : report.regressions) {
      out << r.model << "," << r.kernel << "," << format_double(r.sigma) << ","
          << format_double(r.lambda) << "," << format_double(r.epsilon) << ","
          << format_double(r.cost) << "," << format_double(r.mse) << "\n";
    }
  }
}

inline void write_hierarchy_json(const std::string& path, const Hierarchy& h,
                                 bool include_assignments = false) {
  nlohmann::json doc;
  doc["n"] = h.sample_count();
  doc["k_opt"] = h.optimal_level;
  doc["levels"] = nlohmann::json::array();
  for (std::size_t k = 0; k < h.levels.size(); ++k) {
    nlohmann::json lvl;
    lvl["level"] = h.levels[k].level;
    lvl["clusters"] = h.levels[k].cluster_count();
    lvl["hci"] = h.hci[k];
    if (include_assignments) lvl["assignment"] = h.levels[k].assignment;
    doc["levels"].push_back(std::move(lvl));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

/// Scatter plot of a 2-D dataset colored by cluster id. Emission only makes
/// sense for d = 2; callers skip it otherwise.
inline void write_clusters_svg(const std::string& path, const DataMatrix& points,
                               std::span<const std::uint32_t> assignment) {
  if (points.cols() != 2)
    throw std::invalid_argument("write_clusters_svg: need 2-D data");
  if (assignment.size() != points.rows())
    throw std::invalid_argument("write_clusters_svg: assignment size mismatch");
  static const char* kPalette[] = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
      "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939",
      "#8c6d31", "#843c39", "#7b4173", "#3182bd"};
  constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

  double min_x = points.at(0, 0), max_x = min_x;
  double min_y = points.at(0, 1), max_y = min_y;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    min_x = std::min(min_x, points.at(i, 0));
    max_x = std::max(max_x, points.at(i, 0));
    min_y = std::min(min_y, points.at(i, 1));
    max_y = std::max(max_y, points.at(i, 1));
  }
  const double span_x = max_x - min_x > 0 ? max_x - min_x : 1.0;
  const double span_y = max_y - min_y > 0 ? max_y - min_y : 1.0;
  constexpr double kSize = 800.0, kMargin = 20.0;
  const double scale = (kSize - 2 * kMargin) / std::max(span_x, span_y);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize
      << "\" height=\"" << kSize << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  char buf[160];
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const double px = kMargin + (points.at(i, 0) - min_x) * scale;
    const double py = kSize - kMargin - (points.at(i, 1) - min_y) * scale;
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"3\" fill=\"%s\"/>\n", px, py,
                  kPalette[assignment[i] % kPaletteSize]);
    out << buf;
  }
  out << "</svg>\n";
}

}  // namespace bfc
