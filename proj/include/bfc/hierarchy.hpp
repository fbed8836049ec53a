#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "bfc/best_friend_graph.hpp"
#include "bfc/data.hpp"

namespace bfc {

struct IndexRange {
  std::uint32_t start = 0;
  std::uint32_t length = 0;
  std::uint32_t end() const { return start + length; }
};

/// One step of the clustering hierarchy. Levels are 1-indexed; level 0 is
/// the raw samples. `assignment` maps every ORIGINAL sample index to its
/// cluster id at this level; `ranges` give each cluster's contiguous span in
/// the organized sample order.
struct ClusterLevel {
  int level = 0;
  std::vector<std::uint32_t> assignment;
  std::vector<IndexRange> ranges;
  DataMatrix centers;                     // cluster count x d, mean of originals
  std::vector<std::uint32_t> counts;      // v_k per cluster
  std::vector<double> compactness;        // c_i per cluster
  std::vector<double> dispersion;         // d_i per cluster; empty on the last level

  std::size_t cluster_count() const { return counts.size(); }
};

struct Hierarchy {
  std::vector<ClusterLevel> levels;
  std::vector<double> hci;                // one entry per level
  int optimal_level = 1;                  // k_opt, 1-indexed
  std::vector<std::uint32_t> order;       // organized position -> original sample id

  std::size_t sample_count() const { return order.size(); }
  const ClusterLevel& level(int k) const { return levels[static_cast<std::size_t>(k) - 1]; }
  const ClusterLevel& optimal() const { return level(optimal_level); }
};

/// HCI term mean: (d_i - c_i)/(d_i + c_i) averaged over clusters. A term with
/// d_i + c_i = 0 (coincident duplicate clusters) contributes 0. With fewer
/// than two clusters dispersion is undefined and the index is 0, so the
/// final single-cluster level always scores 0.
inline double hci(std::span<const double> compactness, std::span<const double> dispersion) {
  if (compactness.size() != dispersion.size())
    throw std::invalid_argument("hci: compactness/dispersion size mismatch");
  const std::size_t m = compactness.size();
  if (m <= 1) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double denom = dispersion[i] + compactness[i];
    if (denom > 0.0) sum += (dispersion[i] - compactness[i]) / denom;
  }
  return sum / static_cast<double>(m);
}

inline double hci(const ClusterLevel& level) {
  if (level.cluster_count() <= 1) return 0.0;
  if (level.dispersion.size() != level.cluster_count())
    throw std::invalid_argument("hci: dispersion not filled for this level");
  return hci(level.compactness, level.dispersion);
}

/// argmax of the per-level HCI values, 1-indexed, ties resolved towards the
/// smallest level.
inline int select_optimal_level(std::span<const double> hci_values) {
  if (hci_values.empty())
    throw std::invalid_argument("select_optimal_level: no levels");
  std::size_t best = 0;
  for (std::size_t k = 1; k < hci_values.size(); ++k)
    if (hci_values[k] > hci_values[best]) best = k;
  return static_cast<int>(best) + 1;
}

/// Fills level k's dispersion from the graph built over level k's centers
/// (the graph that produces level k+1): d_i is exactly vertex i's best
/// friend weight there.
inline void dispersion_fill(ClusterLevel& level, const BestFriendGraph& next_graph) {
  if (next_graph.size() != level.cluster_count())
    throw std::invalid_argument("dispersion_fill: graph size != cluster count");
  level.dispersion.assign(next_graph.weights().begin(), next_graph.weights().end());
}

/// Output of one clustering step over a set of input units (samples at level
/// 1, cluster centers afterwards). `assignment` here maps INPUT UNIT index to
/// output cluster id; build_hierarchy composes these into per-sample maps.
struct ClusterStep {
  BestFriendGraph graph;                  // over the input unit centers
  std::vector<std::uint32_t> assignment;  // per input unit
  DataMatrix center_sums;                 // per cluster, sum of original samples
  std::vector<std::uint32_t> counts;
  std::vector<double> compactness;

  std::size_t cluster_count() const { return counts.size(); }
  DataMatrix centers() const {
    DataMatrix c(center_sums.rows(), center_sums.cols());
    for (std::size_t i = 0; i < c.rows(); ++i) {
      const auto s = center_sums.row(i);
      auto dst = c.row(i);
      for (std::size_t k = 0; k < s.size(); ++k)
        dst[k] = s[k] / static_cast<double>(counts[i]);
    }
    return c;
  }
};

/// Groups the input units by Best Friend components. Cluster centers are
/// carried as running (sum, count) pairs so every level's center is the mean
/// of the original samples rather than a re-averaged mean of child centers.
inline ClusterStep cluster_step(const DataMatrix& unit_centers,
                                std::span<const std::uint32_t> unit_counts,
                                const DataMatrix& unit_sums,
                                unsigned workers = 1) {
  if (unit_centers.rows() < 2)
    throw std::invalid_argument("cluster_step: need at least 2 input clusters");
  ClusterStep step;
  step.graph = build_best_friend_graph(unit_centers, workers);
  const auto components = find_components(step.graph, workers);
  const std::size_t m = components.size();
  const std::size_t d = unit_centers.cols();

  step.assignment.assign(unit_centers.rows(), 0);
  step.center_sums = DataMatrix(m, d);
  step.counts.assign(m, 0);
  step.compactness.assign(m, 0.0);
  for (const Component& comp : components) {
    auto sum = step.center_sums.row(comp.id);
    for (const std::uint32_t u : comp.members) {
      step.assignment[u] = comp.id;
      step.counts[comp.id] += unit_counts[u];
      const auto us = unit_sums.row(u);
      for (std::size_t k = 0; k < d; ++k) sum[k] += us[k];
    }
    step.compactness[comp.id] = comp.compactness;
  }
  return step;
}

/// Convenience overload for callers that only have centers and counts (each
/// center then stands for `count` copies of itself when sums are formed).
inline ClusterStep cluster_step(const DataMatrix& unit_centers,
                                std::span<const std::uint32_t> unit_counts,
                                unsigned workers = 1) {
  DataMatrix sums(unit_centers.rows(), unit_centers.cols());
  for (std::size_t i = 0; i < unit_centers.rows(); ++i) {
    const auto c = unit_centers.row(i);
    auto s = sums.row(i);
    for (std::size_t k = 0; k < c.size(); ++k)
      s[k] = c[k] * static_cast<double>(unit_counts[i]);
  }
  return cluster_step(unit_centers, unit_counts, sums, workers);
}

/// Runs Best Friend Clustering level by level until a single cluster
/// remains. Each level at least halves the cluster count, so there are at
/// most ceil(log2 n) levels. After every level the sample order is regrouped
/// so each cluster occupies a contiguous range, with lower-level clusters
/// moved as whole blocks; `order` is the resulting permutation.
inline Hierarchy build_hierarchy(const DataMatrix& data, unsigned workers = 1) {
  const std::size_t n = data.rows();
  if (n < 2) throw std::invalid_argument("build_hierarchy: need at least 2 samples");

  Hierarchy h;
  h.order.resize(n);
  std::iota(h.order.begin(), h.order.end(), 0u);

  // Current units: one block per unit, in positional order.
  std::vector<IndexRange> blocks(n);
  for (std::uint32_t i = 0; i < n; ++i) blocks[i] = {i, 1};
  std::vector<std::uint32_t> unit_of(n);  // original sample -> current unit
  std::iota(unit_of.begin(), unit_of.end(), 0u);
  DataMatrix unit_sums = data;
  DataMatrix unit_centers = data;
  std::vector<std::uint32_t> unit_counts(n, 1);

  int level_index = 0;
  while (unit_counts.size() >= 2) {
    ++level_index;
    ClusterStep step = cluster_step(unit_centers, unit_counts, unit_sums, workers);
    if (!h.levels.empty()) dispersion_fill(h.levels.back(), step.graph);

    const std::size_t m = step.cluster_count();
    ClusterLevel lvl;
    lvl.level = level_index;
    lvl.counts = step.counts;
    lvl.compactness = step.compactness;
    lvl.centers = step.centers();
    lvl.assignment.resize(n);
    for (std::size_t s = 0; s < n; ++s)
      lvl.assignment[s] = step.assignment[unit_of[s]];

    // Regroup blocks by cluster, preserving relative block order within a
    // cluster (blocks move as whole big points).
    std::vector<std::uint32_t> new_order(n);
    std::vector<IndexRange> new_blocks(m);
    {
      for (std::size_t u = 0; u < blocks.size(); ++u)
        new_blocks[step.assignment[u]].length += blocks[u].length;
      for (std::size_t c = 1; c < m; ++c)
        new_blocks[c].start = new_blocks[c - 1].end();
      std::vector<std::uint32_t> cursor(m, 0);
      for (std::size_t u = 0; u < blocks.size(); ++u) {
        const std::uint32_t c = step.assignment[u];
        std::uint32_t dst = new_blocks[c].start + cursor[c];
        for (std::uint32_t p = blocks[u].start; p < blocks[u].end(); ++p)
          new_order[dst++] = h.order[p];
        cursor[c] += blocks[u].length;
      }
    }
    h.order.swap(new_order);
    blocks.swap(new_blocks);
    h.levels.push_back(std::move(lvl));

    unit_of = h.levels.back().assignment;
    unit_sums = step.center_sums;
    unit_counts = step.counts;
    unit_centers = h.levels.back().centers;
  }

  // Ranges are reported against the FINAL order: later levels permute
  // earlier levels' blocks, but only as whole units, so every cluster at
  // every level is still one contiguous run there.
  for (ClusterLevel& lvl : h.levels) {
    const std::size_t m = lvl.cluster_count();
    lvl.ranges.assign(m, IndexRange{});
    std::vector<std::uint8_t> seen(m, 0);
    std::size_t pos = 0;
    while (pos < n) {
      const std::uint32_t c = lvl.assignment[h.order[pos]];
      if (seen[c])
        throw std::logic_error("build_hierarchy: cluster is not contiguous");
      seen[c] = 1;
      const std::size_t start = pos;
      while (pos < n && lvl.assignment[h.order[pos]] == c) ++pos;
      lvl.ranges[c] = {static_cast<std::uint32_t>(start),
                       static_cast<std::uint32_t>(pos - start)};
    }
  }

  h.hci.reserve(h.levels.size());
  for (const ClusterLevel& lvl : h.levels)
    h.hci.push_back(lvl.cluster_count() <= 1 ? 0.0 : hci(lvl));
  h.optimal_level = select_optimal_level(h.hci);
  return h;
}

}  // namespace bfc
