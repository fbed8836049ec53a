#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bfc/data.hpp"
#include "bfc/distance.hpp"
#include "bfc/parallel.hpp"

namespace bfc {

struct BestFriendEdge {
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  double weight = 0.0;  // Euclidean distance between source and target
};

/// Directed graph in which every vertex points at its single nearest
/// neighbor. Ties are broken towards the lowest vertex index, so the graph
/// is a deterministic function of the input points. |E| = |V| always.
class BestFriendGraph {
public:
  BestFriendGraph() = default;
  BestFriendGraph(std::vector<std::uint32_t> targets, std::vector<double> weights)
      : targets_(std::move(targets)), weights_(std::move(weights)) {}

  std::size_t size() const { return targets_.size(); }
  std::uint32_t target(std::size_t i) const { return targets_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  BestFriendEdge edge(std::size_t i) const {
    return {static_cast<std::uint32_t>(i), targets_[i], weights_[i]};
  }

  const std::vector<std::uint32_t>& targets() const { return targets_; }
  const std::vector<double>& weights() const { return weights_; }

private:
  std::vector<std::uint32_t> targets_;
  std::vector<double> weights_;
};

/// One weakly connected component of a Best Friend Graph. Dropping one of
/// the two equal cycle edges turns it into a tree; `compactness` is that
/// tree's mean edge weight.
struct Component {
  std::uint32_t id = 0;
  std::vector<std::uint32_t> members;  // ascending vertex indices
  std::pair<std::uint32_t, std::uint32_t> cycle_pair{0, 0};  // first < second
  std::uint32_t edge_count = 0;        // members - 1
  double weight_sum = 0.0;
  double compactness = 0.0;            // weight_sum / edge_count
};

/// Builds the Best Friend Graph over the rows of `points` with a brute-force
/// scan. The scan is data-parallel over disjoint vertex ranges; the result is
/// bit-identical for any worker count.
inline BestFriendGraph build_best_friend_graph(const DataMatrix& points,
                                               unsigned workers = 1) {
  const std::size_t n = points.rows();
  if (n < 2)
    throw std::invalid_argument(
        "build_best_friend_graph: need at least 2 points (no friend exists)");
  std::vector<std::uint32_t> targets(n);
  std::vector<double> weights(n);
  const std::size_t d = points.cols();
  const double* base = points.values().data();
  parallel_chunks(n, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double* pi = base + i * d;
      double best_sq = std::numeric_limits<double>::infinity();
      std::uint32_t best_j = 0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        // Strict improvement keeps the lowest index among equidistant
        // neighbors; the bounded kernel never accepts a skipped candidate.
        const double sq =
            detail::squared_distance_bounded(pi, base + j * d, d, best_sq);
        if (sq < best_sq) {
          best_sq = sq;
          best_j = static_cast<std::uint32_t>(j);
        }
      }
      targets[i] = best_j;
      weights[i] = std::sqrt(best_sq);
    }
  });
  return BestFriendGraph(std::move(targets), std::move(weights));
}

/// Finds the weakly connected components. Every component is anchored by
/// exactly one mutual pair (the two-vertex cycle); traversal starts from a
/// cycle vertex and walks the undirected adjacency with an explicit stack.
/// Components are numbered by their smallest member index. Traversal is
/// parallel over components.
inline std::vector<Component> find_components(const BestFriendGraph& g,
                                              unsigned workers = 1) {
  const std::size_t n = g.size();

  // Cycle anchors: i < j with i -> j and j -> i.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> anchors;
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = g.target(i);
    if (i < j && g.target(j) == i) anchors.emplace_back(i, j);
  }
  if (anchors.empty())
    throw std::logic_error("find_components: graph has no mutual pair");

  // Undirected adjacency in CSR form; each directed edge appears from both
  // endpoints, the visited check makes the duplicate on the cycle harmless.
  std::vector<std::uint32_t> degree(n, 0);
  for (std::uint32_t i = 0; i < n; ++i) {
    ++degree[i];
    ++degree[g.target(i)];
  }
  std::vector<std::size_t> offset(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offset[i + 1] = offset[i] + degree[i];
  std::vector<std::uint32_t> adjacency(offset[n]);
  {
    std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
    for (std::uint32_t i = 0; i < n; ++i) {
      const std::uint32_t j = g.target(i);
      adjacency[cursor[i]++] = j;
      adjacency[cursor[j]++] = i;
    }
  }

  std::vector<std::uint8_t> visited(n, 0);
  std::vector<Component> components(anchors.size());
  parallel_tasks(anchors.size(), workers, [&](std::size_t a) {
    Component& comp = components[a];
    comp.cycle_pair = anchors[a];
    std::vector<std::uint32_t> stack{anchors[a].first};
    visited[anchors[a].first] = 1;
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      comp.members.push_back(v);
      for (std::size_t e = offset[v]; e < offset[v + 1]; ++e) {
        const std::uint32_t w = adjacency[e];
        if (!visited[w]) {
          visited[w] = 1;
          stack.push_back(w);
        }
      }
    }
    std::sort(comp.members.begin(), comp.members.end());
    comp.edge_count = static_cast<std::uint32_t>(comp.members.size()) - 1;
    double sum = 0.0;
    for (const std::uint32_t v : comp.members) sum += g.weight(v);
    // Both cycle edges carry the same weight; drop one.
    sum -= g.weight(anchors[a].first);
    comp.weight_sum = sum;
    comp.compactness = sum / static_cast<double>(comp.edge_count);
  });

  std::size_t covered = 0;
  for (const auto& c : components) {
    if (c.members.size() < 2)
      throw std::logic_error("find_components: component with < 2 members");
    covered += c.members.size();
  }
  if (covered != n)
    throw std::logic_error(
        "find_components: components do not partition the vertex set");

  std::sort(components.begin(), components.end(),
            [](const Component& a, const Component& b) {
              return a.members.front() < b.members.front();
            });
  for (std::size_t c = 0; c < components.size(); ++c)
    components[c].id = static_cast<std::uint32_t>(c);
  return components;
}

/// Undirected tree edges per component: every member's directed edge except
/// one direction of the cycle pair. Each component yields members-1 edges.
inline std::vector<std::vector<BestFriendEdge>> forest_as_undirected(
    const BestFriendGraph& g, const std::vector<Component>& components) {
  std::vector<std::vector<BestFriendEdge>> forest(components.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    const Component& comp = components[c];
    auto& edges = forest[c];
    edges.reserve(comp.edge_count);
    for (const std::uint32_t v : comp.members) {
      if (v == comp.cycle_pair.second) continue;  // drop j -> i on the cycle
      edges.push_back(g.edge(v));
    }
  }
  return forest;
}

}  // namespace bfc
