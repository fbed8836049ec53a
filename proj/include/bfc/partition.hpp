#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfc/data.hpp"
#include "bfc/hierarchy.hpp"

namespace bfc {

/// A contiguous run of the organized sample array that trains one model.
/// `source_level`/`source_cluster` name the hierarchy cluster it came from;
/// chopped level-0 runs keep the level-1 cluster they were cut out of.
struct Group {
  std::uint32_t id = 0;
  int source_level = 0;
  std::uint32_t source_cluster = 0;
  IndexRange range;

  std::uint32_t size() const { return range.length; }
};

struct PartitionPlan {
  std::uint32_t processes = 1;
  std::vector<Group> groups;           // ordered by range start
  std::vector<std::uint32_t> owner;    // per group: owning virtual process
  std::vector<std::uint64_t> loads;    // per process: sample count

  std::vector<std::vector<std::uint32_t>> groups_by_process() const {
    std::vector<std::vector<std::uint32_t>> per(processes);
    for (std::size_t g = 0; g < groups.size(); ++g) per[owner[g]].push_back(groups[g].id);
    return per;
  }
};

/// Applies the hierarchy's organized order to the data. The returned index
/// map gives, for each new position, the original sample id.
inline std::pair<DataMatrix, std::vector<std::uint32_t>> organize(
    const DataMatrix& data, const Hierarchy& h) {
  if (data.rows() != h.sample_count())
    throw std::invalid_argument("organize: data/hierarchy size mismatch");
  return {data.permuted(h.order), h.order};
}

namespace detail {

// Level-k cluster ids whose ranges lie inside `parent`, in range-start order.
inline std::vector<std::uint32_t> children_in_range(const Hierarchy& h, int level,
                                                    const IndexRange& parent) {
  const ClusterLevel& lvl = h.level(level);
  std::vector<std::uint32_t> out;
  for (std::uint32_t c = 0; c < lvl.cluster_count(); ++c) {
    const IndexRange& r = lvl.ranges[c];
    if (r.start >= parent.start && r.end() <= parent.end()) out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [&](std::uint32_t a, std::uint32_t b) {
    return lvl.ranges[a].start < lvl.ranges[b].start;
  });
  return out;
}

inline void split_recursive(const Group& g, const Hierarchy& h, double cap,
                            std::uint32_t chop, std::vector<Group>& out) {
  if (g.size() <= cap) {
    out.push_back(g);
    return;
  }
  if (g.source_level <= 1) {
    // Backtracking has reached raw samples: chop the run into contiguous
    // pieces of at most ceil(n_p) samples.
    std::uint32_t start = g.range.start;
    while (start < g.range.end()) {
      const std::uint32_t len = std::min(chop, g.range.end() - start);
      out.push_back(Group{0, 0, g.source_cluster, {start, len}});
      start += len;
    }
    return;
  }
  for (const std::uint32_t child : children_in_range(h, g.source_level - 1, g.range)) {
    const ClusterLevel& lvl = h.level(g.source_level - 1);
    split_recursive(Group{0, g.source_level - 1, child, lvl.ranges[child]}, h, cap,
                    chop, out);
  }
}

}  // namespace detail

/// Backtracks an oversized cluster into its children from the previous
/// hierarchy level, re-splitting any child still above (1+delta)*n_p.
/// Clusters at or below the threshold are returned unchanged.
inline std::vector<Group> split_backtrack(const Group& g, const Hierarchy& h,
                                          double n_p, double delta) {
  std::vector<Group> out;
  const double cap = (1.0 + delta) * n_p;
  const std::uint32_t chop = static_cast<std::uint32_t>(std::ceil(n_p));
  detail::split_recursive(g, h, cap, std::max<std::uint32_t>(chop, 1), out);
  return out;
}

/// First-fit-decreasing packing of groups into p virtual processes targeting
/// n_p samples each: a group goes to the first process that stays within the
/// target, else to the first that stays within (1+delta)*ceil(n_p), else to
/// the least-loaded one. Groups on one process stay separate models.
inline PartitionPlan merge_pack(std::vector<Group> groups, std::uint32_t p,
                                double n_p, double delta) {
  if (p < 1) throw std::invalid_argument("merge_pack: p must be >= 1");
  if (groups.size() < p)
    throw std::invalid_argument(
        "merge_pack: only " + std::to_string(groups.size()) + " groups for " +
        std::to_string(p) +
        " virtual processes; lower p or raise the partition slack delta");

  std::sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    return a.range.start < b.range.start;
  });
  for (std::size_t g = 0; g < groups.size(); ++g)
    groups[g].id = static_cast<std::uint32_t>(g);

  std::vector<std::uint32_t> by_size(groups.size());
  for (std::uint32_t g = 0; g < groups.size(); ++g) by_size[g] = g;
  std::sort(by_size.begin(), by_size.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (groups[a].size() != groups[b].size()) return groups[a].size() > groups[b].size();
    return a < b;
  });

  const double cap = (1.0 + delta) * std::ceil(n_p);
  PartitionPlan plan;
  plan.processes = p;
  plan.owner.assign(groups.size(), 0);
  plan.loads.assign(p, 0);
  for (const std::uint32_t g : by_size) {
    const double s = groups[g].size();
    std::uint32_t chosen = p;
    for (std::uint32_t b = 0; b < p; ++b)
      if (static_cast<double>(plan.loads[b]) + s <= n_p) { chosen = b; break; }
    if (chosen == p)
      for (std::uint32_t b = 0; b < p; ++b)
        if (static_cast<double>(plan.loads[b]) + s <= cap) { chosen = b; break; }
    if (chosen == p)
      chosen = static_cast<std::uint32_t>(
          std::min_element(plan.loads.begin(), plan.loads.end()) - plan.loads.begin());
    plan.owner[g] = chosen;
    plan.loads[chosen] += groups[g].size();
  }
  plan.groups = std::move(groups);
  return plan;
}

/// Balanced partition of the optimal level's clusters over p virtual
/// processes: SPLIT every oversized cluster by backtracking, then MERGE-pack
/// the resulting groups.
inline PartitionPlan plan_partition(const Hierarchy& h, std::uint32_t p, double delta) {
  const std::size_t n = h.sample_count();
  if (p < 1 || p > n)
    throw std::invalid_argument("plan_partition: need 1 <= p <= n");
  if (delta < 0.0) throw std::invalid_argument("plan_partition: delta must be >= 0");
  const double n_p = static_cast<double>(n) / static_cast<double>(p);

  const ClusterLevel& lvl = h.optimal();
  std::vector<Group> groups;
  for (std::uint32_t c = 0; c < lvl.cluster_count(); ++c) {
    Group g{0, h.optimal_level, c, lvl.ranges[c]};
    for (Group& piece : split_backtrack(g, h, n_p, delta))
      groups.push_back(piece);
  }

  PartitionPlan plan = merge_pack(std::move(groups), p, n_p, delta);

  // Coverage and disjointness: the groups tile [0, n) exactly.
  std::uint64_t covered = 0;
  std::uint32_t expect = 0;
  for (const Group& g : plan.groups) {
    if (g.range.start != expect)
      throw std::logic_error("plan_partition: groups do not tile the sample array");
    expect = g.range.end();
    covered += g.size();
  }
  if (covered != n)
    throw std::logic_error("plan_partition: group sizes do not sum to n");
  return plan;
}

}  // namespace bfc
