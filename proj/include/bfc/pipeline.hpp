#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bfc/data.hpp"
#include "bfc/dataset.hpp"
#include "bfc/ensemble.hpp"
#include "bfc/ensemble_io.hpp"
#include "bfc/hierarchy.hpp"
#include "bfc/metrics.hpp"
#include "bfc/partition.hpp"
#include "bfc/report.hpp"
#include "bfc/synthetic.hpp"

namespace bfc {

enum class StandardizeMode { automatic, on, off };

/// Everything a run needs. The seed only drives the validation split used
/// for hyperparameter tuning; clustering itself is deterministic.
struct RunConfig {
  std::string data_path;
  std::optional<DataFormat> format;      // empty = guess from extension
  std::string test_path;                 // optional for train; required for eval
  std::string ensemble_path;             // empty = <out_dir>/ensemble.bin
  std::string out_dir = ".";

  StandardizeMode standardize = StandardizeMode::automatic;
  ModelKind model = ModelKind::krr;
  KernelType kernel = KernelType::rbf;
  double sigma = 0.0;                    // <= 0: median heuristic
  double lambda = 1e-2;
  double epsilon = 0.1;
  double cost = 1.0;
  bool tune = false;

  std::uint32_t p = 1;
  unsigned workers = 0;                  // 0 = default_worker_count()
  double delta = 0.25;
  std::uint32_t seed = 1;
  bool emit_assignments = false;
  bool emit_svg = true;

  DataFormat resolved_format() const {
    return format ? *format : guess_format(data_path);
  }
  unsigned resolved_workers() const {
    return workers ? workers : default_worker_count();
  }
  std::string resolved_ensemble_path() const {
    return ensemble_path.empty() ? out_dir + "/ensemble.bin" : ensemble_path;
  }
  bool resolved_standardize(DataFormat fmt) const {
    if (standardize == StandardizeMode::on) return true;
    if (standardize == StandardizeMode::off) return false;
    return fmt != DataFormat::xy_label;  // geometry IS the truth for shape data
  }
};

struct ClusterOutcome {
  DataMatrix data;          // after optional standardization
  Standardizer standardizer;
  bool standardized = false;
  Hierarchy hierarchy;
  std::optional<double> ami_at_optimal;
  Report report;
};

struct TrainOutcome {
  ClusterOutcome clustering;
  PartitionPlan plan;
  RegressionEnsemble ensemble;
  std::optional<double> test_mse;
  Report report;
};

struct EvalOutcome {
  EvaluationReport evaluation;
  Report report;
};

struct BenchOutcome {
  TrainOutcome train;
  std::vector<std::pair<std::string, double>> timings;  // phase -> seconds
};

namespace detail {

inline void base_meta(Report& report, const RunConfig& cfg, DataFormat fmt,
                      const DataMatrix& data, bool standardized) {
  report.meta.emplace_back("dataset", cfg.data_path);
  report.meta.emplace_back("format", to_string(fmt));
  report.meta.emplace_back("samples", std::to_string(data.rows()));
  report.meta.emplace_back("dimensions", std::to_string(data.cols()));
  report.meta.emplace_back("standardize", standardized ? "on" : "off");
}

inline ClusterOutcome cluster_core(const RunConfig& cfg) {
  const DataFormat fmt = cfg.resolved_format();
  ClusterOutcome out;
  out.data = load_dataset(cfg.data_path, fmt);
  out.standardized = cfg.resolved_standardize(fmt);
  if (out.standardized) {
    out.standardizer.fit(out.data);
    out.standardizer.apply(out.data);
  }
  out.hierarchy = build_hierarchy(out.data, cfg.resolved_workers());
  if (out.data.has_labels()) {
    const ClusterLevel& lvl = out.hierarchy.optimal();
    std::vector<int> pred(lvl.assignment.begin(), lvl.assignment.end());
    out.ami_at_optimal = ami(out.data.labels(), pred);
  }
  base_meta(out.report, cfg, fmt, out.data, out.standardized);
  out.report.meta.emplace_back("levels", std::to_string(out.hierarchy.levels.size()));
  out.report.meta.emplace_back("k_opt", std::to_string(out.hierarchy.optimal_level));
  if (out.ami_at_optimal)
    out.report.meta.emplace_back("ami_at_k_opt", format_double(*out.ami_at_optimal));
  out.report.levels = level_rows(out.hierarchy);
  return out;
}

inline void emit_cluster_files(const RunConfig& cfg, const ClusterOutcome& out) {
  std::filesystem::create_directories(cfg.out_dir);
  write_report_csv(cfg.out_dir + "/report.csv", out.report);
  write_hierarchy_json(cfg.out_dir + "/hierarchy.json", out.hierarchy,
                       cfg.emit_assignments);
  if (cfg.emit_svg && out.data.cols() == 2)
    write_clusters_svg(cfg.out_dir + "/clusters.svg", out.data,
                       out.hierarchy.optimal().assignment);
}

struct Candidate {
  double lambda, epsilon, cost;
};

inline std::vector<Candidate> tuning_grid(const RunConfig& cfg) {
  std::vector<Candidate> grid;
  if (cfg.model == ModelKind::krr) {
    for (const double l : {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0})
      grid.push_back({l, cfg.epsilon, cfg.cost});
  } else if (cfg.model == ModelKind::svr) {
    for (const double c : {0.1, 1.0, 10.0})
      for (const double e : {0.01, 0.1})
        grid.push_back({cfg.lambda, e, c});
  }
  return grid;
}

/// Validation split for tuning: a seeded 10% holdout of the organized rows.
/// Every group keeps at least one training sample.
inline std::vector<std::uint8_t> validation_mask(const PartitionPlan& plan,
                                                 std::size_t n, std::uint32_t seed) {
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t i = 0; i < n; ++i) order[i] = i;
  SyntheticRng rng(seed);
  deterministic_shuffle(order, rng);
  std::vector<std::uint8_t> mask(n, 0);
  const std::size_t held = std::max<std::size_t>(1, n / 10);
  for (std::size_t i = 0; i < held; ++i) mask[order[i]] = 1;
  for (const Group& g : plan.groups) {
    bool any_train = false;
    for (std::uint32_t r = g.range.start; r < g.range.end() && !any_train; ++r)
      any_train = !mask[r];
    if (!any_train) mask[g.range.start] = 0;
  }
  return mask;
}

inline TrainOptions train_options(const RunConfig& cfg, const Candidate& c) {
  TrainOptions opts;
  opts.kind = cfg.model;
  opts.kernel = Kernel{cfg.kernel, cfg.sigma};
  opts.lambda = c.lambda;
  opts.epsilon = c.epsilon;
  opts.cost = c.cost;
  opts.workers = cfg.resolved_workers();
  return opts;
}

}  // namespace detail

inline ClusterOutcome run_cluster(const RunConfig& cfg) {
  ClusterOutcome out = detail::cluster_core(cfg);
  detail::emit_cluster_files(cfg, out);
  return out;
}

inline std::pair<ClusterOutcome, PartitionPlan> run_partition(const RunConfig& cfg) {
  ClusterOutcome out = detail::cluster_core(cfg);
  PartitionPlan plan = plan_partition(out.hierarchy, cfg.p, cfg.delta);
  out.report.meta.emplace_back("processes", std::to_string(cfg.p));
  out.report.meta.emplace_back("delta", format_double(cfg.delta));
  out.report.processes = process_rows(plan);
  detail::emit_cluster_files(cfg, out);
  return {std::move(out), std::move(plan)};
}

/// cluster -> organize -> plan -> train per group -> (optional) evaluate.
/// Persists the ensemble and a report; the trained models belong to groups,
/// never to processes.
inline TrainOutcome run_train(const RunConfig& cfg) {
  TrainOutcome out;
  out.clustering = detail::cluster_core(cfg);
  const DataMatrix& data = out.clustering.data;
  if (!data.has_targets())
    throw std::runtime_error("train: dataset has no regressand column");

  auto [organized, order] = organize(data, out.clustering.hierarchy);
  out.plan = plan_partition(out.clustering.hierarchy, cfg.p, cfg.delta);

  detail::Candidate chosen{cfg.lambda, cfg.epsilon, cfg.cost};
  if (cfg.tune) {
    const auto grid = detail::tuning_grid(cfg);
    const auto mask =
        detail::validation_mask(out.plan, organized.rows(), cfg.seed);
    double best_mse = std::numeric_limits<double>::infinity();
    for (const detail::Candidate& cand : grid) {
      // Train on the unheld rows of each group, score on the holdout.
      DataMatrix train_rows;
      std::vector<double> train_y;
      std::vector<Group> sub_groups;
      std::vector<std::uint32_t> sub_owner;
      std::uint32_t cursor = 0;
      for (std::size_t g = 0; g < out.plan.groups.size(); ++g) {
        const Group& grp = out.plan.groups[g];
        std::uint32_t kept = 0;
        for (std::uint32_t r = grp.range.start; r < grp.range.end(); ++r) {
          if (mask[r]) continue;
          train_rows.append_row(organized.row(r));
          train_y.push_back(organized.targets()[r]);
          ++kept;
        }
        sub_groups.push_back(Group{grp.id, grp.source_level, grp.source_cluster,
                                   {cursor, kept}});
        sub_owner.push_back(out.plan.owner[g]);
        cursor += kept;
      }
      PartitionPlan sub_plan;
      sub_plan.processes = out.plan.processes;
      sub_plan.groups = std::move(sub_groups);
      sub_plan.owner = std::move(sub_owner);
      sub_plan.loads.assign(out.plan.processes, 0);
      for (std::size_t g = 0; g < sub_plan.groups.size(); ++g)
        sub_plan.loads[sub_plan.owner[g]] += sub_plan.groups[g].size();
      train_rows.targets() = train_y;

      RegressionEnsemble cand_ensemble = train_ensemble(
          train_rows, train_rows.targets(), sub_plan, detail::train_options(cfg, cand));
      DataMatrix val_rows;
      std::vector<double> val_y;
      for (std::uint32_t r = 0; r < organized.rows(); ++r) {
        if (!mask[r]) continue;
        val_rows.append_row(organized.row(r));
        val_y.push_back(organized.targets()[r]);
      }
      if (val_rows.rows() == 0) break;  // holdout fully reclaimed by tiny groups
      const double val_mse =
          evaluate(val_rows, val_y, cand_ensemble, cfg.resolved_workers()).mse;
      if (val_mse < best_mse) {
        best_mse = val_mse;
        chosen = cand;
      }
    }
  }

  out.ensemble = train_ensemble(organized, organized.targets(), out.plan,
                                detail::train_options(cfg, chosen));
  if (out.clustering.standardized)
    out.ensemble.standardizer = out.clustering.standardizer;

  std::filesystem::create_directories(cfg.out_dir);
  save_ensemble(cfg.resolved_ensemble_path(), out.ensemble);

  out.report = out.clustering.report;
  out.report.meta.emplace_back("processes", std::to_string(cfg.p));
  out.report.meta.emplace_back("delta", format_double(cfg.delta));
  out.report.meta.emplace_back("seed", std::to_string(cfg.seed));
  out.report.meta.emplace_back("model", to_string(cfg.model));
  out.report.processes = process_rows(out.plan);

  if (!cfg.test_path.empty()) {
    DataMatrix test = load_dataset(cfg.test_path, cfg.resolved_format());
    if (!test.has_targets())
      throw std::runtime_error("train: test dataset has no regressand column");
    if (out.ensemble.standardizer.fitted()) out.ensemble.standardizer.apply(test);
    const EvaluationReport ev =
        evaluate(test, test.targets(), out.ensemble, cfg.resolved_workers());
    out.test_mse = ev.mse;
    out.report.regressions.push_back({to_string(cfg.model),
                                      to_string(out.ensemble.kernel.type),
                                      out.ensemble.kernel.sigma, chosen.lambda,
                                      chosen.epsilon, chosen.cost, ev.mse});
  }
  write_report_csv(cfg.out_dir + "/report.csv", out.report);
  write_hierarchy_json(cfg.out_dir + "/hierarchy.json", out.clustering.hierarchy,
                       cfg.emit_assignments);
  if (cfg.emit_svg && data.cols() == 2)
    write_clusters_svg(cfg.out_dir + "/clusters.svg", data,
                       out.clustering.hierarchy.optimal().assignment);
  return out;
}

inline EvalOutcome run_eval(const RunConfig& cfg) {
  if (cfg.test_path.empty())
    throw std::runtime_error("eval: a test dataset path is required");
  RegressionEnsemble ensemble = load_ensemble(cfg.resolved_ensemble_path());
  DataMatrix test = load_dataset(cfg.test_path, cfg.format
                                                    ? *cfg.format
                                                    : guess_format(cfg.test_path));
  if (!test.has_targets())
    throw std::runtime_error("eval: test dataset has no regressand column");
  if (ensemble.standardizer.fitted()) ensemble.standardizer.apply(test);

  EvalOutcome out;
  out.evaluation = evaluate(test, test.targets(), ensemble, cfg.resolved_workers());
  out.report.meta.emplace_back("ensemble", cfg.resolved_ensemble_path());
  out.report.meta.emplace_back("test", cfg.test_path);
  out.report.meta.emplace_back("samples", std::to_string(test.rows()));
  out.report.regressions.push_back({to_string(ensemble.kind),
                                    to_string(ensemble.kernel.type),
                                    ensemble.kernel.sigma, ensemble.lambda,
                                    ensemble.epsilon, ensemble.cost,
                                    out.evaluation.mse});
  std::filesystem::create_directories(cfg.out_dir);
  write_report_csv(cfg.out_dir + "/report.csv", out.report);
  return out;
}

/// Timed end-to-end run. Categories follow the usual dissection: clustering
/// I/O, clustering, regression I/O, regression, and the final merge.
inline BenchOutcome run_bench(const RunConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  auto seconds = [](Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
  };
  BenchOutcome out;
  TrainOutcome& t = out.train;

  const auto t0 = Clock::now();
  t.clustering.data = load_dataset(cfg.data_path, cfg.resolved_format());
  const auto t1 = Clock::now();
  if (!t.clustering.data.has_targets())
    throw std::runtime_error("bench: dataset has no regressand column");
  t.clustering.standardized = cfg.resolved_standardize(cfg.resolved_format());
  if (t.clustering.standardized) {
    t.clustering.standardizer.fit(t.clustering.data);
    t.clustering.standardizer.apply(t.clustering.data);
  }
  t.clustering.hierarchy = build_hierarchy(t.clustering.data, cfg.resolved_workers());
  auto [organized, order] = organize(t.clustering.data, t.clustering.hierarchy);
  t.plan = plan_partition(t.clustering.hierarchy, cfg.p, cfg.delta);
  const auto t2 = Clock::now();
  t.ensemble = train_ensemble(
      organized, organized.targets(), t.plan,
      detail::train_options(cfg, {cfg.lambda, cfg.epsilon, cfg.cost}));
  if (t.clustering.standardized)
    t.ensemble.standardizer = t.clustering.standardizer;
  const auto t3 = Clock::now();
  std::filesystem::create_directories(cfg.out_dir);
  save_ensemble(cfg.resolved_ensemble_path(), t.ensemble);
  DataMatrix test;
  if (!cfg.test_path.empty()) {
    test = load_dataset(cfg.test_path, cfg.resolved_format());
    if (t.ensemble.standardizer.fitted()) t.ensemble.standardizer.apply(test);
  }
  const auto t4 = Clock::now();
  double reduce_seconds = 0.0;
  if (test.rows() > 0) {
    const auto t5 = Clock::now();
    const EvaluationReport ev =
        evaluate(test, test.targets(), t.ensemble, cfg.resolved_workers());
    t.test_mse = ev.mse;
    reduce_seconds = seconds(t5, Clock::now());
  }
  out.timings = {{"clustering_io", seconds(t0, t1)},
                 {"clustering", seconds(t1, t2)},
                 {"regression", seconds(t2, t3)},
                 {"regression_io", seconds(t3, t4)},
                 {"reduce", reduce_seconds}};

  std::ofstream timing(cfg.out_dir + "/timing.csv");
  if (!timing) throw std::runtime_error("cannot write timing.csv");
  timing << "phase,seconds\n";
  for (const auto& [phase, secs] : out.timings)
    timing << phase << "," << format_double(secs) << "\n";
  return out;
}

}  // namespace bfc
