// bfc - Best Friend Clustering toolkit command line.
//
// Subcommands: cluster, partition, train, eval, bench. All outputs land in
// the --out directory; exit code 0 on success, 1 with a single "error:" line
// on stderr otherwise.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bfc/pipeline.hpp"

namespace {

void add_common_options(CLI::App* cmd, bfc::RunConfig& cfg, std::string& format,
                        std::string& standardize) {
  cmd->add_option("data", cfg.data_path, "dataset file")->required();
  cmd->add_option("--format", format, "csv|libsvm|xy (default: by extension)");
  cmd->add_option("--standardize", standardize,
                  "auto|on|off (default auto: on except for xy shape data)");
  cmd->add_option("--out", cfg.out_dir, "output directory");
  cmd->add_option("--workers", cfg.workers,
                  "parallel workers (default: BFC_WORKERS env or hardware)");
  cmd->add_flag("--assignments", cfg.emit_assignments,
                "include per-sample assignments in hierarchy.json");
}

void add_model_options(CLI::App* cmd, bfc::RunConfig& cfg, std::string& model,
                       std::string& kernel) {
  cmd->add_option("--model", model, "lr|krr|svr (default krr)");
  cmd->add_option("--kernel", kernel, "rbf|linear (default rbf)");
  cmd->add_option("--sigma", cfg.sigma, "rbf bandwidth (<=0: median heuristic)");
  cmd->add_option("--lambda", cfg.lambda, "KRR ridge parameter");
  cmd->add_option("--epsilon", cfg.epsilon, "SVR tube width");
  cmd->add_option("--cost", cfg.cost, "SVR regularization C");
  cmd->add_flag("--tune", cfg.tune, "grid-search hyperparameters on a 10% holdout");
  cmd->add_option("--seed", cfg.seed, "seed for the validation split");
}

void apply_strings(bfc::RunConfig& cfg, const std::string& format,
                   const std::string& standardize, const std::string& model,
                   const std::string& kernel) {
  if (!format.empty()) cfg.format = bfc::data_format_from_string(format);
  if (standardize == "on") cfg.standardize = bfc::StandardizeMode::on;
  else if (standardize == "off") cfg.standardize = bfc::StandardizeMode::off;
  else if (!standardize.empty() && standardize != "auto")
    throw std::runtime_error("--standardize expects auto|on|off");
  if (!model.empty()) cfg.model = bfc::model_kind_from_string(model);
  if (!kernel.empty()) cfg.kernel = bfc::kernel_type_from_string(kernel);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best Friend Clustering and parallel regression toolkit"};
  app.require_subcommand(1);

  bfc::RunConfig cfg;
  std::string format, standardize, model, kernel;

  CLI::App* cluster = app.add_subcommand("cluster", "build the cluster hierarchy");
  add_common_options(cluster, cfg, format, standardize);

  CLI::App* partition =
      app.add_subcommand("partition", "plan a balanced partition of k_opt clusters");
  add_common_options(partition, cfg, format, standardize);
  partition->add_option("-p,--processes", cfg.p, "virtual process count")->required();
  partition->add_option("--delta", cfg.delta, "partition slack (default 0.25)");

  CLI::App* train = app.add_subcommand("train", "train a per-cluster ensemble");
  add_common_options(train, cfg, format, standardize);
  add_model_options(train, cfg, model, kernel);
  train->add_option("-p,--processes", cfg.p, "virtual process count");
  train->add_option("--delta", cfg.delta, "partition slack (default 0.25)");
  train->add_option("--test", cfg.test_path, "evaluate on this set after training");
  train->add_option("--ensemble", cfg.ensemble_path,
                    "ensemble output path (default <out>/ensemble.bin)");

  CLI::App* eval = app.add_subcommand("eval", "evaluate a saved ensemble");
  eval->add_option("--ensemble", cfg.ensemble_path, "ensemble file")->required();
  eval->add_option("--test", cfg.test_path, "test dataset")->required();
  eval->add_option("--format", format, "csv|libsvm|xy (default: by extension)");
  eval->add_option("--out", cfg.out_dir, "output directory");
  eval->add_option("--workers", cfg.workers, "parallel workers");

  CLI::App* bench = app.add_subcommand("bench", "timed end-to-end run");
  add_common_options(bench, cfg, format, standardize);
  add_model_options(bench, cfg, model, kernel);
  bench->add_option("-p,--processes", cfg.p, "virtual process count");
  bench->add_option("--delta", cfg.delta, "partition slack (default 0.25)");
  bench->add_option("--test", cfg.test_path, "test set for the timed evaluation");

  CLI11_PARSE(app, argc, argv);

  try {
    apply_strings(cfg, format, standardize, model, kernel);
    if (cluster->parsed()) {
      const auto out = bfc::run_cluster(cfg);
      std::printf("levels=%zu k_opt=%d clusters_at_k_opt=%zu\n",
                  out.hierarchy.levels.size(), out.hierarchy.optimal_level,
                  out.hierarchy.optimal().cluster_count());
      if (out.ami_at_optimal) std::printf("ami=%.6f\n", *out.ami_at_optimal);
    } else if (partition->parsed()) {
      const auto [out, plan] = bfc::run_partition(cfg);
      std::uint64_t max_load = 0;
      for (const auto l : plan.loads) max_load = std::max(max_load, l);
      std::printf("groups=%zu processes=%u max_load=%llu\n", plan.groups.size(),
                  plan.processes, static_cast<unsigned long long>(max_load));
    } else if (train->parsed()) {
      const auto out = bfc::run_train(cfg);
      std::printf("groups=%zu k_opt=%d\n", out.ensemble.groups.size(),
                  out.clustering.hierarchy.optimal_level);
      if (out.test_mse) std::printf("mse=%.12g\n", *out.test_mse);
    } else if (eval->parsed()) {
      const auto out = bfc::run_eval(cfg);
      std::printf("mse=%.12g samples=%zu\n", out.evaluation.mse,
                  out.evaluation.count);
    } else if (bench->parsed()) {
      const auto out = bfc::run_bench(cfg);
      for (const auto& [phase, secs] : out.timings)
        std::printf("%s=%.6fs\n", phase.c_str(), secs);
      if (out.train.test_mse) std::printf("mse=%.12g\n", *out.train.test_mse);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
