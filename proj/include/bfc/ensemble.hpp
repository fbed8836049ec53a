#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "bfc/data.hpp"
#include "bfc/distance.hpp"
#include "bfc/parallel.hpp"
#include "bfc/partition.hpp"
#include "bfc/regression.hpp"

namespace bfc {

enum class ModelKind { lr, krr, svr };

inline const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::lr: return "lr";
    case ModelKind::krr: return "krr";
    default: return "svr";
  }
}

inline ModelKind model_kind_from_string(const std::string& s) {
  if (s == "lr") return ModelKind::lr;
  if (s == "krr") return ModelKind::krr;
  if (s == "svr") return ModelKind::svr;
  throw std::invalid_argument("unknown model kind: " + s);
}

/// One trained model with the center of the samples it was trained on and
/// the virtual process that owns it.
struct GroupModel {
  std::uint32_t group_id = 0;
  std::uint32_t process = 0;
  std::vector<double> center;
  std::variant<LinearModel, KrrModel, SvrModel> model;

  double predict(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.predict(x); }, model);
  }
};

struct TrainOptions {
  ModelKind kind = ModelKind::krr;
  Kernel kernel;                 // sigma <= 0 selects the median heuristic
  double lambda = 1e-2;          // KRR
  double epsilon = 0.1;          // SVR
  double cost = 1.0;             // SVR
  SvrOptions svr;
  unsigned workers = 1;
};

/// One model per partition group plus its center; prediction routes each
/// sample to the model of its nearest center.
struct RegressionEnsemble {
  ModelKind kind = ModelKind::krr;
  Kernel kernel;
  double lambda = 0.0;
  double epsilon = 0.0;
  double cost = 0.0;
  std::uint32_t processes = 1;
  Standardizer standardizer;     // empty when inputs are used raw
  std::vector<GroupModel> groups;

  /// Nearest group center by Euclidean distance; index tie-break.
  std::uint32_t route(std::span<const double> x) const {
    if (groups.empty()) throw std::logic_error("route: empty ensemble");
    if (x.size() != groups.front().center.size())
      throw std::invalid_argument("route: dimension mismatch");
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_g = 0;
    for (std::uint32_t g = 0; g < groups.size(); ++g) {
      const double sq = detail::squared_distance_bounded(
          x.data(), groups[g].center.data(), x.size(), best);
      if (sq < best) {
        best = sq;
        best_g = g;
      }
    }
    return best_g;
  }

  double predict(std::span<const double> x) const {
    return groups[route(x)].predict(x);
  }
};

/// Trains one model per group of the plan over the ORGANIZED training data.
/// KRR and SVR center the regressand per group; training is parallel across
/// groups and the result does not depend on the worker count.
inline RegressionEnsemble train_ensemble(const DataMatrix& organized,
                                         std::span<const double> y,
                                         const PartitionPlan& plan,
                                         const TrainOptions& opts) {
  if (organized.rows() != y.size())
    throw std::invalid_argument("train_ensemble: sample/regressand mismatch");

  RegressionEnsemble ensemble;
  ensemble.kind = opts.kind;
  ensemble.kernel = opts.kernel;
  if (ensemble.kernel.type == KernelType::rbf && ensemble.kernel.sigma <= 0.0)
    ensemble.kernel.sigma = median_pairwise_distance(organized);
  ensemble.lambda = opts.lambda;
  ensemble.epsilon = opts.epsilon;
  ensemble.cost = opts.cost;
  ensemble.processes = plan.processes;
  ensemble.groups.resize(plan.groups.size());

  const std::size_t d = organized.cols();
  parallel_tasks(plan.groups.size(), opts.workers, [&](std::size_t gi) {
    const Group& g = plan.groups[gi];
    if (g.size() == 0) throw std::logic_error("train_ensemble: empty group");
    DataMatrix slice(g.size(), d);
    std::vector<double> ys(g.size());
    std::vector<double> center(d, 0.0);
    for (std::uint32_t r = 0; r < g.size(); ++r) {
      const auto src = organized.row(g.range.start + r);
      auto dst = slice.row(r);
      for (std::size_t c = 0; c < d; ++c) {
        dst[c] = src[c];
        center[c] += src[c];
      }
      ys[r] = y[g.range.start + r];
    }
    for (std::size_t c = 0; c < d; ++c) center[c] /= static_cast<double>(g.size());

    GroupModel& gm = ensemble.groups[gi];
    gm.group_id = g.id;
    gm.process = plan.owner[gi];
    gm.center = std::move(center);
    if (opts.kind == ModelKind::lr) {
      gm.model = train_lr(slice, ys);
    } else {
      double mean = 0.0;
      for (const double v : ys) mean += v;
      mean /= static_cast<double>(ys.size());
      for (double& v : ys) v -= mean;
      if (opts.kind == ModelKind::krr) {
        KrrModel m = train_krr(slice, ys, opts.lambda, ensemble.kernel);
        m.y_offset = mean;
        gm.model = std::move(m);
      } else {
        SvrModel m = train_svr(slice, ys, opts.epsilon, opts.cost,
                               ensemble.kernel, opts.svr);
        m.y_offset = mean;
        gm.model = std::move(m);
      }
    }
  });
  return ensemble;
}

struct EvaluationReport {
  double mse = 0.0;
  std::size_t count = 0;
  std::vector<double> process_errors;  // e^p, summed once for the MSE
};

/// Routes every test sample to its nearest group center, accumulates squared
/// errors per owning virtual process, and reduces once at the end:
/// MSE = (sum_p e^p) / k. The result does not depend on which process owns a
/// group, only on the routing.
inline EvaluationReport evaluate(const DataMatrix& x_test,
                                 std::span<const double> y_test,
                                 const RegressionEnsemble& ensemble,
                                 unsigned workers = 1) {
  const std::size_t k = x_test.rows();
  if (k < 1 || y_test.size() != k)
    throw std::invalid_argument("evaluate: need >= 1 test sample and matching y");

  EvaluationReport report;
  report.count = k;
  report.process_errors.assign(ensemble.processes, 0.0);

  // Per-sample residuals first (parallel), then a deterministic accumulation
  // pass in sample order per process.
  std::vector<double> sq_error(k);
  std::vector<std::uint32_t> owner(k);
  parallel_chunks(k, workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto x = x_test.row(i);
      const std::uint32_t g = ensemble.route(x);
      const double err = ensemble.groups[g].predict(x) - y_test[i];
      sq_error[i] = err * err;
      owner[i] = ensemble.groups[g].process;
    }
  });
  for (std::size_t i = 0; i < k; ++i) report.process_errors[owner[i]] += sq_error[i];
  double total = 0.0;
  for (const double e : report.process_errors) total += e;
  report.mse = total / static_cast<double>(k);
  return report;
}

}  // namespace bfc
