#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfc/data.hpp"
#include "bfc/kernels.hpp"
#include "bfc/linalg.hpp"

namespace bfc {

// ---------------------------------------------------------------------------
// Linear regression
// ---------------------------------------------------------------------------

struct LinearModel {
  std::vector<double> weights;  // d feature weights followed by the intercept

  double predict(std::span<const double> x) const {
    double v = weights.back();
    for (std::size_t i = 0; i < x.size(); ++i) v += weights[i] * x[i];
    return v;
  }
};

/// Least squares fit via the normal equations on the intercept-augmented
/// design matrix. A tiny escalating ridge jitter handles rank deficiency.
inline LinearModel train_lr(const DataMatrix& x, std::span<const double> y) {
  const std::size_t n = x.rows();
  if (n < 1 || y.size() != n)
    throw std::invalid_argument("train_lr: need >= 1 sample and matching y");
  const std::size_t d = x.cols() + 1;  // + intercept column
  std::vector<double> gram(d * d, 0.0);
  std::vector<double> rhs(d, 0.0);
  std::vector<double> xi(d, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    const auto row = x.row(r);
    for (std::size_t c = 0; c + 1 < d; ++c) xi[c] = row[c];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j <= i; ++j) gram[i * d + j] += xi[i] * xi[j];
      rhs[i] += xi[i] * y[r];
    }
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) gram[i * d + j] = gram[j * d + i];
  spd_solve_with_jitter(std::move(gram), d, rhs);
  return LinearModel{std::move(rhs)};
}

// ---------------------------------------------------------------------------
// Kernel ridge regression
// ---------------------------------------------------------------------------

struct KrrModel {
  Kernel kernel;
  double lambda = 1.0;
  DataMatrix support;          // the training points
  std::vector<double> alpha;   // dual coefficients, (K + lambda I) alpha = y
  double y_offset = 0.0;       // added back at prediction time

  double predict(std::span<const double> x) const {
    double v = y_offset;
    for (std::size_t i = 0; i < support.rows(); ++i)
      v += alpha[i] * kernel(x, support.row(i));
    return v;
  }
};

/// Closed-form KRR: solves (K + lambda I) alpha = y by Cholesky with one
/// step of iterative refinement.
inline KrrModel train_krr(const DataMatrix& x, std::span<const double> y,
                          double lambda, Kernel kernel) {
  const std::size_t n = x.rows();
  if (n < 1 || y.size() != n)
    throw std::invalid_argument("train_krr: need >= 1 sample and matching y");
  if (!(lambda > 0.0)) throw std::invalid_argument("train_krr: lambda must be > 0");

  std::vector<double> system = gram_matrix(kernel, x);
  for (std::size_t i = 0; i < n; ++i) system[i * n + i] += lambda;

  std::vector<double> factor = system;
  if (!cholesky_factor(factor, n))
    throw std::runtime_error(
        "train_krr: K + lambda I is not positive definite; "
        "check the kernel configuration");
  std::vector<double> alpha(y.begin(), y.end());
  cholesky_solve(factor, n, alpha);
  // One refinement pass keeps the residual well under the 1e-8 contract.
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i) {
    double r = y[i];
    for (std::size_t j = 0; j < n; ++j) r -= system[i * n + j] * alpha[j];
    residual[i] = r;
  }
  cholesky_solve(factor, n, residual);
  for (std::size_t i = 0; i < n; ++i) alpha[i] += residual[i];

  KrrModel model;
  model.kernel = kernel;
  model.lambda = lambda;
  model.support = x;
  model.alpha = std::move(alpha);
  return model;
}

// ---------------------------------------------------------------------------
// Epsilon-SVR via pairwise coordinate optimization
// ---------------------------------------------------------------------------

struct SvrModel {
  Kernel kernel;
  double epsilon = 0.1;
  double cost = 1.0;
  DataMatrix support;
  std::vector<double> beta;    // alpha_i - alpha_i^*, in [-C, C]
  double bias = 0.0;
  double y_offset = 0.0;
  std::size_t iterations = 0;

  double predict(std::span<const double> x) const {
    double v = bias + y_offset;
    for (std::size_t i = 0; i < support.rows(); ++i)
      v += beta[i] * kernel(x, support.row(i));
    return v;
  }

  /// Dual objective of the trained coefficients (maximization form).
  double dual_objective(std::span<const double> y) const {
    const std::size_t n = support.rows();
    double quad = 0.0, lin = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        quad += beta[i] * beta[j] * kernel(support.row(i), support.row(j));
      lin += y[i] * beta[i] - epsilon * std::abs(beta[i]);
    }
    return -0.5 * quad + lin;
  }
};

struct SvrOptions {
  double tolerance = 1e-3;        // KKT violation threshold
  std::size_t max_iterations = 0; // 0 = max(1e7, 200 * n)
  std::size_t cache_limit = 2048; // full Gram cache up to this many samples
};

namespace detail {

/// Working-set solver for the 2n-variable SVR dual: variables z in [0, C]
/// with signs s = (+1 ... +1, -1 ... -1), minimizing
/// 1/2 z^T Q z + p^T z subject to s^T z = 0 where Q_tu = s_t s_u K(t%n, u%n)
/// and p = (eps - y, eps + y). Pair selection is the deterministic maximal
/// violating pair; ties resolve to the lowest index.
class SvrSolver {
public:
  SvrSolver(const DataMatrix& x, std::span<const double> y, double eps, double c,
            const Kernel& kernel, const SvrOptions& opts)
      : x_(x), n_(x.rows()), eps_(eps), c_(c), kernel_(kernel), opts_(opts) {
    if (n_ >= 1 && n_ <= opts_.cache_limit) {
      cache_ = gram_matrix(kernel_, x_);
      cached_ = true;
    }
    z_.assign(2 * n_, 0.0);
    grad_.resize(2 * n_);
    for (std::size_t i = 0; i < n_; ++i) {
      grad_[i] = eps_ - y[i];
      grad_[n_ + i] = eps_ + y[i];
    }
  }

  std::size_t solve() {
    const std::size_t max_iter =
        opts_.max_iterations ? opts_.max_iterations
                             : std::max<std::size_t>(10'000'000, 200 * n_);
    std::vector<double> row_i(n_), row_j(n_);
    std::size_t iter = 0;
    for (; iter < max_iter; ++iter) {
      const auto [i, j, violation] = select_pair();
      if (violation <= opts_.tolerance) return iter;
      kernel_row(i % n_, row_i);
      kernel_row(j % n_, row_j);
      update_pair(i, j, row_i, row_j);
    }
    throw std::runtime_error("train_svr: iteration cap reached; duality gap marker");
  }

  double z(std::size_t t) const { return z_[t]; }

  double beta(std::size_t i) const { return z_[i] - z_[n_ + i]; }

  /// Offset term from the gradient: -rho in the usual convention.
  double bias() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      const double sg = sign(t) * grad_[t];
      if (z_[t] >= c_) {
        if (sign(t) < 0) ub = std::min(ub, sg);
        else lb = std::max(lb, sg);
      } else if (z_[t] <= 0.0) {
        if (sign(t) > 0) ub = std::min(ub, sg);
        else lb = std::max(lb, sg);
      } else {
        ++free_count;
        sum_free += sg;
      }
    }
    const double rho = free_count > 0 ? sum_free / static_cast<double>(free_count)
                                      : (ub + lb) / 2.0;
    return -rho;
  }

private:
  static constexpr double kTau = 1e-12;

  double sign(std::size_t t) const { return t < n_ ? 1.0 : -1.0; }

  void kernel_row(std::size_t r, std::vector<double>& out) const {
    if (cached_) {
      const double* src = cache_.data() + r * n_;
      std::copy(src, src + n_, out.begin());
      return;
    }
    for (std::size_t j = 0; j < n_; ++j) out[j] = kernel_(x_.row(r), x_.row(j));
  }

  // Q entry (t, u), given the kernel row of sample u % n.
  double q(std::size_t t, std::size_t u, const std::vector<double>& row_u) const {
    return sign(t) * sign(u) * row_u[t % n_];
  }

  struct Pair {
    std::size_t i, j;
    double violation;
  };

  Pair select_pair() const {
    double up_best = -std::numeric_limits<double>::infinity();
    double low_best = std::numeric_limits<double>::infinity();
    std::size_t i = 0, j = 0;
    for (std::size_t t = 0; t < 2 * n_; ++t) {
      const double v = -sign(t) * grad_[t];
      const bool in_up = sign(t) > 0 ? z_[t] < c_ : z_[t] > 0.0;
      const bool in_low = sign(t) > 0 ? z_[t] > 0.0 : z_[t] < c_;
      if (in_up && v > up_best) {
        up_best = v;
        i = t;
      }
      if (in_low && v < low_best) {
        low_best = v;
        j = t;
      }
    }
    return {i, j, up_best - low_best};
  }

  void update_pair(std::size_t i, std::size_t j, const std::vector<double>& row_i,
                   const std::vector<double>& row_j) {
    const double old_i = z_[i], old_j = z_[j];
    if (sign(i) != sign(j)) {
      double quad = q(i, i, row_i) + q(j, j, row_j) + 2.0 * q(i, j, row_j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = z_[i] - z_[j];
      z_[i] += delta;
      z_[j] += delta;
      if (diff > 0.0) {
        if (z_[j] < 0.0) { z_[j] = 0.0; z_[i] = diff; }
      } else {
        if (z_[i] < 0.0) { z_[i] = 0.0; z_[j] = -diff; }
      }
      if (diff > 0.0) {
        if (z_[i] > c_) { z_[i] = c_; z_[j] = c_ - diff; }
      } else {
        if (z_[j] > c_) { z_[j] = c_; z_[i] = c_ + diff; }
      }
    } else {
      double quad = q(i, i, row_i) + q(j, j, row_j) - 2.0 * q(i, j, row_j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = z_[i] + z_[j];
      z_[i] -= delta;
      z_[j] += delta;
      if (sum > c_) {
        if (z_[i] > c_) { z_[i] = c_; z_[j] = sum - c_; }
      } else {
        if (z_[j] < 0.0) { z_[j] = 0.0; z_[i] = sum; }
      }
      if (sum > c_) {
        if (z_[j] > c_) { z_[j] = c_; z_[i] = sum - c_; }
      } else {
        if (z_[i] < 0.0) { z_[i] = 0.0; z_[j] = sum; }
      }
    }
    const double di = z_[i] - old_i;
    const double dj = z_[j] - old_j;
    for (std::size_t t = 0; t < 2 * n_; ++t)
      grad_[t] += q(t, i, row_i) * di + q(t, j, row_j) * dj;
  }

  const DataMatrix& x_;
  std::size_t n_;
  double eps_, c_;
  Kernel kernel_;
  SvrOptions opts_;
  bool cached_ = false;
  std::vector<double> cache_;
  std::vector<double> z_;
  std::vector<double> grad_;
};

}  // namespace detail

/// Epsilon-insensitive SVR trained by deterministic maximal-violating-pair
/// coordinate optimization. Throws when the iteration cap is hit, reporting
/// the best-so-far duality gap.
inline SvrModel train_svr(const DataMatrix& x, std::span<const double> y,
                          double epsilon, double cost, Kernel kernel,
                          const SvrOptions& options = {}) {
  const std::size_t n = x.rows();
  if (n < 1 || y.size() != n)
    throw std::invalid_argument("train_svr: need >= 1 sample and matching y");
  if (epsilon < 0.0) throw std::invalid_argument("train_svr: epsilon must be >= 0");
  if (!(cost > 0.0)) throw std::invalid_argument("train_svr: C must be > 0");

  detail::SvrSolver solver(x, y, epsilon, cost, kernel, options);
  SvrModel model;
  model.kernel = kernel;
  model.epsilon = epsilon;
  model.cost = cost;
  model.support = x;
  model.beta.resize(n);
  try {
    model.iterations = solver.solve();
  } catch (const std::runtime_error&) {
    // Recover coefficients to report how far optimization got.
    for (std::size_t i = 0; i < n; ++i) model.beta[i] = solver.beta(i);
    model.bias = solver.bias();
    double primal = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double slack = std::abs(y[i] - model.predict(x.row(i))) - epsilon;
      primal += cost * std::max(0.0, slack);
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        primal += 0.5 * model.beta[i] * model.beta[j] * kernel(x.row(i), x.row(j));
    const double gap = primal - model.dual_objective(y);
    throw std::runtime_error(
        "train_svr: iteration cap reached before KKT tolerance; duality gap " +
        std::to_string(gap));
  }
  for (std::size_t i = 0; i < n; ++i) model.beta[i] = solver.beta(i);
  model.bias = solver.bias();
  return model;
}

}  // namespace bfc
