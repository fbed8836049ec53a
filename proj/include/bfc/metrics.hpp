#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

namespace bfc {

/// Counts between two labelings with row/column marginals.
struct ContingencyTable {
  std::size_t rows = 0, cols = 0;
  std::vector<std::size_t> counts;  // rows x cols
  std::vector<std::size_t> row_sums;
  std::vector<std::size_t> col_sums;
  std::size_t total = 0;

  std::size_t at(std::size_t i, std::size_t j) const { return counts[i * cols + j]; }

  static ContingencyTable from_labels(std::span<const int> truth,
                                      std::span<const int> pred) {
    if (truth.size() != pred.size() || truth.empty())
      throw std::invalid_argument("ContingencyTable: label vectors must match and be nonempty");
    std::map<int, std::size_t> tmap, pmap;
    for (const int v : truth) tmap.emplace(v, 0);
    for (const int v : pred) pmap.emplace(v, 0);
    std::size_t next = 0;
    for (auto& [k, idx] : tmap) idx = next++;
    next = 0;
    for (auto& [k, idx] : pmap) idx = next++;

    ContingencyTable t;
    t.rows = tmap.size();
    t.cols = pmap.size();
    t.counts.assign(t.rows * t.cols, 0);
    t.row_sums.assign(t.rows, 0);
    t.col_sums.assign(t.cols, 0);
    t.total = truth.size();
    for (std::size_t i = 0; i < truth.size(); ++i) {
      const std::size_t r = tmap[truth[i]];
      const std::size_t c = pmap[pred[i]];
      ++t.counts[r * t.cols + c];
      ++t.row_sums[r];
      ++t.col_sums[c];
    }
    return t;
  }
};

inline double entropy(std::span<const std::size_t> marginals, std::size_t n) {
  double h = 0.0;
  for (const std::size_t m : marginals) {
    if (m == 0) continue;
    const double p = static_cast<double>(m) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

inline double mutual_information(const ContingencyTable& t) {
  const double n = static_cast<double>(t.total);
  double mi = 0.0;
  for (std::size_t i = 0; i < t.rows; ++i) {
    for (std::size_t j = 0; j < t.cols; ++j) {
      const std::size_t nij = t.at(i, j);
      if (nij == 0) continue;
      const double pij = nij / n;
      mi += pij * std::log(n * nij / (static_cast<double>(t.row_sums[i]) *
                                      static_cast<double>(t.col_sums[j])));
    }
  }
  return mi;
}

/// Expected mutual information under the hypergeometric null model
/// (Vinh et al.), evaluated with log-factorials.
inline double expected_mutual_information(const ContingencyTable& t) {
  const std::size_t n = t.total;
  const double logn = std::log(static_cast<double>(n));
  auto lf = [](std::size_t v) { return std::lgamma(static_cast<double>(v) + 1.0); };
  double emi = 0.0;
  for (std::size_t i = 0; i < t.rows; ++i) {
    const std::size_t a = t.row_sums[i];
    for (std::size_t j = 0; j < t.cols; ++j) {
      const std::size_t b = t.col_sums[j];
      const std::size_t lo = a + b > n ? a + b - n : 1;
      const std::size_t hi = std::min(a, b);
      for (std::size_t nij = lo; nij <= hi; ++nij) {
        const double term =
            (static_cast<double>(nij) / n) *
            (std::log(static_cast<double>(nij)) + logn -
             std::log(static_cast<double>(a)) - std::log(static_cast<double>(b)));
        const double log_prob = lf(a) + lf(b) + lf(n - a) + lf(n - b) - lf(n) -
                                lf(nij) - lf(a - nij) - lf(b - nij) -
                                lf(n - a - b + nij);
        emi += term * std::exp(log_prob);
      }
    }
  }
  return emi;
}

/// Adjusted mutual information with max-entropy normalization. 1.0 for
/// identical partitions up to relabeling; approximately 0 for independent
/// ones. Zero-entropy convention: 1.0 when both partitions are single
/// clusters, 0.0 when only one is.
inline double ami(std::span<const int> labels_true, std::span<const int> labels_pred) {
  const ContingencyTable t = ContingencyTable::from_labels(labels_true, labels_pred);
  const double h_true = entropy(t.row_sums, t.total);
  const double h_pred = entropy(t.col_sums, t.total);
  if (h_true == 0.0 && h_pred == 0.0) return 1.0;
  if (h_true == 0.0 || h_pred == 0.0) return 0.0;
  const double mi = mutual_information(t);
  const double emi = expected_mutual_information(t);
  double denom = std::max(h_true, h_pred) - emi;
  constexpr double kEps = 1e-15;
  denom = denom < 0.0 ? std::min(denom, -kEps) : std::max(denom, kEps);
  return (mi - emi) / denom;
}

/// Mean squared error between predictions and ground truth.
inline double mse(std::span<const double> pred, std::span<const double> truth) {
  if (pred.size() != truth.size() || pred.empty())
    throw std::invalid_argument("mse: vectors must match and be nonempty");
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double r = pred[i] - truth[i];
    sum += r * r;
  }
  return sum / static_cast<double>(pred.size());
}

}  // namespace bfc
