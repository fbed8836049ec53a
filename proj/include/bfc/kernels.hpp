#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfc/data.hpp"
#include "bfc/distance.hpp"

namespace bfc {

enum class KernelType { linear, rbf };

inline const char* to_string(KernelType t) {
  return t == KernelType::linear ? "linear" : "rbf";
}

inline KernelType kernel_type_from_string(const std::string& s) {
  if (s == "linear") return KernelType::linear;
  if (s == "rbf") return KernelType::rbf;
  throw std::invalid_argument("unknown kernel type: " + s);
}

/// Kernel function k(x, z). The Gaussian variant is
/// exp(-||x-z||^2 / (2 sigma^2)).
struct Kernel {
  KernelType type = KernelType::rbf;
  double sigma = 1.0;

  double operator()(std::span<const double> a, std::span<const double> b) const {
    if (type == KernelType::linear) {
      if (a.size() != b.size())
        throw std::invalid_argument("kernel: dimension mismatch");
      double dot = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
      return dot;
    }
    return std::exp(-squared_distance(a, b) / (2.0 * sigma * sigma));
  }
};

/// Row-major n x n Gram matrix of the rows of X.
inline std::vector<double> gram_matrix(const Kernel& k, const DataMatrix& x) {
  const std::size_t n = x.rows();
  std::vector<double> gram(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = k(x.row(i), x.row(j));
      gram[i * n + j] = v;
      gram[j * n + i] = v;
    }
  }
  return gram;
}

/// Median pairwise Euclidean distance over an evenly strided subsample of at
/// most `max_samples` rows; the usual bandwidth heuristic for the Gaussian
/// kernel. Falls back to 1 when the median is zero (duplicate-heavy data).
inline double median_pairwise_distance(const DataMatrix& x,
                                       std::size_t max_samples = 1000) {
  const std::size_t n = x.rows();
  if (n < 2) return 1.0;
  const std::size_t m = std::min(n, max_samples);
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i * n / m;
  std::vector<double> dists;
  dists.reserve(m * (m - 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      dists.push_back(squared_distance(x.row(idx[i]), x.row(idx[j])));
  auto mid = dists.begin() + dists.size() / 2;
  std::nth_element(dists.begin(), mid, dists.end());
  const double med = std::sqrt(*mid);
  return med > 0.0 ? med : 1.0;
}

}  // namespace bfc
