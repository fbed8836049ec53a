#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace bfc {

/// In-place Cholesky factorization of a row-major symmetric matrix (lower
/// triangle used). Returns false when a pivot is not positive.
inline bool cholesky_factor(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * n + k] * a[j * n + k];
    if (!(diag > 0.0)) return false;
    const double root = std::sqrt(diag);
    a[j * n + j] = root;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = v / root;
    }
  }
  return true;
}

/// Solves L L^T x = b given the factor from cholesky_factor; x overwrites b.
inline void cholesky_solve(const std::vector<double>& l, std::size_t n,
                           std::vector<double>& b) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= l[i * n + k] * b[k];
    b[i] = v / l[i * n + i];
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double v = b[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= l[k * n + ii] * b[k];
    b[ii] = v / l[ii * n + ii];
  }
}

/// Solves the SPD system A x = b, escalating a diagonal jitter when the
/// factorization fails. Returns the jitter actually used (0 when none).
inline double spd_solve_with_jitter(std::vector<double> a, std::size_t n,
                                    std::vector<double>& b) {
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += a[i * n + i];
  const double unit = (trace > 0.0 ? trace / static_cast<double>(n) : 1.0);
  double jitter = 0.0;
  std::vector<double> work = a;
  for (int attempt = 0; attempt < 16; ++attempt) {
    if (cholesky_factor(work, n)) {
      cholesky_solve(work, n, b);
      return jitter;
    }
    jitter = (jitter == 0.0 ? 1e-12 * unit : jitter * 10.0);
    work = a;
    for (std::size_t i = 0; i < n; ++i) work[i * n + i] += jitter;
  }
  throw std::runtime_error("spd_solve_with_jitter: matrix is numerically indefinite");
}

}  // namespace bfc
