#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

namespace bfc {

/// Block width of the canonical distance kernel. Distances are accumulated
/// in fixed-size blocks so the compiler can vectorize the inner loop; the
/// summation order is part of the kernel's contract and every distance used
/// for comparisons anywhere in the library comes from this one routine.
inline constexpr std::size_t kDistanceBlock = 8;

namespace detail {

inline double squared_distance_raw(const double* a, const double* b, std::size_t d) {
  double total = 0.0;
  std::size_t i = 0;
  for (; i + kDistanceBlock <= d; i += kDistanceBlock) {
    double partial = 0.0;
    for (std::size_t k = 0; k < kDistanceBlock; ++k) {
      const double diff = a[i + k] - b[i + k];
      partial += diff * diff;
    }
    total += partial;
  }
  if (i < d) {
    double partial = 0.0;
    for (; i < d; ++i) {
      const double diff = a[i] - b[i];
      partial += diff * diff;
    }
    total += partial;
  }
  return total;
}

/// Same accumulation as squared_distance_raw but gives up at a block
/// boundary once the running sum strictly exceeds `bound`, returning +inf.
/// Any finite return value is bit-identical to the canonical kernel, so
/// nearest-neighbor scans built on this variant match unbounded scans.
inline double squared_distance_bounded(const double* a, const double* b,
                                       std::size_t d, double bound) {
  double total = 0.0;
  std::size_t i = 0;
  for (; i + kDistanceBlock <= d; i += kDistanceBlock) {
    double partial = 0.0;
    for (std::size_t k = 0; k < kDistanceBlock; ++k) {
      const double diff = a[i + k] - b[i + k];
      partial += diff * diff;
    }
    total += partial;
    if (total > bound) return std::numeric_limits<double>::infinity();
  }
  if (i < d) {
    double partial = 0.0;
    for (; i < d; ++i) {
      const double diff = a[i] - b[i];
      partial += diff * diff;
    }
    total += partial;
  }
  return total;
}

}  // namespace detail

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("distance: dimension mismatch");
  return detail::squared_distance_raw(a.data(), b.data(), a.size());
}

/// Euclidean distance between two points of equal dimensionality.
inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

}  // namespace bfc
