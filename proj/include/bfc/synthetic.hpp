#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfc/data.hpp"

namespace bfc {

/// Deterministic uniform (0,1) and Gaussian draws on top of std::mt19937.
/// std::normal_distribution is implementation-defined, so Box-Muller is done
/// by hand to keep generated datasets identical across toolchains.
class SyntheticRng {
public:
  explicit SyntheticRng(std::uint32_t seed) : rng_(seed) {}

  double uniform() { return (static_cast<double>(rng_()) + 0.5) / 4294967296.0; }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  std::uint32_t bounded(std::uint32_t n) { return rng_() % n; }

  std::mt19937& engine() { return rng_; }

private:
  std::mt19937 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Fisher-Yates with explicit draws (std::shuffle's sequence is
/// implementation-defined).
template <typename T>
void deterministic_shuffle(std::vector<T>& v, SyntheticRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[rng.bounded(static_cast<std::uint32_t>(i))]);
}

struct BlobSpec {
  std::vector<double> center;
  double sigma = 1.0;
  std::size_t count = 0;
  int label = 0;
};

/// Snaps a value to a 2^-20 grid. Generated datasets pass through libm
/// (log/sin/cos are not correctly rounded everywhere), so raw draws can
/// differ by an ulp across toolchains; snapped values cannot.
inline double quantize(double v) { return std::round(v * 1048576.0) / 1048576.0; }

/// Isotropic Gaussian blobs with per-point labels, rows interleaved across
/// blobs so the raw file order does not leak the clustering.
inline DataMatrix make_blobs(std::span<const BlobSpec> blobs, std::uint32_t seed) {
  if (blobs.empty()) throw std::invalid_argument("make_blobs: no blobs");
  const std::size_t d = blobs.front().center.size();
  SyntheticRng rng(seed);
  DataMatrix m;
  std::vector<double> row(d);
  std::vector<std::size_t> order;
  for (std::size_t b = 0; b < blobs.size(); ++b)
    for (std::size_t i = 0; i < blobs[b].count; ++i) order.push_back(b);
  deterministic_shuffle(order, rng);
  for (const std::size_t b : order) {
    const BlobSpec& spec = blobs[b];
    if (spec.center.size() != d)
      throw std::invalid_argument("make_blobs: ragged blob centers");
    for (std::size_t c = 0; c < d; ++c)
      row[c] = quantize(spec.center[c] + spec.sigma * rng.normal());
    m.append_row(row);
    m.labels().push_back(spec.label);
  }
  return m;
}

/// 600 samples, 15 labels, d=2: one central blob ringed by two circles of
/// seven, mirroring the shape of the classic R15 benchmark.
inline DataMatrix make_r15_like() {
  std::vector<BlobSpec> blobs;
  blobs.push_back({{0.0, 0.0}, 0.5, 40, 0});
  for (int i = 0; i < 7; ++i) {
    const double a = 2.0 * 3.14159265358979323846 * i / 7.0;
    blobs.push_back({{8.0 * std::cos(a), 8.0 * std::sin(a)}, 0.5, 40, 1 + i});
  }
  for (int i = 0; i < 7; ++i) {
    const double a = 2.0 * 3.14159265358979323846 * (i + 0.5) / 7.0;
    blobs.push_back({{16.0 * std::cos(a), 16.0 * std::sin(a)}, 0.5, 40, 8 + i});
  }
  return make_blobs(blobs, 150u);
}

/// 788 samples, 7 labels, d=2: blobs of varying size, mirroring the shape of
/// the Aggregation benchmark.
inline DataMatrix make_aggregation_like() {
  const std::vector<BlobSpec> blobs = {
      {{5.0, 24.0}, 0.8, 90, 0},   {{22.0, 26.0}, 1.0, 160, 1},
      {{8.0, 8.0}, 0.9, 100, 2},   {{24.0, 7.0}, 1.0, 125, 3},
      {{40.0, 13.0}, 1.0, 155, 4}, {{38.0, 28.0}, 0.8, 80, 5},
      {{15.0, 16.0}, 0.7, 78, 6},
  };
  return make_blobs(blobs, 788u);
}

/// 399 samples, 6 labels, d=2, mirroring the shape of Zahn's Compound.
inline DataMatrix make_compound_like() {
  const std::vector<BlobSpec> blobs = {
      {{8.0, 20.0}, 1.0, 50, 0},  {{22.0, 20.0}, 1.3, 92, 1},
      {{8.0, 6.0}, 0.9, 38, 2},   {{20.0, 6.0}, 1.0, 45, 3},
      {{36.0, 12.0}, 1.5, 158, 4}, {{36.0, 26.0}, 0.6, 16, 5},
  };
  return make_blobs(blobs, 399u);
}

/// Housing-style regression set: 8 features, many compact blobs, and a
/// smooth nonlinear regressand with a little noise. Defaults give the
/// 18,432 / 2,208 train/test layout when split at 18,432.
inline DataMatrix make_cadata_like(std::size_t n = 20640, std::uint32_t seed = 20640u) {
  constexpr std::size_t d = 8;
  constexpr std::size_t blob_count = 288;
  SyntheticRng rng(seed);
  std::vector<BlobSpec> blobs(blob_count);
  for (std::size_t b = 0; b < blob_count; ++b) {
    blobs[b].center.resize(d);
    for (std::size_t c = 0; c < d; ++c) blobs[b].center[c] = 10.0 * rng.uniform();
    blobs[b].sigma = 0.08 + 0.04 * rng.uniform();
    blobs[b].count = n / blob_count;
    blobs[b].label = static_cast<int>(b);
  }
  for (std::size_t b = 0; b < n % blob_count; ++b) ++blobs[b].count;

  DataMatrix m = make_blobs(blobs, seed + 1);
  m.labels().clear();
  m.targets().resize(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto x = m.row(i);
    double v = 0.0, norm = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      v += std::sin(x[c]) * (1.0 + 0.1 * static_cast<double>(c));
      norm += x[c] * x[c];
    }
    m.targets()[i] = quantize(v + 0.5 * std::sqrt(norm) + 0.05 * rng.normal());
  }
  return m;
}

/// Uniform random points in [0,1]^d, the workhorse of the property tests.
inline DataMatrix make_uniform(std::size_t n, std::size_t d, std::uint32_t seed) {
  SyntheticRng rng(seed);
  DataMatrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto row = m.row(i);
    for (std::size_t c = 0; c < d; ++c) row[c] = rng.uniform();
  }
  return m;
}

inline void write_xy_label(const std::string& path, const DataMatrix& m) {
  if (m.cols() != 2 || !m.has_labels())
    throw std::invalid_argument("write_xy_label: need 2-D labeled data");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[128];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %d\n", m.at(i, 0), m.at(i, 1),
                  m.labels()[i]);
    out << buf;
  }
}

inline void write_csv(const std::string& path, const DataMatrix& m) {
  if (!m.has_targets())
    throw std::invalid_argument("write_csv: need a regressand column");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (std::size_t c = 0; c < m.cols(); ++c) out << "x" << (c + 1) << ",";
  out << "y\n";
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g,", m.at(i, c));
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", m.targets()[i]);
    out << buf;
  }
}

inline void write_libsvm(const std::string& path, const DataMatrix& m) {
  if (!m.has_targets())
    throw std::invalid_argument("write_libsvm: need a regressand column");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  char buf[64];
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", m.targets()[i]);
    out << buf;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, " %zu:%.17g", c + 1, m.at(i, c));
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace bfc
