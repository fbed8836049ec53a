#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace bfc {

/// Dense row-major matrix of samples with optional per-row regressand and
/// integer label columns. This is the unit of ingestion and reordering.
class DataMatrix {
public:
  DataMatrix() = default;
  DataMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {values_.data() + i * cols_, cols_};
  }

  double at(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
  double& at(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

  const std::vector<double>& values() const { return values_; }

  bool has_targets() const { return !targets_.empty(); }
  std::vector<double>& targets() { return targets_; }
  const std::vector<double>& targets() const { return targets_; }

  bool has_labels() const { return !labels_.empty(); }
  std::vector<int>& labels() { return labels_; }
  const std::vector<int>& labels() const { return labels_; }

  void append_row(std::span<const double> coords) {
    if (rows_ == 0 && cols_ == 0) cols_ = coords.size();
    if (coords.size() != cols_)
      throw std::invalid_argument("DataMatrix::append_row: ragged row");
    values_.insert(values_.end(), coords.begin(), coords.end());
    ++rows_;
  }

  /// Returns a copy with row i taken from row order[i] of this matrix.
  /// Targets and labels follow the same permutation.
  DataMatrix permuted(std::span<const std::uint32_t> order) const {
    if (order.size() != rows_)
      throw std::invalid_argument("DataMatrix::permuted: order size mismatch");
    DataMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      const auto src = row(order[i]);
      auto dst = out.row(i);
      for (std::size_t c = 0; c < cols_; ++c) dst[c] = src[c];
    }
    if (has_targets()) {
      out.targets_.resize(rows_);
      for (std::size_t i = 0; i < rows_; ++i) out.targets_[i] = targets_[order[i]];
    }
    if (has_labels()) {
      out.labels_.resize(rows_);
      for (std::size_t i = 0; i < rows_; ++i) out.labels_[i] = labels_[order[i]];
    }
    return out;
  }

  /// True when every value (and regressand) is finite.
  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    for (double v : targets_)
      if (!std::isfinite(v)) return false;
    return true;
  }

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<double> targets_;
  std::vector<int> labels_;
};

/// Per-feature z-score transform. Features with zero variance are left
/// centered only.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  bool fitted() const { return !mean.empty(); }

  void fit(const DataMatrix& m) {
    const std::size_t d = m.cols();
    mean.assign(d, 0.0);
    scale.assign(d, 1.0);
    if (m.rows() == 0) return;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto r = m.row(i);
      for (std::size_t c = 0; c < d; ++c) mean[c] += r[c];
    }
    for (std::size_t c = 0; c < d; ++c) mean[c] /= static_cast<double>(m.rows());
    std::vector<double> var(d, 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
      const auto r = m.row(i);
      for (std::size_t c = 0; c < d; ++c) {
        const double dv = r[c] - mean[c];
        var[c] += dv * dv;
      }
    }
    for (std::size_t c = 0; c < d; ++c) {
      const double s = std::sqrt(var[c] / static_cast<double>(m.rows()));
      scale[c] = s > 0.0 ? s : 1.0;
    }
  }

  void apply(DataMatrix& m) const {
    if (m.cols() != mean.size())
      throw std::invalid_argument("Standardizer::apply: dimension mismatch");
    for (std::size_t i = 0; i < m.rows(); ++i) {
      auto r = m.row(i);
      for (std::size_t c = 0; c < r.size(); ++c) r[c] = (r[c] - mean[c]) / scale[c];
    }
  }

  void apply(std::span<double> x) const {
    if (x.size() != mean.size())
      throw std::invalid_argument("Standardizer::apply: dimension mismatch");
    for (std::size_t c = 0; c < x.size(); ++c) x[c] = (x[c] - mean[c]) / scale[c];
  }
};

}  // namespace bfc
