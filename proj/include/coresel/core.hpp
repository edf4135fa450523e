#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coresel/error.hpp"

namespace coresel {

/// Non-owning row-major view over a float matrix. Rows are items.
class MatrixView {
 public:
  MatrixView() = default;
  MatrixView(std::span<const float> data, std::size_t rows, std::size_t cols)
      : data_(data), rows_(rows), cols_(cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const float> data() const noexcept { return data_; }

  std::span<const float> row(std::size_t i) const {
    return data_.subspan(i * cols_, cols_);
  }

  /// Contiguous rows [begin, end).
  MatrixView slice(std::size_t begin, std::size_t end) const {
    return MatrixView(data_.subspan(begin * cols_, (end - begin) * cols_),
                      end - begin, cols_);
  }

 private:
  std::span<const float> data_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
};

/// Dense row-major double matrix, used for centroids and other accumulated
/// quantities.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
};

/// An n x d matrix of unit-norm embeddings for one sequence. Immutable once
/// built; every row is re-normalized at construction.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;

  /// Builds a set from raw row-major values, normalizing each row to unit L2
  /// norm. Throws NonFiniteEntry / ZeroVectorRow with the offending row index.
  static EmbeddingSet from_rows(std::string id, std::size_t n, std::size_t d,
                                std::vector<float> values);

  const std::string& id() const noexcept { return id_; }
  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  std::span<const float> data() const noexcept { return data_; }
  std::span<const float> row(std::size_t i) const {
    return {data_.data() + i * d_, d_};
  }
  MatrixView view() const { return MatrixView(data_, n_, d_); }

  bool operator==(const EmbeddingSet&) const = default;

 private:
  std::string id_;
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<float> data_;
};

/// Segment proportions, stored normalized to sum to one.
class RatioWeights {
 public:
  explicit RatioWeights(std::vector<double> weights);

  static RatioWeights lung_default() { return RatioWeights({0.25, 0.15, 0.6}); }

  std::span<const double> values() const noexcept { return weights_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
};

std::vector<double> l2_normalize(std::span<const double> v);

// Distances accumulate in double regardless of storage precision.
double squared_euclidean(std::span<const float> a, std::span<const float> b);
double squared_euclidean(std::span<const double> a, std::span<const double> b);
double squared_euclidean(std::span<const float> a, std::span<const double> b);

double euclidean(std::span<const float> a, std::span<const float> b);
double euclidean(std::span<const double> a, std::span<const double> b);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace coresel
