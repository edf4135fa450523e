#include "coresel/core.hpp"

#include <numeric>

namespace coresel {

namespace {

constexpr double kZeroNorm = 1e-12;

template <typename A, typename B>
double squared_distance_impl(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::DimensionMismatch,
         "dimensions " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += diff * diff;
  }
  return sum;
}

}  // namespace

EmbeddingSet EmbeddingSet::from_rows(std::string id, std::size_t n, std::size_t d,
                                     std::vector<float> values) {
  if (n == 0 || d == 0) {
    fail(ErrorCode::InvalidArgument, "embedding set needs n >= 1 and d >= 1");
  }
  if (values.size() != n * d) {
    fail(ErrorCode::DimensionMismatch, "expected " + std::to_string(n * d) + " values, got " +
                                           std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    float* row = values.data() + i * d;
    double norm_sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(row[j])) {
        fail(ErrorCode::NonFiniteEntry, "row " + std::to_string(i) + " column " +
                                            std::to_string(j));
      }
      norm_sq += static_cast<double>(row[j]) * static_cast<double>(row[j]);
    }
    const double norm = std::sqrt(norm_sq);
    if (norm < kZeroNorm) {
      fail(ErrorCode::ZeroVectorRow, "row " + std::to_string(i));
    }
    for (std::size_t j = 0; j < d; ++j) {
      row[j] = static_cast<float>(static_cast<double>(row[j]) / norm);
    }
  }
  EmbeddingSet set;
  set.id_ = std::move(id);
  set.n_ = n;
  set.d_ = d;
  set.data_ = std::move(values);
  return set;
}

RatioWeights::RatioWeights(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) {
    fail(ErrorCode::InvalidArgument, "ratio weights must not be empty");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      fail(ErrorCode::InvalidArgument, "ratio weights must be positive and finite");
    }
    total += w;
  }
  for (double& w : weights_) w /= total;
}

std::vector<double> l2_normalize(std::span<const double> v) {
  const double norm = std::sqrt(dot(v, v));
  if (!(norm >= kZeroNorm)) {
    fail(ErrorCode::ZeroVector, "cannot normalize a vector with norm below 1e-12");
  }
  std::vector<double> out(v.begin(), v.end());
  for (double& x : out) x /= norm;
  return out;
}

double squared_euclidean(std::span<const float> a, std::span<const float> b) {
  return squared_distance_impl(a, b);
}
double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  return squared_distance_impl(a, b);
}
double squared_euclidean(std::span<const float> a, std::span<const double> b) {
  return squared_distance_impl(a, b);
}

double euclidean(std::span<const float> a, std::span<const float> b) {
  return std::sqrt(squared_euclidean(a, b));
}
double euclidean(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_euclidean(a, b));
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::DimensionMismatch, "dot product of mismatched vectors");
  }
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace coresel
