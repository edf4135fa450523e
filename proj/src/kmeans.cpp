#include "coresel/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace coresel {

namespace {

template <typename T>
std::size_t nearest_centroid(const DenseMatrix& centroids, std::span<const T> v) {
  if (centroids.rows == 0) fail(ErrorCode::InvalidArgument, "no centroids");
  if (v.size() != centroids.cols) fail(ErrorCode::DimensionMismatch, "vector vs centroids");
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < centroids.rows; ++j) {
    const auto c = centroids.row(j);
    double dist = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double diff = static_cast<double>(v[i]) - c[i];
      dist += diff * diff;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = j;
    }
  }
  return best;
}

void copy_row(const MatrixView& items, std::size_t item, std::span<double> dst) {
  const auto src = items.row(item);
  std::copy(src.begin(), src.end(), dst.begin());
}

DenseMatrix init_random_items(const MatrixView& items, std::size_t m, Rng& rng) {
  // Partial Fisher-Yates: first m slots become a uniform sample without
  // replacement.
  std::vector<std::size_t> order(items.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  DenseMatrix centroids(m, items.cols());
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t pick = j + rng.below(order.size() - j);
    std::swap(order[j], order[pick]);
    copy_row(items, order[j], centroids.row(j));
  }
  return centroids;
}

DenseMatrix init_plus_plus(const MatrixView& items, std::size_t m, Rng& rng) {
  const std::size_t n = items.rows();
  DenseMatrix centroids(m, items.cols());
  copy_row(items, rng.below(n), centroids.row(0));
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (std::size_t j = 1; j < m; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_euclidean(items.row(i), centroids.row(j - 1)));
      total += d2[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (std::size_t i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    copy_row(items, pick, centroids.row(j));
  }
  return centroids;
}

// Moves the farthest member of the largest cluster into each empty cluster.
void repair_empty(const MatrixView& items, std::vector<std::uint32_t>& assignments,
                  const DenseMatrix& centroids, std::size_t m) {
  std::vector<std::size_t> sizes(m, 0);
  for (auto a : assignments) ++sizes[a];
  for (std::size_t empty = 0; empty < m; ++empty) {
    if (sizes[empty] != 0) continue;
    const auto largest = static_cast<std::uint32_t>(
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::size_t far_item = 0;
    double far_dist = -1.0;
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      if (assignments[i] != largest) continue;
      const double dist = squared_euclidean(items.row(i), centroids.row(largest));
      if (dist > far_dist) {
        far_dist = dist;
        far_item = i;
      }
    }
    assignments[far_item] = static_cast<std::uint32_t>(empty);
    --sizes[largest];
    ++sizes[empty];
  }
}

// Fixed-order summation, so the result does not depend on how the E-step was
// scheduled.
DenseMatrix update_centroids(const MatrixView& items,
                             std::span<const std::uint32_t> assignments, std::size_t m) {
  DenseMatrix sums(m, items.cols());
  std::vector<std::size_t> counts(m, 0);
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    auto dst = sums.row(assignments[i]);
    const auto src = items.row(i);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += static_cast<double>(src[c]);
    ++counts[assignments[i]];
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (double& x : sums.row(j)) x /= static_cast<double>(counts[j]);
  }
  return sums;
}

}  // namespace

std::vector<std::vector<std::size_t>> Clustering::members() const {
  std::vector<std::vector<std::size_t>> out(m);
  for (std::size_t i = 0; i < assignments.size(); ++i) out[assignments[i]].push_back(i);
  return out;
}

std::size_t assign_to_nearest(const DenseMatrix& centroids, std::span<const float> v) {
  return nearest_centroid(centroids, v);
}

std::size_t assign_to_nearest(const DenseMatrix& centroids, std::span<const double> v) {
  return nearest_centroid(centroids, v);
}

double compute_wcss(const MatrixView& items, std::span<const std::uint32_t> assignments,
                    const DenseMatrix& centroids) {
  double total = 0.0;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    total += squared_euclidean(items.row(i), centroids.row(assignments[i]));
  }
  return total;
}

Clustering kmeans_fit(const MatrixView& items, std::size_t m, Seed seed,
                      const KMeansOptions& options) {
  const std::size_t n = items.rows();
  if (m == 0) fail(ErrorCode::InvalidArgument, "cluster count must be positive");
  if (m > n) {
    fail(ErrorCode::BudgetExceedsItems,
         "m=" + std::to_string(m) + " exceeds " + std::to_string(n) + " items");
  }
  Rng rng(seed);
  DenseMatrix centroids = options.init == KMeansInit::PlusPlus
                              ? init_plus_plus(items, m, rng)
                              : init_random_items(items, m, rng);

  Clustering result;
  result.m = m;
  std::vector<std::uint32_t> assignments(n, 0);
  std::vector<std::uint32_t> previous;
  const std::size_t max_iter = std::max<std::size_t>(options.max_iter, 1);
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      assignments[i] = static_cast<std::uint32_t>(nearest_centroid(centroids, items.row(i)));
    }
    repair_empty(items, assignments, centroids, m);
    centroids = update_centroids(items, assignments, m);
    const double wcss = compute_wcss(items, assignments, centroids);
    result.iterations_run = iter;

    const bool unchanged = assignments == previous;
    const bool small_gain =
        !result.wcss_history.empty() && result.wcss_history.back() - wcss < options.tol;
    result.wcss_history.push_back(wcss);
    if (unchanged || small_gain) break;
    previous = assignments;
  }
  result.assignments = std::move(assignments);
  result.centroids = std::move(centroids);
  result.wcss = result.wcss_history.back();
  return result;
}

}  // namespace coresel
