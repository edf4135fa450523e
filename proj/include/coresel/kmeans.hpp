#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "coresel/core.hpp"
#include "coresel/rng.hpp"

namespace coresel {

enum class KMeansInit { RandomItems, PlusPlus };

struct KMeansOptions {
  std::size_t max_iter = 100;
  double tol = 1e-6;  // absolute WCSS improvement
  KMeansInit init = KMeansInit::RandomItems;

  bool operator==(const KMeansOptions&) const = default;
};

struct Clustering {
  std::size_t m = 0;
  std::vector<std::uint32_t> assignments;
  DenseMatrix centroids;
  double wcss = 0.0;
  std::size_t iterations_run = 0;
  // WCSS after each EM iteration, in order.
  std::vector<double> wcss_history;

  /// Member row indices of each cluster, ascending.
  std::vector<std::vector<std::size_t>> members() const;
};

/// Lloyd's algorithm. Stops when assignments repeat, when the WCSS gain drops
/// below tol, or at max_iter. Empty clusters are reseeded from the largest
/// cluster's farthest member, so every cluster ends nonempty.
Clustering kmeans_fit(const MatrixView& items, std::size_t m, Seed seed,
                      const KMeansOptions& options = {});

/// Index of the nearest centroid; ties go to the lower id.
std::size_t assign_to_nearest(const DenseMatrix& centroids, std::span<const float> v);
std::size_t assign_to_nearest(const DenseMatrix& centroids, std::span<const double> v);

/// Sum of squared distances from each item to the centroid of its cluster.
double compute_wcss(const MatrixView& items, std::span<const std::uint32_t> assignments,
                    const DenseMatrix& centroids);

}  // namespace coresel
