#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "coresel/core.hpp"

namespace coresel {

struct Neighbor {
  std::size_t index = 0;
  double distance = 0.0;

  bool operator==(const Neighbor&) const = default;
};

/// Orders by distance, then by lower item index.
inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
}

struct KnnResult {
  std::vector<Neighbor> neighbors;  // ascending by (distance, index)

  std::size_t size() const noexcept { return neighbors.size(); }
  std::vector<std::size_t> indices() const;
};

/// Exact k nearest rows of `set` to row `query_index`, excluding the query.
KnnResult brute_force_knn(const MatrixView& set, std::size_t query_index, std::size_t k);

/// Exact k nearest rows of `set` to an external vector.
KnnResult brute_force_knn(const MatrixView& set, std::span<const float> query, std::size_t k);

/// Exact k-NN of `query_index` restricted to the rows listed in `subset`.
/// Throws QueryNotInSubset, KTooLarge, or InvalidArgument on duplicate ids.
KnnResult knn_within_subset(const MatrixView& set, std::span<const std::size_t> subset,
                            std::size_t query_index, std::size_t k);

namespace detail {
// Same as knn_within_subset without precondition checks; the caller
// guarantees distinct ids and that query_index is a member.
KnnResult knn_within_subset_unchecked(const MatrixView& set,
                                      std::span<const std::size_t> subset,
                                      std::size_t query_index, std::size_t k);
}  // namespace detail

}  // namespace coresel
