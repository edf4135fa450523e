#include "coresel/knn.hpp"

#include <algorithm>
#include <string>

namespace coresel {

namespace {

KnnResult take_smallest(std::vector<Neighbor> all, std::size_t k) {
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    neighbor_less);
  all.resize(k);
  return KnnResult{std::move(all)};
}

void check_k(std::size_t k, std::size_t available) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be positive");
  if (k > available) {
    fail(ErrorCode::KTooLarge,
         "k=" + std::to_string(k) + " but only " + std::to_string(available) + " neighbors");
  }
}

}  // namespace

std::vector<std::size_t> KnnResult::indices() const {
  std::vector<std::size_t> out;
  out.reserve(neighbors.size());
  for (const auto& nb : neighbors) out.push_back(nb.index);
  return out;
}

KnnResult brute_force_knn(const MatrixView& set, std::size_t query_index, std::size_t k) {
  if (query_index >= set.rows()) fail(ErrorCode::InvalidArgument, "query index out of range");
  check_k(k, set.rows() - 1);
  const auto query = set.row(query_index);
  std::vector<Neighbor> all;
  all.reserve(set.rows() - 1);
  for (std::size_t i = 0; i < set.rows(); ++i) {
    if (i == query_index) continue;
    all.push_back({i, euclidean(query, set.row(i))});
  }
  return take_smallest(std::move(all), k);
}

KnnResult brute_force_knn(const MatrixView& set, std::span<const float> query, std::size_t k) {
  if (query.size() != set.cols()) fail(ErrorCode::DimensionMismatch, "query dimensionality");
  check_k(k, set.rows());
  std::vector<Neighbor> all;
  all.reserve(set.rows());
  for (std::size_t i = 0; i < set.rows(); ++i) all.push_back({i, euclidean(query, set.row(i))});
  return take_smallest(std::move(all), k);
}

KnnResult knn_within_subset(const MatrixView& set, std::span<const std::size_t> subset,
                            std::size_t query_index, std::size_t k) {
  std::vector<std::size_t> sorted(subset.begin(), subset.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(ErrorCode::InvalidArgument, "subset contains duplicate ids");
  }
  if (!sorted.empty() && sorted.back() >= set.rows()) {
    fail(ErrorCode::InvalidArgument, "subset id out of range");
  }
  if (!std::binary_search(sorted.begin(), sorted.end(), query_index)) {
    fail(ErrorCode::QueryNotInSubset, "item " + std::to_string(query_index));
  }
  check_k(k, subset.size() - 1);
  return detail::knn_within_subset_unchecked(set, subset, query_index, k);
}

namespace detail {

KnnResult knn_within_subset_unchecked(const MatrixView& set,
                                      std::span<const std::size_t> subset,
                                      std::size_t query_index, std::size_t k) {
  const auto query = set.row(query_index);
  std::vector<Neighbor> all;
  all.reserve(subset.size());
  for (std::size_t id : subset) {
    if (id == query_index) continue;
    all.push_back({id, euclidean(query, set.row(id))});
  }
  return take_smallest(std::move(all), k);
}

}  // namespace detail

}  // namespace coresel
