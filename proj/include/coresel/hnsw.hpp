#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "coresel/core.hpp"
#include "coresel/knn.hpp"
#include "coresel/rng.hpp"

namespace coresel {

struct HnswParams {
  std::size_t M = 16;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 100;

  std::size_t max_degree(std::size_t level) const { return level == 0 ? 2 * M : M; }
  double level_norm_factor() const;
  void validate() const;

  bool operator==(const HnswParams&) const = default;
};

/// Hierarchical navigable small-world graph over a fixed set of vectors.
///
/// Build is batch-only and single-writer: items are inserted in index order,
/// each with a level drawn as floor(-ln(u) / ln(M)). Neighbor lists keep the
/// closest candidates (ties to the lower index) and are pruned the same way
/// when a reverse edge overflows. A built index is immutable; search() keeps
/// all scratch state local, so concurrent searches are safe.
class HnswIndex {
 public:
  HnswIndex() = default;

  static HnswIndex build(const MatrixView& set, const HnswParams& params, Seed seed);

  /// k approximate nearest stored items to `query`. Requires ef_search >= k.
  KnnResult search(std::span<const float> query, std::size_t k, std::size_t ef_search) const;

  /// k approximate nearest neighbors of stored item `item`, excluding itself.
  KnnResult search_item(std::size_t item, std::size_t k, std::size_t ef_search) const;

  std::size_t size() const noexcept { return levels_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  int max_level() const noexcept { return max_level_; }
  std::size_t entry_point() const noexcept { return entry_point_; }
  const HnswParams& params() const noexcept { return params_; }
  int level_of(std::size_t item) const { return levels_[item]; }
  /// Adjacency of `item` at `level`; empty if the item is absent there.
  std::span<const std::uint32_t> neighbors(std::size_t item, int level) const;

  /// Graph-only snapshot: "HNSW" magic, u32 version, parameters and
  /// adjacency lists, little-endian. Vectors are not stored.
  void save(const std::filesystem::path& path) const;
  /// Restores a snapshot and attaches it to the vectors it was built from.
  static HnswIndex load(const std::filesystem::path& path, const MatrixView& set);

  bool same_structure(const HnswIndex& other) const;

 private:
  struct Candidate {
    double distance;
    std::uint32_t id;
  };

  double distance_to(std::span<const float> query, std::uint32_t id) const;
  std::vector<Candidate> search_layer(std::span<const float> query, std::uint32_t entry,
                                      std::size_t ef, int level,
                                      std::vector<std::uint32_t>& visited,
                                      std::uint32_t& visit_tag) const;
  void insert(std::uint32_t id, std::vector<std::uint32_t>& visited, std::uint32_t& tag);
  void shrink(std::uint32_t id, int level);

  HnswParams params_;
  std::size_t dim_ = 0;
  std::vector<float> vectors_;
  std::vector<int> levels_;
  // links_[id][level] is the adjacency of id at that level.
  std::vector<std::vector<std::vector<std::uint32_t>>> links_;
  std::size_t entry_point_ = 0;
  int max_level_ = -1;
};

}  // namespace coresel
