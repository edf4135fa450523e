#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coresel/core.hpp"
#include "coresel/hnsw.hpp"
#include "coresel/kmeans.hpp"
#include "coresel/partition.hpp"
#include "coresel/rng.hpp"

namespace coresel {

/// How whole-segment neighbor queries are answered.
///  - Hnsw: candidate neighborhoods come from an HNSW index over the segment;
///    density neighbors are found by an exact scan of the cluster's members.
///  - BruteForce: every neighbor query is an exhaustive scan of the segment.
///    Densities are identical to the Hnsw mode, only the cost differs.
enum class KnnBackend { Hnsw, BruteForce };

struct CssParams {
  std::size_t k = 10;
  double alpha = 0.5;
  double beta = 0.9;
  double lambda = 0.5;
  std::size_t T = 10;
  std::size_t h = 64;
  double epsilon = 1e-12;
  KnnBackend backend = KnnBackend::Hnsw;
  HnswParams hnsw;
  KMeansOptions kmeans;

  void validate() const;
  bool operator==(const CssParams&) const = default;
};

/// ln of the volume of the unit d-ball, (d/2) ln(pi) - lgamma(d/2 + 1).
double log_unit_ball_volume(std::size_t d);

/// ln rho = ln k - ln n - ln A_d - d ln(mean_distance). Throws
/// DegenerateDistance when mean_distance < epsilon.
double log_density_from_distance(double mean_distance, std::size_t k, std::size_t n_total,
                                 std::size_t d, double epsilon = 1e-12);

/// Log k-NN density of row `item` of `view`, using the mean distance to its
/// k nearest other rows.
double log_density(const MatrixView& view, std::size_t item, std::size_t k,
                   std::size_t n_total, double epsilon = 1e-12);

/// Mean distance from each member to its k nearest fellow members (k clipped
/// to |members| - 1). Singletons get +infinity.
std::vector<double> mean_knn_distances(const MatrixView& view,
                                       std::span<const std::size_t> members, std::size_t k);

/// Member with the smallest mean k-NN distance. Distances below epsilon count
/// as zero; ties go to the lower index.
std::size_t density_peak(std::span<const std::size_t> members, const MatrixView& view,
                         std::size_t k, double epsilon = 1e-12);

/// Sum over `others` of max(distance, epsilon)^(-alpha).
double diversity_phi(std::span<const float> candidate,
                     std::span<const std::span<const float>> others, double alpha,
                     double epsilon);

inline double ema_update(double prev, double current_phi, double beta) {
  return beta * prev + (1.0 - beta) * current_phi;
}

/// 1 / mean_distance - lambda * ema_phi. Throws DegenerateDistance when
/// mean_distance < epsilon.
double score_j(double mean_distance, double ema_phi, double lambda, double epsilon = 1e-12);

struct SelectionState {
  std::size_t t = 0;
  std::vector<std::size_t> selected;  // one item per cluster, segment-local
  std::vector<double> scores;         // J of each selected item
  std::vector<double> ema_phi;        // per segment item, 0 until first scored
};

/// Per-segment inputs shared by all refinement iterations.
class SegmentContext {
 public:
  SegmentContext(MatrixView view, const Clustering& clustering, const CssParams& params,
                 Seed seed);

  const MatrixView& view() const noexcept { return view_; }
  const CssParams& params() const noexcept { return params_; }
  std::size_t cluster_count() const noexcept { return members_.size(); }
  std::span<const std::size_t> members(std::size_t cluster) const { return members_[cluster]; }
  std::uint32_t cluster_of(std::size_t item) const { return assignments_[item]; }
  double mean_distance(std::size_t item) const { return mean_distance_[item]; }
  /// Effective candidate neighborhood size, min(h, length - 1).
  std::size_t effective_h() const noexcept { return h_; }

  /// The h nearest segment items of `item`, excluding itself.
  std::vector<std::size_t> candidate_neighbors(std::size_t item) const;

  /// J with degenerate (near-duplicate) mean distances ranked as +infinity.
  double score(std::size_t item, double ema_phi) const;

  /// Z(0): per-cluster density peaks, ema all zero.
  SelectionState initial_state() const;

 private:
  MatrixView view_;
  CssParams params_;
  std::vector<std::uint32_t> assignments_;
  std::vector<std::vector<std::size_t>> members_;
  std::vector<double> mean_distance_;
  std::size_t h_ = 0;
  std::optional<HnswIndex> index_;
};

/// One synchronous refinement round: every cluster reads only prev.selected.
SelectionState refine_selection(const SegmentContext& context, const SelectionState& prev);

struct TraceRecord {
  std::size_t segment = 0;
  std::size_t t = 0;
  std::vector<std::size_t> selected;  // global indices, cluster order
  std::vector<double> scores;
};

using TraceSink = std::function<void(const TraceRecord&)>;

struct SelectionResult {
  std::string sequence_id;
  std::size_t n = 0;
  std::size_t m = 0;
  std::vector<double> weights;
  PartitionPlan plan;
  std::vector<std::size_t> selected_indices;          // sorted, global
  std::vector<std::vector<std::size_t>> per_segment;  // sorted, global
  CssParams params;
  Seed seed;

  bool operator==(const SelectionResult&) const = default;
};

/// Seeds used for one segment; derived from (master, segment index) only.
Seed segment_seed(Seed master, std::size_t segment_index);
Seed kmeans_seed(Seed segment);
Seed hnsw_seed(Seed segment);

/// Selected items (segment-local, sorted) for one segment with `budget`
/// clusters.
std::vector<std::size_t> select_in_segment(const MatrixView& segment, std::size_t budget,
                                           const CssParams& params, Seed seed,
                                           const std::function<void(const SelectionState&)>&
                                               on_iteration = {});

SelectionResult css_select(const EmbeddingSet& set, std::size_t m, const RatioWeights& weights,
                           const CssParams& params, Seed seed, const TraceSink& trace = {});

}  // namespace coresel
