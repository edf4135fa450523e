#include "coresel/css.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "coresel/knn.hpp"

namespace coresel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double effective_distance(double mean_distance, double epsilon) {
  return mean_distance < epsilon ? 0.0 : mean_distance;
}

double mean_of(const KnnResult& knn) {
  if (knn.neighbors.empty()) return kInf;
  double sum = 0.0;
  for (const auto& nb : knn.neighbors) sum += nb.distance;
  return sum / static_cast<double>(knn.neighbors.size());
}

// Lowest effective mean distance, ties to the lower index. `members` must be
// ascending.
std::size_t argmin_distance(std::span<const std::size_t> members,
                            std::span<const double> mean_distance, double epsilon) {
  std::size_t best = members.front();
  double best_dist = effective_distance(mean_distance[0], epsilon);
  for (std::size_t i = 1; i < members.size(); ++i) {
    const double dist = effective_distance(mean_distance[i], epsilon);
    if (dist < best_dist) {
      best_dist = dist;
      best = members[i];
    }
  }
  return best;
}

// Exhaustive scan over the whole segment, keeping only same-cluster rows.
KnnResult scan_segment_in_cluster(const MatrixView& view,
                                  std::span<const std::uint32_t> assignments,
                                  std::size_t item, std::size_t k) {
  const auto query = view.row(item);
  std::vector<Neighbor> all;
  for (std::size_t j = 0; j < view.rows(); ++j) {
    if (j == item) continue;
    const double dist = euclidean(query, view.row(j));
    if (assignments[j] == assignments[item]) all.push_back({j, dist});
  }
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(),
                    neighbor_less);
  all.resize(k);
  return KnnResult{std::move(all)};
}

}  // namespace

void CssParams::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorCode::InvalidArgument, what); };
  if (k < 1) bad("k must be at least 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) bad("alpha must be positive");
  if (!(beta > 0.0 && beta <= 1.0)) bad("beta must lie in (0, 1]");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) bad("lambda must be nonnegative");
  if (h < 1) bad("h must be at least 1");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) bad("epsilon must be positive");
  hnsw.validate();
}

double log_unit_ball_volume(std::size_t d) {
  const double half = static_cast<double>(d) / 2.0;
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

double log_density_from_distance(double mean_distance, std::size_t k, std::size_t n_total,
                                 std::size_t d, double epsilon) {
  if (!(mean_distance >= epsilon)) {
    fail(ErrorCode::DegenerateDistance, "mean k-NN distance below epsilon");
  }
  if (k == 0 || n_total == 0 || d == 0) {
    fail(ErrorCode::InvalidArgument, "log density needs positive k, n and d");
  }
  return std::log(static_cast<double>(k)) - std::log(static_cast<double>(n_total)) -
         log_unit_ball_volume(d) - static_cast<double>(d) * std::log(mean_distance);
}

double log_density(const MatrixView& view, std::size_t item, std::size_t k,
                   std::size_t n_total, double epsilon) {
  return log_density_from_distance(mean_of(brute_force_knn(view, item, k)), k, n_total,
                                   view.cols(), epsilon);
}

std::vector<double> mean_knn_distances(const MatrixView& view,
                                       std::span<const std::size_t> members, std::size_t k) {
  std::vector<double> out(members.size(), kInf);
  if (members.size() < 2) return out;
  const std::size_t kk = std::min(k, members.size() - 1);
  for (std::size_t i = 0; i < members.size(); ++i) {
    out[i] = mean_of(detail::knn_within_subset_unchecked(view, members, members[i], kk));
  }
  return out;
}

std::size_t density_peak(std::span<const std::size_t> members, const MatrixView& view,
                         std::size_t k, double epsilon) {
  if (members.empty()) fail(ErrorCode::InvalidArgument, "density peak of an empty cluster");
  std::vector<std::size_t> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  const auto dist = mean_knn_distances(view, sorted, k);
  return argmin_distance(sorted, dist, epsilon);
}

double diversity_phi(std::span<const float> candidate,
                     std::span<const std::span<const float>> others, double alpha,
                     double epsilon) {
  double sum = 0.0;
  for (const auto& other : others) {
    sum += std::pow(std::max(euclidean(candidate, other), epsilon), -alpha);
  }
  return sum;
}

double score_j(double mean_distance, double ema_phi, double lambda, double epsilon) {
  if (!(mean_distance >= epsilon)) {
    fail(ErrorCode::DegenerateDistance, "mean k-NN distance below epsilon");
  }
  return 1.0 / mean_distance - lambda * ema_phi;
}

SegmentContext::SegmentContext(MatrixView view, const Clustering& clustering,
                               const CssParams& params, Seed seed)
    : view_(view),
      params_(params),
      assignments_(clustering.assignments),
      members_(clustering.members()),
      mean_distance_(view.rows(), kInf),
      h_(std::min(params.h, view.rows() - 1)) {
  for (const auto& members : members_) {
    if (members.size() < 2) continue;
    const std::size_t kk = std::min(params_.k, members.size() - 1);
    for (std::size_t item : members) {
      const KnnResult knn =
          params_.backend == KnnBackend::BruteForce
              ? scan_segment_in_cluster(view_, assignments_, item, kk)
              : detail::knn_within_subset_unchecked(view_, members, item, kk);
      mean_distance_[item] = mean_of(knn);
    }
  }
  if (params_.backend == KnnBackend::Hnsw && params_.T > 0 && h_ > 0) {
    index_ = HnswIndex::build(view_, params_.hnsw, hnsw_seed(seed));
  }
}

std::vector<std::size_t> SegmentContext::candidate_neighbors(std::size_t item) const {
  if (h_ == 0) return {};
  if (index_) {
    return index_->search_item(item, h_, std::max(params_.hnsw.ef_search, h_ + 1)).indices();
  }
  return brute_force_knn(view_, item, h_).indices();
}

double SegmentContext::score(std::size_t item, double ema_phi) const {
  const double dist = mean_distance_[item];
  if (dist < params_.epsilon) return kInf;
  // Singletons have no neighbors; 1/inf contributes nothing.
  return 1.0 / dist - params_.lambda * ema_phi;
}

SelectionState SegmentContext::initial_state() const {
  SelectionState state;
  state.ema_phi.assign(view_.rows(), 0.0);
  for (const auto& members : members_) {
    std::vector<double> dist;
    dist.reserve(members.size());
    for (std::size_t item : members) dist.push_back(mean_distance_[item]);
    const std::size_t peak = argmin_distance(members, dist, params_.epsilon);
    state.selected.push_back(peak);
    state.scores.push_back(score(peak, 0.0));
  }
  return state;
}

SelectionState refine_selection(const SegmentContext& context, const SelectionState& prev) {
  const auto& params = context.params();
  const auto& view = context.view();
  const std::size_t m = context.cluster_count();

  SelectionState next;
  next.t = prev.t + 1;
  next.ema_phi = prev.ema_phi;
  next.selected.resize(m);
  next.scores.resize(m);

  std::vector<std::span<const float>> others;
  others.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t incumbent = prev.selected[j];
    others.clear();
    for (std::size_t l = 0; l < m; ++l) {
      if (l != j) others.push_back(view.row(prev.selected[l]));
    }

    std::vector<std::size_t> candidates{incumbent};
    for (std::size_t nb : context.candidate_neighbors(incumbent)) {
      if (context.cluster_of(nb) == j) candidates.push_back(nb);
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    // Highest J; ties to the smaller effective mean distance, then lower index.
    std::size_t best = 0;
    double best_score = -kInf;
    double best_dist = kInf;
    bool have_best = false;
    for (std::size_t c : candidates) {
      const double phi = diversity_phi(view.row(c), others, params.alpha, params.epsilon);
      const double ema = ema_update(prev.ema_phi[c], phi, params.beta);
      next.ema_phi[c] = ema;
      const double j_score = context.score(c, ema);
      const double dist = effective_distance(context.mean_distance(c), params.epsilon);
      if (!have_best || j_score > best_score || (j_score == best_score && dist < best_dist)) {
        best = c;
        best_score = j_score;
        best_dist = dist;
        have_best = true;
      }
    }
    next.selected[j] = best;
    next.scores[j] = best_score;
  }
  return next;
}

Seed segment_seed(Seed master, std::size_t segment_index) { return master.derive(segment_index); }
Seed kmeans_seed(Seed segment) { return segment.derive(0); }
Seed hnsw_seed(Seed segment) { return segment.derive(1); }

std::vector<std::size_t> select_in_segment(
    const MatrixView& segment, std::size_t budget, const CssParams& params, Seed seed,
    const std::function<void(const SelectionState&)>& on_iteration) {
  if (budget == 0) return {};
  const Clustering clustering =
      kmeans_fit(segment, budget, kmeans_seed(seed), params.kmeans);
  const SegmentContext context(segment, clustering, params, seed);
  SelectionState state = context.initial_state();
  if (on_iteration) on_iteration(state);
  for (std::size_t t = 1; t <= params.T; ++t) {
    state = refine_selection(context, state);
    if (on_iteration) on_iteration(state);
  }
  std::vector<std::size_t> selected = state.selected;
  std::sort(selected.begin(), selected.end());
  return selected;
}

SelectionResult css_select(const EmbeddingSet& set, std::size_t m, const RatioWeights& weights,
                           const CssParams& params, Seed seed, const TraceSink& trace) {
  params.validate();
  SelectionResult result;
  result.sequence_id = set.id();
  result.n = set.n();
  result.m = m;
  result.weights.assign(weights.values().begin(), weights.values().end());
  result.plan = make_partition_plan(set.n(), m, weights);
  result.params = params;
  result.seed = seed;

  const MatrixView view = set.view();
  for (std::size_t s = 0; s < result.plan.segments.size(); ++s) {
    const Segment& segment = result.plan.segments[s];
    std::function<void(const SelectionState&)> on_iteration;
    if (trace) {
      on_iteration = [&](const SelectionState& state) {
        TraceRecord record;
        record.segment = s;
        record.t = state.t;
        for (std::size_t item : state.selected) record.selected.push_back(item + segment.start);
        record.scores = state.scores;
        trace(record);
      };
    }
    auto local = select_in_segment(view.slice(segment.start, segment.end), segment.budget,
                                   params, segment_seed(seed, s), on_iteration);
    for (auto& item : local) item += segment.start;
    result.selected_indices.insert(result.selected_indices.end(), local.begin(), local.end());
    result.per_segment.push_back(std::move(local));
  }
  std::sort(result.selected_indices.begin(), result.selected_indices.end());
  return result;
}

}  // namespace coresel
