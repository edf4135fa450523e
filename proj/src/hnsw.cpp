#include "coresel/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <queue>
#include <string>

#include "byte_io.hpp"

namespace coresel {

namespace {

constexpr char kSnapshotMagic[4] = {'H', 'N', 'S', 'W'};
constexpr std::uint32_t kSnapshotVersion = 1;

struct CloserFirst {
  template <typename C>
  bool operator()(const C& a, const C& b) const {
    return a.distance > b.distance || (a.distance == b.distance && a.id > b.id);
  }
};

struct FartherFirst {
  template <typename C>
  bool operator()(const C& a, const C& b) const {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
  }
};

}  // namespace

double HnswParams::level_norm_factor() const { return 1.0 / std::log(static_cast<double>(M)); }

void HnswParams::validate() const {
  if (M < 2) fail(ErrorCode::InvalidArgument, "HNSW M must be at least 2");
  if (ef_construction == 0 || ef_search == 0) {
    fail(ErrorCode::InvalidArgument, "HNSW ef parameters must be positive");
  }
}

HnswIndex HnswIndex::build(const MatrixView& set, const HnswParams& params, Seed seed) {
  params.validate();
  if (set.rows() == 0) fail(ErrorCode::InvalidArgument, "cannot build an index over no items");
  if (set.rows() > std::numeric_limits<std::uint32_t>::max()) {
    fail(ErrorCode::InvalidArgument, "too many items for a 32-bit id");
  }
  HnswIndex index;
  index.params_ = params;
  index.dim_ = set.cols();
  index.vectors_.assign(set.data().begin(), set.data().end());

  const std::size_t n = set.rows();
  const double norm = params.level_norm_factor();
  Rng rng(seed);
  index.levels_.resize(n);
  index.links_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int level = static_cast<int>(std::floor(-std::log(rng.uniform_open()) * norm));
    index.levels_[i] = level;
    index.links_[i].resize(static_cast<std::size_t>(level) + 1);
  }

  std::vector<std::uint32_t> visited(n, 0);
  std::uint32_t tag = 0;
  for (std::size_t i = 0; i < n; ++i) index.insert(static_cast<std::uint32_t>(i), visited, tag);
  return index;
}

double HnswIndex::distance_to(std::span<const float> query, std::uint32_t id) const {
  const float* v = vectors_.data() + static_cast<std::size_t>(id) * dim_;
  double sum = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double diff = static_cast<double>(query[j]) - static_cast<double>(v[j]);
    sum += diff * diff;
  }
  return sum;
}

std::vector<HnswIndex::Candidate> HnswIndex::search_layer(std::span<const float> query,
                                                          std::uint32_t entry, std::size_t ef,
                                                          int level,
                                                          std::vector<std::uint32_t>& visited,
                                                          std::uint32_t& visit_tag) const {
  if (++visit_tag == 0) {
    std::fill(visited.begin(), visited.end(), 0);
    visit_tag = 1;
  }
  std::priority_queue<Candidate, std::vector<Candidate>, CloserFirst> frontier;
  std::priority_queue<Candidate, std::vector<Candidate>, FartherFirst> best;

  const Candidate start{distance_to(query, entry), entry};
  frontier.push(start);
  best.push(start);
  visited[entry] = visit_tag;

  while (!frontier.empty()) {
    const Candidate current = frontier.top();
    if (best.size() >= ef && FartherFirst{}(best.top(), current)) break;
    frontier.pop();
    for (std::uint32_t nb : links_[current.id][static_cast<std::size_t>(level)]) {
      if (visited[nb] == visit_tag) continue;
      visited[nb] = visit_tag;
      const Candidate cand{distance_to(query, nb), nb};
      if (best.size() < ef || FartherFirst{}(cand, best.top())) {
        frontier.push(cand);
        best.push(cand);
        if (best.size() > ef) best.pop();
      }
    }
  }

  std::vector<Candidate> out(best.size());
  for (auto it = out.rbegin(); it != out.rend(); ++it) {
    *it = best.top();
    best.pop();
  }
  return out;
}

void HnswIndex::insert(std::uint32_t id, std::vector<std::uint32_t>& visited,
                       std::uint32_t& tag) {
  const int level = levels_[id];
  if (max_level_ < 0) {
    entry_point_ = id;
    max_level_ = level;
    return;
  }
  const std::span<const float> query(vectors_.data() + static_cast<std::size_t>(id) * dim_,
                                     dim_);
  auto current = static_cast<std::uint32_t>(entry_point_);
  for (int l = max_level_; l > level; --l) {
    current = search_layer(query, current, 1, l, visited, tag).front().id;
  }
  for (int l = std::min(level, max_level_); l >= 0; --l) {
    const auto found = search_layer(query, current, params_.ef_construction, l, visited, tag);
    const std::size_t keep = std::min(found.size(), params_.max_degree(static_cast<std::size_t>(l)));
    auto& own = links_[id][static_cast<std::size_t>(l)];
    own.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      const std::uint32_t nb = found[i].id;
      own.push_back(nb);
      links_[nb][static_cast<std::size_t>(l)].push_back(id);
      shrink(nb, l);
    }
    current = found.front().id;
  }
  if (level > max_level_) {
    entry_point_ = id;
    max_level_ = level;
  }
}

void HnswIndex::shrink(std::uint32_t id, int level) {
  auto& adjacency = links_[id][static_cast<std::size_t>(level)];
  const std::size_t cap = params_.max_degree(static_cast<std::size_t>(level));
  if (adjacency.size() <= cap) return;
  const std::span<const float> self(vectors_.data() + static_cast<std::size_t>(id) * dim_, dim_);
  std::vector<Candidate> scored;
  scored.reserve(adjacency.size());
  for (std::uint32_t nb : adjacency) scored.push_back({distance_to(self, nb), nb});
  std::sort(scored.begin(), scored.end(), [](const Candidate& a, const Candidate& b) {
    return FartherFirst{}(a, b);
  });
  adjacency.clear();
  for (std::size_t i = 0; i < cap; ++i) adjacency.push_back(scored[i].id);
}

KnnResult HnswIndex::search(std::span<const float> query, std::size_t k,
                            std::size_t ef_search) const {
  if (levels_.empty()) fail(ErrorCode::EmptyIndex, "search on an empty index");
  if (query.size() != dim_) {
    fail(ErrorCode::DimensionMismatch, "query has " + std::to_string(query.size()) +
                                           " dimensions, index has " + std::to_string(dim_));
  }
  if (k == 0) fail(ErrorCode::InvalidArgument, "k must be positive");
  if (ef_search < k) fail(ErrorCode::InvalidArgument, "ef_search must be at least k");

  std::vector<std::uint32_t> visited(levels_.size(), 0);
  std::uint32_t tag = 0;
  auto current = static_cast<std::uint32_t>(entry_point_);
  for (int l = max_level_; l > 0; --l) {
    current = search_layer(query, current, 1, l, visited, tag).front().id;
  }
  const auto found = search_layer(query, current, ef_search, 0, visited, tag);
  KnnResult result;
  const std::size_t take = std::min(k, found.size());
  result.neighbors.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    result.neighbors.push_back({found[i].id, std::sqrt(found[i].distance)});
  }
  return result;
}

KnnResult HnswIndex::search_item(std::size_t item, std::size_t k, std::size_t ef_search) const {
  if (item >= levels_.size()) fail(ErrorCode::InvalidArgument, "item out of range");
  const std::span<const float> query(vectors_.data() + item * dim_, dim_);
  const std::size_t want = std::min(k + 1, levels_.size());
  KnnResult raw = search(query, want, std::max(ef_search, want));
  KnnResult result;
  for (const auto& nb : raw.neighbors) {
    if (nb.index == item) continue;
    if (result.neighbors.size() == k) break;
    result.neighbors.push_back(nb);
  }
  return result;
}

std::span<const std::uint32_t> HnswIndex::neighbors(std::size_t item, int level) const {
  if (level < 0 || level > levels_[item]) return {};
  return links_[item][static_cast<std::size_t>(level)];
}

bool HnswIndex::same_structure(const HnswIndex& other) const {
  return params_ == other.params_ && dim_ == other.dim_ && levels_ == other.levels_ &&
         links_ == other.links_ && entry_point_ == other.entry_point_ &&
         max_level_ == other.max_level_;
}

void HnswIndex::save(const std::filesystem::path& path) const {
  std::vector<char> out(std::begin(kSnapshotMagic), std::end(kSnapshotMagic));
  detail::put_le<std::uint32_t>(out, kSnapshotVersion);
  detail::put_le<std::uint64_t>(out, params_.M);
  detail::put_le<std::uint64_t>(out, params_.ef_construction);
  detail::put_le<std::uint64_t>(out, params_.ef_search);
  detail::put_le<std::uint64_t>(out, levels_.size());
  detail::put_le<std::uint64_t>(out, dim_);
  detail::put_le<std::int32_t>(out, max_level_);
  detail::put_le<std::uint64_t>(out, entry_point_);
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    detail::put_le<std::int32_t>(out, levels_[i]);
    for (const auto& adjacency : links_[i]) {
      detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(adjacency.size()));
      for (std::uint32_t nb : adjacency) detail::put_le<std::uint32_t>(out, nb);
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) fail(ErrorCode::IoError, "write failed: " + path.string());
}

HnswIndex HnswIndex::load(const std::filesystem::path& path, const MatrixView& set) {
  std::ifstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::IoError, "cannot open " + path.string());
  const std::vector<char> bytes((std::istreambuf_iterator<char>(file)),
                                std::istreambuf_iterator<char>());
  detail::ByteReader in(bytes.data(), bytes.size(), path.string());
  char magic[4];
  in.get_bytes(magic, 4);
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kSnapshotMagic))) {
    fail(ErrorCode::BadMagic, path.string() + " is not an HNSW snapshot");
  }
  if (const auto version = in.get<std::uint32_t>(); version != kSnapshotVersion) {
    fail(ErrorCode::UnsupportedVersion, "snapshot version " + std::to_string(version));
  }
  HnswIndex index;
  index.params_.M = in.get<std::uint64_t>();
  index.params_.ef_construction = in.get<std::uint64_t>();
  index.params_.ef_search = in.get<std::uint64_t>();
  const auto n = in.get<std::uint64_t>();
  index.dim_ = in.get<std::uint64_t>();
  index.max_level_ = in.get<std::int32_t>();
  index.entry_point_ = in.get<std::uint64_t>();
  if (n != set.rows() || index.dim_ != set.cols()) {
    fail(ErrorCode::DimensionMismatch, "snapshot shape does not match the supplied vectors");
  }
  if (n == 0 || index.entry_point_ >= n) fail(ErrorCode::SchemaViolation, "bad entry point");
  index.levels_.resize(n);
  index.links_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto level = in.get<std::int32_t>();
    if (level < 0 || level > index.max_level_) {
      fail(ErrorCode::SchemaViolation, "node " + std::to_string(i) + " has invalid level");
    }
    index.levels_[i] = level;
    index.links_[i].resize(static_cast<std::size_t>(level) + 1);
    for (auto& adjacency : index.links_[i]) {
      const auto count = in.get<std::uint32_t>();
      adjacency.resize(count);
      for (auto& nb : adjacency) {
        nb = in.get<std::uint32_t>();
        if (nb >= n) fail(ErrorCode::SchemaViolation, "neighbor id out of range");
      }
    }
  }
  if (in.remaining() != 0) fail(ErrorCode::TrailingData, path.string());
  index.vectors_.assign(set.data().begin(), set.data().end());
  return index;
}

}  // namespace coresel
