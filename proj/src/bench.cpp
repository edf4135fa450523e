#include "coresel/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "coresel/synthetic.hpp"

namespace coresel {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double measure_timer_resolution() {
  double best = 1.0;
  for (int i = 0; i < 16; ++i) {
    const auto start = Clock::now();
    auto now = Clock::now();
    while (now == start) now = Clock::now();
    best = std::min(best, std::chrono::duration<double>(now - start).count());
  }
  return best;
}

}  // namespace

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return 0.0;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

std::uint64_t selection_digest(const std::vector<std::size_t>& selected) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (std::size_t v : selected) {
    for (int b = 0; b < 8; ++b) {
      h ^= (static_cast<std::uint64_t>(v) >> (8 * b)) & 0xFF;
      h *= 0x100000001B3ULL;
    }
  }
  return h;
}

BenchReport run_bench(const BenchConfig& config) {
  config.params.validate();
  BenchReport report;
  report.knn = config.params.backend == KnnBackend::Hnsw ? "hnsw" : "brute";
  report.timer_resolution_seconds = measure_timer_resolution();
  const RatioWeights weights(config.weights);
  const std::size_t reps = std::max<std::size_t>(config.reps, 1);

  for (std::size_t si = 0; si < config.sizes.size(); ++si) {
    SyntheticSpec spec;
    spec.mode = SyntheticMode::Blobs;
    spec.n = config.sizes[si];
    spec.d = config.d;
    spec.clusters = std::min(config.blobs, spec.n);
    spec.sigma = config.sigma;
    spec.seed = config.seed.derive(si);
    const SyntheticData data = generate_synthetic(spec);

    BenchPoint point;
    point.n = spec.n;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto start = Clock::now();
      const SelectionResult result = css_select(data.set, config.m, weights, config.params,
                                                config.seed);
      const auto stop = Clock::now();
      point.seconds.push_back(std::chrono::duration<double>(stop - start).count());
      point.selection_digest = selection_digest(result.selected_indices);
    }
    point.median_seconds = median(point.seconds);
    if (point.median_seconds < 100.0 * report.timer_resolution_seconds) {
      report.timer_too_coarse = true;
    }
    report.points.push_back(std::move(point));
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : report.points) {
    xs.push_back(static_cast<double>(p.n));
    ys.push_back(std::max(p.median_seconds, 1e-12));
  }
  report.slope = log_log_slope(xs, ys);
  return report;
}

std::string bench_report_to_json(const BenchReport& report, const BenchConfig& config) {
  using nlohmann::json;
  json points = json::array();
  for (const auto& p : report.points) {
    points.push_back({{"n", p.n},
                      {"seconds", p.seconds},
                      {"median_seconds", p.median_seconds},
                      {"selection_digest", p.selection_digest}});
  }
  const json j{{"knn", report.knn},
               {"d", config.d},
               {"m", config.m},
               {"reps", config.reps},
               {"seed", config.seed.value},
               {"points", points},
               {"slope", report.slope},
               {"timer_resolution_seconds", report.timer_resolution_seconds},
               {"timer_too_coarse", report.timer_too_coarse}};
  return j.dump(2) + "\n";
}

}  // namespace coresel
