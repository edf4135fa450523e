#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coresel/css.hpp"
#include "coresel/rng.hpp"

namespace coresel {

struct BenchConfig {
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::size_t reps = 3;
  std::size_t d = 64;
  std::size_t m = 32;
  std::size_t blobs = 32;
  double sigma = 0.05;
  std::vector<double> weights{0.25, 0.15, 0.6};
  CssParams params;
  Seed seed{0};
};

struct BenchPoint {
  std::size_t n = 0;
  std::vector<double> seconds;
  double median_seconds = 0.0;
  std::uint64_t selection_digest = 0;
};

struct BenchReport {
  std::string knn;
  std::vector<BenchPoint> points;
  double slope = 0.0;  // least-squares slope of log(median) on log(n)
  double timer_resolution_seconds = 0.0;
  bool timer_too_coarse = false;
};

/// Times css_select on synthetic blob data at each size. Single-threaded.
BenchReport run_bench(const BenchConfig& config);

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// FNV-1a over the selected indices, for cross-run comparison.
std::uint64_t selection_digest(const std::vector<std::size_t>& selected);

std::string bench_report_to_json(const BenchReport& report, const BenchConfig& config);

}  // namespace coresel
