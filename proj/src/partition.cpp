#include "coresel/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace coresel {

std::size_t PartitionPlan::total_budget() const {
  std::size_t total = 0;
  for (const auto& s : segments) total += s.budget;
  return total;
}

std::vector<std::size_t> apportion_largest_remainder(std::size_t total,
                                                     const RatioWeights& weights) {
  const std::size_t parts = weights.size();
  std::vector<std::size_t> shares(parts);
  std::vector<double> remainders(parts);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < parts; ++i) {
    double exact = static_cast<double>(total) * weights[i];
    // Snap values that are integral up to weight-normalization rounding.
    if (const double r = std::round(exact); std::abs(exact - r) < 1e-9) exact = r;
    shares[i] = static_cast<std::size_t>(std::floor(exact));
    remainders[i] = exact - static_cast<double>(shares[i]);
    assigned += shares[i];
  }
  // Normalized weights can sum to 1 +- ulp, so the floors may overshoot by one.
  while (assigned > total) {
    const auto it = std::max_element(shares.begin(), shares.end());
    --*it;
    --assigned;
  }
  std::vector<std::size_t> order(parts);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainders[a] > remainders[b];
  });
  for (std::size_t i = 0; assigned < total; i = (i + 1) % parts) {
    ++shares[order[i]];
    ++assigned;
  }
  return shares;
}

PartitionPlan make_partition_plan(std::size_t n, std::size_t m, const RatioWeights& weights) {
  if (m == 0) fail(ErrorCode::InvalidArgument, "budget m must be positive");
  if (m > n) {
    fail(ErrorCode::BudgetExceedsItems,
         "m=" + std::to_string(m) + " exceeds n=" + std::to_string(n));
  }
  const auto lengths = apportion_largest_remainder(n, weights);
  auto budgets = apportion_largest_remainder(m, weights);

  std::size_t excess = 0;
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (budgets[i] > lengths[i]) {
      excess += budgets[i] - lengths[i];
      budgets[i] = lengths[i];
    }
  }
  while (excess > 0) {
    std::size_t target = 0;
    std::size_t spare = 0;
    for (std::size_t i = 0; i < budgets.size(); ++i) {
      if (lengths[i] - budgets[i] > spare) {
        spare = lengths[i] - budgets[i];
        target = i;
      }
    }
    // m <= n guarantees spare capacity exists somewhere.
    ++budgets[target];
    --excess;
  }

  PartitionPlan plan;
  std::size_t start = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    plan.segments.push_back({start, start + lengths[i], budgets[i]});
    start += lengths[i];
  }
  return plan;
}

}  // namespace coresel
