#pragma once

#include <cstddef>
#include <vector>

#include "coresel/core.hpp"

namespace coresel {

struct Segment {
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::size_t budget = 0;

  std::size_t length() const noexcept { return end - start; }
  bool operator==(const Segment&) const = default;
};

struct PartitionPlan {
  std::vector<Segment> segments;

  std::size_t total_budget() const;
  bool operator==(const PartitionPlan&) const = default;
};

/// Largest-remainder apportionment of `total` over `weights`: floors first,
/// leftover units to the largest fractional remainders (ties to lower index).
std::vector<std::size_t> apportion_largest_remainder(std::size_t total,
                                                     const RatioWeights& weights);

/// Contiguous segments sized by apportioning n, budgets by apportioning m.
/// Budgets above a segment's length are clamped and the excess handed one
/// unit at a time to the segment with the most spare capacity.
PartitionPlan make_partition_plan(std::size_t n, std::size_t m, const RatioWeights& weights);

}  // namespace coresel
