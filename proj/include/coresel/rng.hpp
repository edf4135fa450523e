#pragma once

#include <cstdint>

namespace coresel {

struct Seed {
  std::uint64_t value = 0;

  /// Child seed for an independent stream; derivation depends only on
  /// (parent, stream), never on how many values any other stream consumed.
  Seed derive(std::uint64_t stream) const;

  bool operator==(const Seed&) const = default;
};

/// Counter-based generator: output i is a SplitMix64 finalizer applied to
/// key + i * golden. Portable and bit-reproducible, unlike the std
/// distributions whose algorithms are implementation-defined.
class Rng {
 public:
  explicit Rng(Seed seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in the open interval (0, 1).
  double uniform_open();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  double normal();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace coresel
