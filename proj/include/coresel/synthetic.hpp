#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "coresel/core.hpp"
#include "coresel/rng.hpp"

namespace coresel {

enum class SyntheticMode { Blobs, Prototypes, UniformSphere };

struct SyntheticSpec {
  SyntheticMode mode = SyntheticMode::Blobs;
  std::size_t n = 100;
  std::size_t d = 16;
  std::size_t clusters = 4;  // blob or prototype count
  double sigma = 0.01;
  Seed seed;

  void validate() const;
};

struct SyntheticData {
  EmbeddingSet set;
  std::vector<std::size_t> labels;  // blob / prototype of each row
  EmbeddingSet centers;             // normalized the same way as the rows
};

/// Blobs and prototypes are laid out in contiguous label blocks.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

SyntheticMode parse_synthetic_mode(const std::string& name);
std::string to_string(SyntheticMode mode);

}  // namespace coresel
