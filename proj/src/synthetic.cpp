#include "coresel/synthetic.hpp"

#include <cmath>

#include "coresel/error.hpp"

namespace coresel {

namespace {

std::vector<double> random_unit_vector(std::size_t d, Rng& rng) {
  for (;;) {
    std::vector<double> v(d);
    double norm_sq = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm_sq += x * x;
    }
    if (norm_sq > 1e-24) {
      const double norm = std::sqrt(norm_sq);
      for (double& x : v) x /= norm;
      return v;
    }
  }
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n == 0 || d == 0) fail(ErrorCode::InvalidArgument, "synthetic n and d must be positive");
  if (clusters == 0) fail(ErrorCode::InvalidArgument, "cluster count must be positive");
  if (mode != SyntheticMode::UniformSphere && clusters > n) {
    fail(ErrorCode::InvalidArgument, "more clusters than items");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    fail(ErrorCode::InvalidArgument, "sigma must be finite and nonnegative");
  }
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t d = spec.d;
  Rng center_rng(spec.seed.derive(0));
  Rng noise_rng(spec.seed.derive(1));

  SyntheticData out;
  out.labels.resize(n, 0);
  std::vector<float> values(n * d);

  if (spec.mode == SyntheticMode::UniformSphere) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = random_unit_vector(d, noise_rng);
      for (std::size_t j = 0; j < d; ++j) values[i * d + j] = static_cast<float>(v[j]);
    }
    out.set = EmbeddingSet::from_rows("synthetic-" + to_string(spec.mode), n, d,
                                      std::move(values));
    return out;
  }

  const std::size_t c = spec.clusters;
  std::vector<std::vector<double>> centers;
  std::vector<float> center_values(c * d);
  for (std::size_t j = 0; j < c; ++j) {
    centers.push_back(random_unit_vector(d, center_rng));
    for (std::size_t t = 0; t < d; ++t) center_values[j * d + t] = static_cast<float>(centers[j][t]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i * c / n;
    out.labels[i] = label;
    for (std::size_t t = 0; t < d; ++t) {
      double x = centers[label][t];
      if (spec.mode == SyntheticMode::Blobs && spec.sigma > 0.0) x += spec.sigma * noise_rng.normal();
      values[i * d + t] = static_cast<float>(x);
    }
  }
  out.set = EmbeddingSet::from_rows("synthetic-" + to_string(spec.mode), n, d, std::move(values));
  out.centers = EmbeddingSet::from_rows("centers", c, d, std::move(center_values));
  return out;
}

SyntheticMode parse_synthetic_mode(const std::string& name) {
  if (name == "blobs") return SyntheticMode::Blobs;
  if (name == "prototypes") return SyntheticMode::Prototypes;
  if (name == "uniform-sphere" || name == "uniform") return SyntheticMode::UniformSphere;
  fail(ErrorCode::InvalidArgument, "unknown synthetic mode '" + name + "'");
}

std::string to_string(SyntheticMode mode) {
  switch (mode) {
    case SyntheticMode::Blobs: return "blobs";
    case SyntheticMode::Prototypes: return "prototypes";
    case SyntheticMode::UniformSphere: return "uniform-sphere";
  }
  return "unknown";
}

}  // namespace coresel
