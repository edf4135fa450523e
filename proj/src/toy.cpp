#include "coresel/toy.hpp"

#include <algorithm>
#include <cmath>

#include "coresel/error.hpp"
#include "coresel/huq.hpp"

namespace coresel::huq {

namespace {

using Probs = std::array<double, kToyClasses>;

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double log_sum_exp(const Probs& z) {
  const double hi = std::max(z[0], z[1]);
  return hi + std::log(std::exp(z[0] - hi) + std::exp(z[1] - hi));
}

double cross_entropy(const LinearClassifier& c, Point2 x, int label) {
  const Probs z = c.logits(x);
  return log_sum_exp(z) - z[static_cast<std::size_t>(label)];
}

double pair_discrepancy(const Probs& p, const Probs& p1, const Probs& p2) {
  double sum = 0.0;
  for (std::size_t c = 0; c < kToyClasses; ++c) {
    sum += std::abs(p1[c] - p[c]) + std::abs(p2[c] - p[c]) + std::abs(p1[c] - p2[c]);
  }
  return sum / static_cast<double>(kToyClasses);
}

void accumulate(LinearClassifier& grad, const Probs& dz, Point2 x) {
  for (std::size_t c = 0; c < kToyClasses; ++c) {
    grad.w[c * kToyDim + 0] += dz[c] * x.x;
    grad.w[c * kToyDim + 1] += dz[c] * x.y;
    grad.b[c] += dz[c];
  }
}

void scale(LinearClassifier& c, double factor) {
  for (std::size_t i = 0; i < LinearClassifier::kParamCount; ++i) c.param(i) *= factor;
}

void step(LinearClassifier& c, const LinearClassifier& grad, double lr) {
  for (std::size_t i = 0; i < LinearClassifier::kParamCount; ++i) {
    c.param(i) -= lr * grad.param(i);
  }
}

// d(CE - use * d_dis)/dz for one auxiliary head; `other` is its sibling.
Probs auxiliary_logit_grad(const Probs& own, const Probs& other, const Probs& main, int label,
                           bool use_discrepancy) {
  Probs dz{};
  for (std::size_t c = 0; c < kToyClasses; ++c) {
    dz[c] = own[c] - (static_cast<int>(c) == label ? 1.0 : 0.0);
  }
  if (!use_discrepancy) return dz;
  Probs s{};
  double s_dot_p = 0.0;
  for (std::size_t c = 0; c < kToyClasses; ++c) {
    s[c] = (sign(own[c] - main[c]) + sign(own[c] - other[c])) / static_cast<double>(kToyClasses);
    s_dot_p += s[c] * own[c];
  }
  for (std::size_t c = 0; c < kToyClasses; ++c) dz[c] -= own[c] * (s[c] - s_dot_p);
  return dz;
}

}  // namespace

std::array<double, kToyClasses> LinearClassifier::logits(Point2 x) const {
  Probs z{};
  for (std::size_t c = 0; c < kToyClasses; ++c) {
    z[c] = w[c * kToyDim + 0] * x.x + w[c * kToyDim + 1] * x.y + b[c];
  }
  return z;
}

std::array<double, kToyClasses> LinearClassifier::probs(Point2 x) const {
  Probs z = logits(x);
  const double lse = log_sum_exp(z);
  for (double& v : z) v = std::exp(v - lse);
  return z;
}

ToyLoss toy_objective(const ToyModel& model, std::span<const LabeledPoint> data,
                      bool use_discrepancy, const std::vector<Probs>* frozen_main) {
  ToyLoss loss;
  if (data.empty()) return loss;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& s = data[i];
    const Probs p = frozen_main ? (*frozen_main)[i] : model.g.probs(s.x);
    const double d = pair_discrepancy(p, model.g1.probs(s.x), model.g2.probs(s.x));
    loss.main += cross_entropy(model.g, s.x, s.label);
    loss.auxiliary += cross_entropy(model.g1, s.x, s.label) +
                      cross_entropy(model.g2, s.x, s.label) - (use_discrepancy ? d : 0.0);
    loss.discrepancy += d;
  }
  const auto n = static_cast<double>(data.size());
  loss.main /= n;
  loss.auxiliary /= n;
  loss.discrepancy /= n;
  return loss;
}

ToyGradients toy_gradients(const ToyModel& model, std::span<const LabeledPoint> data,
                           bool use_discrepancy) {
  ToyGradients grads;
  if (data.empty()) return grads;
  for (const auto& s : data) {
    const Probs p = model.g.probs(s.x);
    const Probs p1 = model.g1.probs(s.x);
    const Probs p2 = model.g2.probs(s.x);
    Probs dz = p;
    dz[static_cast<std::size_t>(s.label)] -= 1.0;
    accumulate(grads.g, dz, s.x);
    accumulate(grads.g1, auxiliary_logit_grad(p1, p2, p, s.label, use_discrepancy), s.x);
    accumulate(grads.g2, auxiliary_logit_grad(p2, p1, p, s.label, use_discrepancy), s.x);
  }
  const double inv_n = 1.0 / static_cast<double>(data.size());
  scale(grads.g, inv_n);
  scale(grads.g1, inv_n);
  scale(grads.g2, inv_n);
  return grads;
}

ToyTrainResult toy_train(std::span<const LabeledPoint> data, const ToyTrainOptions& options,
                         Seed seed) {
  const bool has_negative = std::any_of(data.begin(), data.end(),
                                        [](const LabeledPoint& s) { return s.label == 0; });
  const bool has_positive = std::any_of(data.begin(), data.end(),
                                        [](const LabeledPoint& s) { return s.label == 1; });
  if (!has_negative || !has_positive) {
    fail(ErrorCode::DegenerateDataset, "toy training needs samples of both classes");
  }
  for (const auto& s : data) {
    if (s.label < 0 || s.label >= static_cast<int>(kToyClasses)) {
      fail(ErrorCode::DegenerateDataset, "toy labels must be 0 or 1");
    }
  }

  ToyTrainResult result;
  Rng rng1(seed.derive(1));
  Rng rng2(seed.derive(2));
  for (std::size_t i = 0; i < LinearClassifier::kParamCount; ++i) {
    result.model.g1.param(i) = options.init_scale * rng1.normal();
    result.model.g2.param(i) = options.init_scale * rng2.normal();
  }
  if (options.identical_aux_init) result.model.g2 = result.model.g1;

  result.history.reserve(options.epochs + 1);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    result.history.push_back(toy_objective(result.model, data, options.use_discrepancy));
    const ToyGradients grads = toy_gradients(result.model, data, options.use_discrepancy);
    step(result.model.g, grads.g, options.learning_rate);
    step(result.model.g1, grads.g1, options.learning_rate);
    step(result.model.g2, grads.g2, options.learning_rate);
  }
  result.history.push_back(toy_objective(result.model, data, options.use_discrepancy));
  return result;
}

std::vector<LabeledPoint> make_two_blobs(std::size_t n, double separation, double sigma,
                                         Seed seed) {
  Rng rng(seed);
  std::vector<LabeledPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = i < n / 2 ? 0 : 1;
    const double cx = label == 0 ? -separation : separation;
    const double dx = sigma * rng.normal();
    const double dy = sigma * rng.normal();
    out.push_back({{cx + dx, dy}, label});
  }
  return out;
}

double toy_accuracy(const LinearClassifier& g, std::span<const LabeledPoint> data) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : data) {
    const Probs p = g.probs(s.x);
    correct += argmax(p) == s.label ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double toy_uncertainty(const ToyModel& model, Point2 x) {
  const Probs p = model.g.probs(x);
  const Probs p1 = model.g1.probs(x);
  const Probs p2 = model.g2.probs(x);
  return discrepancy(p, p1, p2) + entropy(p);
}

std::optional<double> BoundaryStats::ratio() const {
  if (!near_mean || !far_mean || *far_mean == 0.0) return std::nullopt;
  return *near_mean / *far_mean;
}

BoundaryStats boundary_concentration(const ToyModel& model, std::span<const Point2> points,
                                     double near_band, double far_band) {
  const auto& g = model.g;
  const double wx = g.w[1 * kToyDim + 0] - g.w[0 * kToyDim + 0];
  const double wy = g.w[1 * kToyDim + 1] - g.w[0 * kToyDim + 1];
  const double bias = g.b[1] - g.b[0];
  const double norm = std::hypot(wx, wy);

  BoundaryStats stats;
  double near_sum = 0.0;
  double far_sum = 0.0;
  for (const auto& x : points) {
    const double u = toy_uncertainty(model, x);
    bool is_near = true;
    bool is_far = true;
    if (norm > 0.0) {
      const double dist = std::abs(wx * x.x + wy * x.y + bias) / norm;
      is_near = dist <= near_band;
      is_far = dist > far_band;
    }
    if (is_near) {
      near_sum += u;
      ++stats.near_count;
    }
    if (is_far) {
      far_sum += u;
      ++stats.far_count;
    }
  }
  if (stats.near_count > 0) stats.near_mean = near_sum / static_cast<double>(stats.near_count);
  if (stats.far_count > 0) stats.far_mean = far_sum / static_cast<double>(stats.far_count);
  return stats;
}

}  // namespace coresel::huq
