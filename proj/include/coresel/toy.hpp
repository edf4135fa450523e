#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "coresel/rng.hpp"

namespace coresel::huq {

inline constexpr std::size_t kToyClasses = 2;
inline constexpr std::size_t kToyDim = 2;

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct LabeledPoint {
  Point2 x;
  int label = 0;
};

/// softmax(W x + b) over two classes, on a 2-D input.
struct LinearClassifier {
  std::array<double, kToyClasses * kToyDim> w{};  // row-major K x dim
  std::array<double, kToyClasses> b{};

  std::array<double, kToyClasses> logits(Point2 x) const;
  std::array<double, kToyClasses> probs(Point2 x) const;

  static constexpr std::size_t kParamCount = kToyClasses * kToyDim + kToyClasses;
  double& param(std::size_t i) { return i < w.size() ? w[i] : b[i - w.size()]; }
  double param(std::size_t i) const { return i < w.size() ? w[i] : b[i - w.size()]; }

  bool operator==(const LinearClassifier&) const = default;
};

/// Identity backbone with a main classifier G and auxiliaries G1, G2.
struct ToyModel {
  LinearClassifier g;
  LinearClassifier g1;
  LinearClassifier g2;

  bool operator==(const ToyModel&) const = default;
};

struct ToyLoss {
  double main = 0.0;       // mean CE of G
  double auxiliary = 0.0;  // mean CE(G1) + CE(G2) - d_dis
  double discrepancy = 0.0;
  double total() const { return main + auxiliary; }
};

struct ToyGradients {
  LinearClassifier g;
  LinearClassifier g1;
  LinearClassifier g2;
};

struct ToyTrainOptions {
  std::size_t epochs = 500;
  double learning_rate = 0.1;
  // Scale of the seeded Gaussian init for G1 and G2; G always starts at zero.
  // With identical auxiliaries the discrepancy subgradient vanishes and they
  // never separate, so the default is nonzero.
  double init_scale = 0.1;
  bool use_discrepancy = true;
  bool identical_aux_init = false;
};

struct ToyTrainResult {
  ToyModel model;
  std::vector<ToyLoss> history;  // loss before each update, plus the final loss
};

/// Objective with the main prediction p entering d_dis as a constant. When
/// `frozen_main` is given it supplies p per sample instead of model.g.
ToyLoss toy_objective(const ToyModel& model, std::span<const LabeledPoint> data,
                      bool use_discrepancy = true,
                      const std::vector<std::array<double, kToyClasses>>* frozen_main = nullptr);

/// Analytic gradients of toy_objective. The discrepancy term reaches only G1
/// and G2; G sees only its own cross-entropy.
ToyGradients toy_gradients(const ToyModel& model, std::span<const LabeledPoint> data,
                           bool use_discrepancy = true);

ToyTrainResult toy_train(std::span<const LabeledPoint> data, const ToyTrainOptions& options,
                         Seed seed);

/// Two Gaussian blobs with centers (+-separation, 0); label 1 for the +x blob.
std::vector<LabeledPoint> make_two_blobs(std::size_t n, double separation, double sigma,
                                         Seed seed);

double toy_accuracy(const LinearClassifier& g, std::span<const LabeledPoint> data);

struct BoundaryStats {
  std::optional<double> near_mean;  // empty if no point in the near band
  std::optional<double> far_mean;
  std::size_t near_count = 0;
  std::size_t far_count = 0;

  /// near_mean / far_mean when both are defined and far_mean is nonzero.
  std::optional<double> ratio() const;
};

/// Mean hybrid uncertainty of points within near_band of G's decision line
/// versus points farther than far_band. If G's weight difference is zero there
/// is no decision line, and both bands take every point.
BoundaryStats boundary_concentration(const ToyModel& model, std::span<const Point2> points,
                                     double near_band = 0.5, double far_band = 1.5);

/// Hybrid uncertainty u of the model at x.
double toy_uncertainty(const ToyModel& model, Point2 x);

}  // namespace coresel::huq
