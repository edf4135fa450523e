#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "coresel/error.hpp"
#include "coresel/huq.hpp"
#include "coresel/rng.hpp"
#include "coresel/toy.hpp"

namespace coresel::huq {
namespace {

using Vec = std::vector<double>;

Vec random_simplex(Rng& rng, std::size_t k) {
  Vec p(k);
  double total = 0.0;
  for (auto& x : p) {
    x = -std::log(rng.uniform_open());
    total += x;
  }
  for (auto& x : p) x /= total;
  return p;
}

UncertaintyRecord record(std::string id, double u, int predicted, int label) {
  UncertaintyRecord r;
  r.id = std::move(id);
  r.u = u;
  r.predicted = predicted;
  r.label = label;
  return r;
}

TEST(Discrepancy, Examples) {
  const Vec a{1, 0};
  const Vec b{0, 1};
  const Vec half{0.5, 0.5};
  EXPECT_EQ(discrepancy(half, half, half), 0.0);
  EXPECT_NEAR(discrepancy(a, a, b), 2.0, 1e-9);
  EXPECT_NEAR(discrepancy(a, half, a), 1.0, 1e-9);
}

TEST(Discrepancy, RejectsNonSimplex) {
  const Vec a{1, 0};
  const Vec bad{0.7, 0.7};
  try {
    discrepancy(a, bad, a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SimplexViolation);
  }
  EXPECT_THROW(entropy(Vec{1.0}), Error);
  EXPECT_THROW(entropy(Vec{1.5, -0.5}), Error);
}

TEST(Entropy, Examples) {
  EXPECT_EQ(entropy(Vec{1, 0}), 0.0);
  EXPECT_NEAR(entropy(Vec{0.5, 0.5}), std::log(2.0), 1e-12);
  EXPECT_NEAR(entropy(Vec{0.9, 0.1}), 0.325082973391448, 1e-9);
}

TEST(HybridScore, Examples) {
  ProbTriple t{"a", std::nullopt, {1, 0}, {1, 0}, {1, 0}};
  EXPECT_EQ(hybrid_score(t).u, 0.0);
  t = {"b", std::nullopt, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  EXPECT_NEAR(hybrid_score(t).u, std::log(2.0), 1e-12);
  t = {"c", 1, {1, 0}, {1, 0}, {0, 1}};
  const auto r = hybrid_score(t);
  EXPECT_NEAR(r.u, 2.0, 1e-9);
  EXPECT_EQ(r.predicted, 0);
  EXPECT_EQ(r.label, 1);
  t = {"d", std::nullopt, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}};
  EXPECT_EQ(hybrid_score(t).predicted, 0);
}

TEST(HuqProperties, BoundsSymmetryAndPermutation) {
  Rng rng(Seed{31});
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t k = 2 + rng.below(6);
    const auto p = random_simplex(rng, k);
    const auto p1 = random_simplex(rng, k);
    const auto p2 = random_simplex(rng, k);
    const double d = discrepancy(p, p1, p2);
    const double h = entropy(p);
    EXPECT_GE(d, 0.0);
    EXPECT_LE(d, 6.0 / static_cast<double>(k) + 1e-9);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(static_cast<double>(k)) + 1e-9);
    EXPECT_EQ(d, discrepancy(p, p2, p1));
    auto shuffled = p;
    std::reverse(shuffled.begin(), shuffled.end());
    EXPECT_NEAR(entropy(shuffled), h, 1e-12);
    const auto r = hybrid_score({"x", std::nullopt, p, p1, p2});
    EXPECT_EQ(r.u, r.d_dis + r.entropy);
  }
}

TEST(HuqProperties, AdversarialCornerHitsBound) {
  for (std::size_t k = 3; k <= 6; ++k) {
    Vec p(k, 0.0), p1(k, 0.0), p2(k, 0.0);
    p[0] = p1[1] = p2[2] = 1.0;
    EXPECT_NEAR(discrepancy(p, p1, p2), 6.0 / static_cast<double>(k), 1e-12);
  }
}

TEST(HuqProperties, UMonotoneInBothTerms) {
  const Vec p1{0.6, 0.4};
  const Vec p2{0.4, 0.6};
  // Same auxiliaries, more uncertain p: entropy rises.
  const auto lo = hybrid_score({"a", std::nullopt, {0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}});
  const auto hi = hybrid_score({"b", std::nullopt, {0.5, 0.5}, p1, p2});
  EXPECT_EQ(lo.entropy, hi.entropy);
  EXPECT_GT(hi.d_dis, lo.d_dis);
  EXPECT_GT(hi.u, lo.u);
}

TEST(RecallMis, NoErrorsIsOneByConvention) {
  std::vector<UncertaintyRecord> recs;
  for (int i = 0; i < 10; ++i) recs.push_back(record(std::to_string(i), i, i % 2, i % 2));
  const auto r = recall_mis(recs);
  EXPECT_EQ(r.value, 1.0);
  EXPECT_TRUE(r.degenerate);
}

TEST(RecallMis, PerfectRanking) {
  std::vector<UncertaintyRecord> recs;
  for (int i = 0; i < 30; ++i) {
    const bool wrong = i < 4;
    recs.push_back(record(std::to_string(i), 100.0 - i, wrong ? 1 : 0, 0));
  }
  const auto r = recall_mis(recs);
  EXPECT_EQ(r.fp, 4u);
  EXPECT_EQ(r.value, 1.0);
}

TEST(RecallMis, TwentyRecordFixture) {
  std::vector<UncertaintyRecord> recs;
  for (int i = 1; i <= 20; ++i) {
    int predicted = 0;
    int label = 0;
    if (i == 1 || i == 18) label = 1;            // false negatives
    if (i == 2 || i == 3 || i == 19) predicted = 1;  // false positives
    recs.push_back(record(std::to_string(i), 1.0 - 0.01 * i, predicted, label));
  }
  std::reverse(recs.begin(), recs.end());
  const auto r = recall_mis(recs, 15);
  EXPECT_EQ(r.fn, 2u);
  EXPECT_EQ(r.fp, 3u);
  EXPECT_EQ(r.fn_prime, 1u);
  EXPECT_EQ(r.fp_prime, 2u);
  EXPECT_DOUBLE_EQ(r.value, 0.6);
}

TEST(RecallMis, TiesGoToLowerSampleId) {
  std::vector<UncertaintyRecord> recs{record("10", 1.0, 1, 0), record("9", 1.0, 0, 0),
                                      record("2", 1.0, 0, 0)};
  const auto r = recall_mis(recs, 2);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fp_prime, 0u);
  EXPECT_TRUE(sample_id_less("9", "10"));
  EXPECT_TRUE(sample_id_less("abc", "abd"));
}

TEST(RecallMis, PermutationInvariant) {
  Rng rng(Seed{12});
  std::vector<UncertaintyRecord> recs;
  for (int i = 0; i < 60; ++i) {
    recs.push_back(record("s" + std::to_string(i), std::floor(rng.uniform() * 10.0),
                          static_cast<int>(rng.below(2)), static_cast<int>(rng.below(2))));
  }
  const auto base = recall_mis(recs, 15);
  for (int t = 0; t < 20; ++t) {
    for (std::size_t i = recs.size(); i > 1; --i) std::swap(recs[i - 1], recs[rng.below(i)]);
    const auto r = recall_mis(recs, 15);
    EXPECT_EQ(r.value, base.value);
    EXPECT_EQ(r.fn_prime, base.fn_prime);
    EXPECT_EQ(r.fp_prime, base.fp_prime);
  }
}

TEST(RecallMis, MissingLabels) {
  std::vector<UncertaintyRecord> recs{record("1", 0.5, 0, 0)};
  recs[0].label.reset();
  try {
    recall_mis(recs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MissingLabels);
  }
}

TEST(Toy, TrainingSeparatesBlobs) {
  const auto data = make_two_blobs(200, 2.0, 0.4, Seed{1});
  const auto result = toy_train(data, {}, Seed{1});
  EXPECT_GE(toy_accuracy(result.model.g, data), 0.95);
  EXPECT_LT(result.history.back().main, result.history.front().main);
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nb), 1e-12});
}

TEST(Toy, GradientMatchesFiniteDifferences) {
  const auto data = make_two_blobs(60, 1.0, 0.8, Seed{2});
  Rng rng(Seed{3});
  for (int point = 0; point < 10; ++point) {
    ToyModel model;
    for (auto* c : {&model.g, &model.g1, &model.g2}) {
      for (std::size_t i = 0; i < LinearClassifier::kParamCount; ++i) c->param(i) = rng.normal();
    }
    std::vector<std::array<double, kToyClasses>> frozen;
    for (const auto& s : data) frozen.push_back(model.g.probs(s.x));

    const auto grads = toy_gradients(model, data);
    std::vector<double> analytic;
    std::vector<double> numeric;
    const double h = 1e-6;
    for (int which = 0; which < 3; ++which) {
      LinearClassifier ToyModel::*member =
          which == 0 ? &ToyModel::g : which == 1 ? &ToyModel::g1 : &ToyModel::g2;
      const LinearClassifier ToyGradients::*gmember =
          which == 0 ? &ToyGradients::g : which == 1 ? &ToyGradients::g1 : &ToyGradients::g2;
      for (std::size_t i = 0; i < LinearClassifier::kParamCount; ++i) {
        ToyModel plus = model;
        ToyModel minus = model;
        (plus.*member).param(i) += h;
        (minus.*member).param(i) -= h;
        const double fd = (toy_objective(plus, data, true, &frozen).total() -
                           toy_objective(minus, data, true, &frozen).total()) /
                          (2.0 * h);
        numeric.push_back(fd);
        analytic.push_back((grads.*gmember).param(i));
      }
    }
    EXPECT_LT(relative_error(analytic, numeric), 1e-4) << "point " << point;
  }
}

TEST(Toy, DiscrepancyNeverReachesMainClassifier) {
  const auto data = make_two_blobs(40, 1.0, 0.5, Seed{4});
  Rng rng(Seed{5});
  ToyModel model;
  for (auto* c : {&model.g, &model.g1, &model.g2}) {
    for (std::size_t i = 0; i < LinearClassifier::kParamCount; ++i) c->param(i) = rng.normal();
  }
  const auto with = toy_gradients(model, data, true);
  const auto without = toy_gradients(model, data, false);
  EXPECT_EQ(with.g, without.g);
  EXPECT_NE(with.g1, without.g1);
}

TEST(Toy, IdenticalAuxiliariesStayIdenticalWithoutDiscrepancy) {
  const auto data = make_two_blobs(100, 2.0, 0.4, Seed{6});
  ToyTrainOptions opts;
  opts.use_discrepancy = false;
  opts.identical_aux_init = true;
  for (std::size_t epochs : {0u, 1u, 2u, 5u, 50u}) {
    opts.epochs = epochs;
    const auto r = toy_train(data, opts, Seed{6});
    EXPECT_EQ(r.model.g1, r.model.g2) << "epochs " << epochs;
  }
}

std::vector<Point2> grid(std::size_t steps, double extent) {
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < steps; ++i) {
    for (std::size_t j = 0; j < steps; ++j) {
      const double x = -extent + 2.0 * extent * static_cast<double>(i) / (steps - 1);
      const double y = -extent + 2.0 * extent * static_cast<double>(j) / (steps - 1);
      pts.push_back({x, y});
    }
  }
  return pts;
}

TEST(Toy, UntrainedModelIsFlat) {
  const ToyModel zero;
  const auto stats = boundary_concentration(zero, grid(11, 3.0));
  ASSERT_TRUE(stats.near_mean && stats.far_mean);
  EXPECT_NEAR(*stats.near_mean, std::log(2.0), 1e-12);
  EXPECT_NEAR(*stats.far_mean, std::log(2.0), 1e-12);
  EXPECT_EQ(*stats.ratio(), 1.0);
}

TEST(Toy, EmptyNearBandIsUndefined) {
  ToyModel model;
  model.g.w[2] = 1.0;  // decision line x = 0
  const std::vector<Point2> far{{3.0, 0.0}, {-4.0, 1.0}};
  const auto stats = boundary_concentration(model, far);
  EXPECT_FALSE(stats.near_mean.has_value());
  EXPECT_TRUE(stats.far_mean.has_value());
  EXPECT_FALSE(stats.ratio().has_value());
}

TEST(Toy, TrainedUncertaintyConcentratesNearBoundary) {
  const auto data = make_two_blobs(200, 2.0, 0.4, Seed{1});
  const auto model = toy_train(data, {}, Seed{1}).model;
  const auto stats = boundary_concentration(model, grid(41, 4.0));
  ASSERT_TRUE(stats.near_mean && stats.far_mean);
  EXPECT_GT(*stats.near_mean, *stats.far_mean);
}

TEST(Toy, BitReproducible) {
  const auto data = make_two_blobs(200, 2.0, 0.4, Seed{9});
  const auto a = toy_train(data, {}, Seed{9});
  const auto b = toy_train(data, {}, Seed{9});
  EXPECT_EQ(a.model, b.model);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].total(), b.history[i].total());
  }
}

TEST(Toy, DegenerateDataset) {
  std::vector<LabeledPoint> one_class{{{0, 0}, 0}, {{1, 1}, 0}};
  try {
    toy_train(one_class, {}, Seed{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateDataset);
  }
}

}  // namespace
}  // namespace coresel::huq
