// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "coresel/cli.hpp"
#include "coresel/css.hpp"
#include "coresel/hnsw.hpp"
#include "coresel/huq.hpp"
#include "coresel/io.hpp"
#include "coresel/kmeans.hpp"
#include "coresel/synthetic.hpp"
#include "coresel/toy.hpp"
#include "json.hpp"
#include "oracle/css_oracle.hpp"
#include "test_util.hpp"

using namespace coresel;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the first few failure messages of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failure(s): " + messages_};
  }

 private:
  std::size_t failures_ = 0;
  std::string messages_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

struct FuzzCase {
  EmbeddingSet set;
  std::size_t m;
  std::vector<double> weights;
  CssParams params;
  Seed seed;
};

// Mixed fuzz instances: noisy blobs, exact duplicates and uniform points.
std::vector<FuzzCase> fuzz_cases(std::size_t count) {
  std::vector<FuzzCase> cases;
  Rng rng(Seed{20240601});
  for (std::size_t c = 0; c < count; ++c) {
    SyntheticSpec spec;
    spec.mode = static_cast<SyntheticMode>(c % 3);
    spec.n = 1 + rng.below(200);
    spec.d = 2 + rng.below(15);
    spec.clusters = 1 + rng.below(std::min<std::size_t>(spec.n, 8));
    spec.sigma = 0.02 + 0.3 * rng.uniform();
    spec.seed = Seed{rng.next_u64()};
    FuzzCase fc;
    fc.set = generate_synthetic(spec).set;
    fc.m = 1 + rng.below(std::min<std::size_t>(spec.n, 24));
    fc.weights.resize(1 + rng.below(3));
    for (auto& w : fc.weights) w = 0.1 + rng.uniform();
    fc.params.k = 1 + rng.below(12);
    fc.params.alpha = 0.1 + 1.5 * rng.uniform();
    fc.params.beta = 0.05 + 0.95 * rng.uniform();
    fc.params.lambda = 2.0 * rng.uniform();
    fc.params.T = rng.below(8);
    fc.seed = Seed{rng.next_u64()};
    cases.push_back(std::move(fc));
  }
  return cases;
}

Outcome oracle_equivalence() {
  Check check;
  const auto cases = fuzz_cases(150);
  std::size_t moved = 0;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    auto params = cases[c].params;
    params.h = cases[c].set.n();
    params.backend = KnnBackend::BruteForce;
    const RatioWeights weights(cases[c].weights);
    const auto got = css_select(cases[c].set, cases[c].m, weights, params, cases[c].seed);
    const std::vector<float> rows(cases[c].set.data().begin(), cases[c].set.data().end());
    const auto want = oracle::select(rows, cases[c].set.n(), cases[c].set.d(), cases[c].m,
                                     weights, params, cases[c].seed);
    check.expect(got.selected_indices == want, "instance " + std::to_string(c) + " differs");
    auto frozen = params;
    frozen.T = 0;
    if (css_select(cases[c].set, cases[c].m, weights, frozen, cases[c].seed).selected_indices !=
        got.selected_indices) {
      ++moved;
    }
  }
  return check.outcome(std::to_string(cases.size()) + " fuzz instances match index-for-index (" +
                       std::to_string(moved) + " where refinement moved the selection)");
}

Outcome degenerate_reductions() {
  Check check;
  const auto cases = fuzz_cases(150);
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const RatioWeights weights(cases[c].weights);
    auto base = cases[c].params;
    base.T = std::max<std::size_t>(base.T, 3);
    auto lambda0 = base;
    lambda0.lambda = 0.0;
    auto beta1 = base;
    beta1.beta = 1.0;
    auto t0 = base;
    t0.T = 0;
    const auto& set = cases[c].set;
    const auto a = css_select(set, cases[c].m, weights, lambda0, cases[c].seed).selected_indices;
    const auto b = css_select(set, cases[c].m, weights, beta1, cases[c].seed).selected_indices;
    const auto z = css_select(set, cases[c].m, weights, t0, cases[c].seed).selected_indices;
    check.expect(a == b && b == z, "instance " + std::to_string(c) + " differs");
  }
  return check.outcome("lambda=0, beta=1 and T=0 agree on " + std::to_string(cases.size()) +
                       " instances");
}

Outcome hnsw_quality() {
  const auto start = std::chrono::steady_clock::now();
  const auto base = testing::random_set(10000, 32, 1);
  const auto queries = testing::random_set(1000, 32, 2);
  HnswParams params;  // M=16, ef_construction=200, ef_search=100
  const auto index = HnswIndex::build(base.view(), params, Seed{3});
  double total = 0.0;
  for (std::size_t q = 0; q < queries.n(); ++q) {
    const auto exact = brute_force_knn(base.view(), queries.row(q), 10);
    const auto approx = index.search(queries.row(q), 10, params.ef_search);
    std::set<std::size_t> truth;
    for (const auto& nb : exact.neighbors) truth.insert(nb.index);
    std::size_t hits = 0;
    for (const auto& nb : approx.neighbors) hits += truth.count(nb.index);
    total += static_cast<double>(hits) / 10.0;
  }
  const double recall = total / static_cast<double>(queries.n());
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Check check;
  check.expect(recall >= 0.95, "recall@10 " + fmt(recall));
  check.expect(seconds < 60.0, "took " + fmt(seconds) + " s");
  return check.outcome("recall@10 = " + fmt(recall) + " in " + fmt(seconds, 3) + " s");
}

Outcome kmeans_descent() {
  Check check;
  std::size_t runs = 0;
  std::size_t iterations = 0;
  auto audit = [&](const MatrixView& view, std::size_t m, Seed seed, const KMeansOptions& opt) {
    const auto c = kmeans_fit(view, m, seed, opt);
    ++runs;
    for (std::size_t i = 1; i < c.wcss_history.size(); ++i) {
      ++iterations;
      check.expect(c.wcss_history[i] <= c.wcss_history[i - 1] + 1e-9,
                   "WCSS rose at iteration " + std::to_string(i));
    }
    check.expect(std::abs(c.wcss - compute_wcss(view, c.assignments, c.centroids)) <=
                     1e-6 * std::max(1.0, c.wcss),
                 "stored WCSS disagrees with recomputation");
  };
  Rng rng(Seed{77});
  for (const auto& fc : fuzz_cases(150)) {
    KMeansOptions opt;
    audit(fc.set.view(), 1 + rng.below(fc.set.n()), Seed{rng.next_u64()}, opt);
    opt.init = KMeansInit::PlusPlus;
    audit(fc.set.view(), 1 + rng.below(fc.set.n()), Seed{rng.next_u64()}, opt);
  }
  // Larger noisy sets, where Lloyd runs many iterations.
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto set = testing::random_set(2000, 16, s);
    audit(set.view(), 50, Seed{s}, {});
  }
  return check.outcome(std::to_string(runs) + " runs, " + std::to_string(iterations) +
                       " EM steps, no increase");
}

Outcome budget_apportionment() {
  Check check;
  const auto plan = make_partition_plan(100, 64, RatioWeights::lung_default());
  std::vector<std::size_t> budgets;
  for (const auto& s : plan.segments) budgets.push_back(s.budget);
  check.expect(budgets == std::vector<std::size_t>{16, 10, 38}, "default split at m=64");
  Rng rng(Seed{5});
  const std::size_t trials = 20000;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = 1 + rng.below(5000);
    const std::size_t m = 1 + rng.below(n);
    std::vector<double> raw(1 + rng.below(6));
    for (auto& w : raw) w = 1e-3 + rng.uniform();
    const RatioWeights weights(raw);
    const auto shares = apportion_largest_remainder(m, weights);
    std::size_t sum = 0;
    for (std::size_t i = 0; i < shares.size(); ++i) {
      sum += shares[i];
      check.expect(std::abs(static_cast<double>(shares[i]) - static_cast<double>(m) * weights[i]) <=
                       1.0 + 1e-9,
                   "share off by more than one");
    }
    check.expect(sum == m, "pre-clamp shares do not sum to m");
    const auto p = make_partition_plan(n, m, weights);
    check.expect(p.total_budget() == m, "plan budgets do not sum to m");
    for (const auto& s : p.segments) check.expect(s.budget <= s.length(), "budget above length");
  }
  return check.outcome("(16, 10, 38) at m=64; " + std::to_string(trials) + " fuzzed plans exact");
}

json run_bench_cli(const testing::TempDir& dir, const std::string& knn) {
  std::ostringstream out;
  std::ostringstream err;
  const auto path = (dir / ("bench-" + knn + ".json")).string();
  const int code = cli::run({"bench", "--knn", knn, "--out", path}, out, err);
  if (code != 0) throw std::runtime_error("bench --knn " + knn + " failed: " + err.str());
  return json::parse(io::read_text(path));
}

Outcome complexity() {
  testing::TempDir dir;
  const auto hnsw = run_bench_cli(dir, "hnsw");
  const auto brute = run_bench_cli(dir, "brute");
  Check check;
  for (const auto* report : {&hnsw, &brute}) {
    check.expect((*report)["points"].size() == 4, "expected 4 sizes");
    for (const auto& p : (*report)["points"]) check.expect(p["seconds"].size() >= 3, "reps < 3");
  }
  const double s_h = hnsw["slope"].get<double>();
  const double s_b = brute["slope"].get<double>();
  check.expect(s_h <= 1.3, "hnsw slope " + fmt(s_h));
  check.expect(s_b >= 1.6, "brute-force slope " + fmt(s_b));
  return check.outcome("slope " + fmt(s_h, 3) + " (hnsw), " + fmt(s_b, 3) + " (brute force)");
}

Outcome huq_formulas() {
  using V = std::vector<double>;
  Check check;
  auto near = [&](double got, double want, const std::string& what) {
    check.expect(std::abs(got - want) <= 1e-9, what + " = " + fmt(got, 12));
  };
  const V a{1, 0}, b{0, 1}, half{0.5, 0.5};
  near(huq::discrepancy(half, half, half), 0.0, "d_dis(p,p,p)");
  near(huq::discrepancy(a, a, b), 2.0, "d_dis fixture 2");
  near(huq::discrepancy(a, half, a), 1.0, "d_dis fixture 1");
  near(huq::entropy(a), 0.0, "H(1,0)");
  near(huq::entropy(half), std::log(2.0), "H(.5,.5)");
  near(huq::entropy(V{0.9, 0.1}), -(0.9 * std::log(0.9) + 0.1 * std::log(0.1)), "H(.9,.1)");
  near(huq::hybrid_score({"1", std::nullopt, a, a, a}).u, 0.0, "u one-hot");
  near(huq::hybrid_score({"2", std::nullopt, half, half, half}).u, std::log(2.0), "u uniform");
  near(huq::hybrid_score({"3", std::nullopt, a, a, b}).u, 2.0, "u fixture");

  Rng rng(Seed{99});
  const std::size_t samples = 10000;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t k = 2 + rng.below(9);
    auto draw = [&] {
      V p(k);
      double total = 0.0;
      for (auto& x : p) total += (x = -std::log(rng.uniform_open()));
      for (auto& x : p) x /= total;
      return p;
    };
    const V p = draw(), p1 = draw(), p2 = draw();
    const double d = huq::discrepancy(p, p1, p2);
    const double h = huq::entropy(p);
    check.expect(d >= 0.0 && d <= 6.0 / static_cast<double>(k) + 1e-9, "d_dis out of bounds");
    check.expect(h >= 0.0 && h <= std::log(static_cast<double>(k)) + 1e-9, "H out of bounds");
  }
  return check.outcome("unit examples exact; bounds hold on " + std::to_string(samples) +
                       " random triples");
}

Outcome toy_training() {
  Check check;
  const auto data = huq::make_two_blobs(200, 2.0, 0.4, Seed{11});

  // Central differences on the objective with p held fixed inside d_dis.
  Rng rng(Seed{12});
  double worst = 0.0;
  for (int point = 0; point < 10; ++point) {
    huq::ToyModel model;
    for (auto* c : {&model.g, &model.g1, &model.g2}) {
      for (std::size_t i = 0; i < huq::LinearClassifier::kParamCount; ++i) {
        c->param(i) = rng.normal();
      }
    }
    std::vector<std::array<double, huq::kToyClasses>> frozen;
    for (const auto& s : data) frozen.push_back(model.g.probs(s.x));
    const auto grads = huq::toy_gradients(model, data);
    const huq::LinearClassifier* analytic[] = {&grads.g, &grads.g1, &grads.g2};
    huq::LinearClassifier huq::ToyModel::*members[] = {&huq::ToyModel::g, &huq::ToyModel::g1,
                                                       &huq::ToyModel::g2};
    double diff = 0.0;
    double norm = 0.0;
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < huq::LinearClassifier::kParamCount; ++i) {
        const double h = 1e-6;
        auto plus = model;
        auto minus = model;
        (plus.*members[c]).param(i) += h;
        (minus.*members[c]).param(i) -= h;
        const double fd = (huq::toy_objective(plus, data, true, &frozen).total() -
                           huq::toy_objective(minus, data, true, &frozen).total()) /
                          (2.0 * h);
        const double an = analytic[c]->param(i);
        diff += (fd - an) * (fd - an);
        norm += std::max(fd * fd, an * an);
      }
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12));
  }
  check.expect(worst < 1e-4, "gradient relative error " + fmt(worst));

  const auto model = huq::toy_train(data, {}, Seed{11}).model;
  const double accuracy = huq::toy_accuracy(model.g, data);
  check.expect(accuracy >= 0.95, "accuracy " + fmt(accuracy));
  std::vector<huq::Point2> grid;
  for (int i = 0; i < 41; ++i) {
    for (int j = 0; j < 41; ++j) grid.push_back({-4.0 + 0.2 * i, -4.0 + 0.2 * j});
  }
  const auto stats = huq::boundary_concentration(model, grid);
  const bool defined = stats.near_mean && stats.far_mean;
  check.expect(defined, "a boundary band is empty");
  if (defined) {
    check.expect(*stats.near_mean > *stats.far_mean,
                 "near " + fmt(*stats.near_mean) + " <= far " + fmt(*stats.far_mean));
  }
  return check.outcome("max grad rel. err " + fmt(worst, 2) + ", accuracy " + fmt(accuracy, 3) +
                       ", near u " + fmt(defined ? *stats.near_mean : 0.0, 3) + " > far u " +
                       fmt(defined ? *stats.far_mean : 0.0, 3));
}

Outcome recall_fixture() {
  // u falls with i; misdiagnoses at i = 1, 2, 3 (inside the top 15) and 18, 19.
  std::vector<huq::UncertaintyRecord> records;
  for (int i = 1; i <= 20; ++i) {
    huq::UncertaintyRecord r;
    r.id = std::to_string(i);
    r.u = 2.0 - 0.05 * i;
    r.label = (i == 1 || i == 18) ? 1 : 0;
    r.predicted = (i == 2 || i == 3 || i == 19) ? 1 : 0;
    records.push_back(r);
  }
  const auto r = huq::recall_mis(records, 15);
  Check check;
  check.expect(r.fn + r.fp == 5 && r.fn_prime + r.fp_prime == 3, "counts");
  check.expect(r.value == 0.6, "recall_mis " + fmt(r.value, 17));
  return check.outcome("recall_mis = " + fmt(r.value) + " (FN=" + std::to_string(r.fn) +
                       ", FP=" + std::to_string(r.fp) + ", FN'=" + std::to_string(r.fn_prime) +
                       ", FP'=" + std::to_string(r.fp_prime) + ")");
}

// Runs the same command set in a fresh directory and returns every output file.
std::map<std::string, std::string> cli_outputs(const std::filesystem::path& dir) {
  auto run = [&](std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    if (cli::run(args, out, err) != 0) {
      throw std::runtime_error(args.front() + " failed: " + err.str());
    }
  };
  auto p = [&](const std::string& name) { return (dir / name).string(); };
  run({"synth", "--mode", "blobs", "--n", "300", "--d", "12", "--c", "5", "--seed", "7",
       "--out", p("a.bin")});
  run({"synth", "--mode", "prototypes", "--n", "64", "--d", "8", "--c", "4", "--seed", "7",
       "--out", p("b.csv")});
  run({"select", "--input", p("a.bin"), "--m", "24", "--seed", "7", "--out", p("a.json"),
       "--trace", p("a.jsonl")});
  run({"select", "--input", p("a.bin"), p("b.csv"), "--m", "12", "--seed", "7", "--threads",
       "2", "--knn", "brute", "--out", p("multi"), "--trace", p("multi-trace")});
  io::write_text(dir / "probs.csv",
                 "id,label,p_0,p_1,p1_0,p1_1,p2_0,p2_1\n"
                 "1,0,0.9,0.1,0.8,0.2,0.95,0.05\n"
                 "2,1,0.6,0.4,0.3,0.7,0.5,0.5\n"
                 "3,1,0.2,0.8,0.25,0.75,0.1,0.9\n");
  run({"huq", "--probs", p("probs.csv"), "--q", "2", "--out", p("u.json")});
  run({"toy", "--seed", "7", "--out", p("toy")});
  run({"bench", "--sizes", "300,600", "--reps", "3", "--d", "16", "--m", "8", "--seed", "7",
       "--out", p("bench.json"), "--snapshot", p("index.hnsw")});

  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(entry.path(), dir).string();
    std::string bytes = io::read_text(entry.path());
    if (rel == "bench.json") {
      // Wall-clock fields can never repeat; everything else must.
      auto j = json::parse(bytes);
      for (auto& point : j["points"]) {
        point.erase("seconds");
        point.erase("median_seconds");
      }
      j.erase("slope");
      j.erase("timer_resolution_seconds");
      j.erase("timer_too_coarse");
      bytes = j.dump();
    }
    files[rel] = bytes;
  }
  return files;
}

Outcome determinism() {
  testing::TempDir first;
  testing::TempDir second;
  const auto a = cli_outputs(first.path());
  const auto b = cli_outputs(second.path());
  Check check;
  check.expect(a.size() == b.size(), "different file sets");
  for (const auto& [name, bytes] : a) {
    const auto it = b.find(name);
    check.expect(it != b.end() && it->second == bytes, name + " differs");
  }
  return check.outcome(std::to_string(a.size()) +
                       " output files byte-identical across reruns of synth, select, huq, toy, "
                       "bench (bench timings excluded)");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"degenerate reductions", degenerate_reductions},
      {"HNSW recall@10", hnsw_quality},
      {"K-Means descent", kmeans_descent},
      {"budget apportionment", budget_apportionment},
      {"complexity scaling", complexity},
      {"HUQ formulas", huq_formulas},
      {"toy discrepancy training", toy_training},
      {"recall_mis fixture", recall_fixture},
      {"CLI determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    const auto start = std::chrono::steady_clock::now();
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += outcome.pass ? 0 : 1;
    std::printf("%s  [%2zu] %-26s %s (%.1f s)\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
