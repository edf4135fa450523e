#include "coresel/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "coresel/bench.hpp"
#include "coresel/css.hpp"
#include "coresel/huq.hpp"
#include "coresel/io.hpp"
#include "coresel/synthetic.hpp"
#include "coresel/toy.hpp"

namespace coresel::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised for bad flags or config values; maps to exit 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommandFailure {
  int code;
  std::string message;
};

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("--" + what + ": cannot parse '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("--" + what + " must not be empty");
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& what) {
  std::vector<std::size_t> out;
  for (double v : parse_real_list(text, what)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("--" + what + " needs positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

unsigned default_threads() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// ---- option structs -------------------------------------------------------

struct CssFlags {
  std::string weights = "0.25,0.15,0.6";
  std::size_t k = 10;
  double alpha = 0.5;
  double beta = 0.9;
  double lambda = 0.5;
  std::size_t iters = 10;
  std::size_t h = 64;
  double epsilon = 1e-12;
  std::string knn = "hnsw";
  std::size_t hnsw_m = 16;
  std::size_t ef_construction = 200;
  std::size_t ef_search = 100;
  std::string kmeans_init = "random";
  std::size_t max_iter = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;

  void add_to(CLI::App& app) {
    app.add_option("--weights", weights, "Segment ratio weights")->capture_default_str();
    app.add_option("--k", k, "Density neighbor count")->capture_default_str();
    app.add_option("--alpha", alpha, "Diversity sensitivity")->capture_default_str();
    app.add_option("--beta", beta, "EMA momentum")->capture_default_str();
    app.add_option("--lambda", lambda, "Representativeness/diversity balance")->capture_default_str();
    app.add_option("--iters", iters, "Refinement iterations T")->capture_default_str();
    app.add_option("--h", h, "Candidate neighborhood size")->capture_default_str();
    app.add_option("--epsilon", epsilon, "Distance floor")->capture_default_str();
    app.add_option("--knn", knn, "Neighbor backend: hnsw or brute")->capture_default_str();
    app.add_option("--hnsw-m", hnsw_m, "HNSW max connections per layer")->capture_default_str();
    app.add_option("--ef-construction", ef_construction, "HNSW build beam")->capture_default_str();
    app.add_option("--ef-search", ef_search, "HNSW query beam")->capture_default_str();
    app.add_option("--kmeans-init", kmeans_init, "random or kmeans++")->capture_default_str();
    app.add_option("--max-iter", max_iter, "K-Means iteration cap")->capture_default_str();
    app.add_option("--tol", tol, "K-Means WCSS tolerance")->capture_default_str();
    app.add_option("--seed", seed, "Master seed")->capture_default_str();
  }

  CssParams params() const {
    CssParams p;
    p.k = k;
    p.alpha = alpha;
    p.beta = beta;
    p.lambda = lambda;
    p.T = iters;
    p.h = h;
    p.epsilon = epsilon;
    if (knn == "hnsw") {
      p.backend = KnnBackend::Hnsw;
    } else if (knn == "brute") {
      p.backend = KnnBackend::BruteForce;
    } else {
      throw ConfigError("--knn must be hnsw or brute");
    }
    p.hnsw.M = hnsw_m;
    p.hnsw.ef_construction = ef_construction;
    p.hnsw.ef_search = ef_search;
    if (kmeans_init == "random") {
      p.kmeans.init = KMeansInit::RandomItems;
    } else if (kmeans_init == "kmeans++") {
      p.kmeans.init = KMeansInit::PlusPlus;
    } else {
      throw ConfigError("--kmeans-init must be random or kmeans++");
    }
    p.kmeans.max_iter = max_iter;
    p.kmeans.tol = tol;
    try {
      p.validate();
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    return p;
  }

  RatioWeights ratio_weights() const {
    try {
      return RatioWeights(parse_real_list(weights, "weights"));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
};

struct SynthFlags {
  std::string mode = "blobs";
  std::size_t n = 100;
  std::size_t d = 16;
  std::size_t c = 4;
  double sigma = 0.01;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "auto";
};

struct SelectFlags {
  std::vector<std::string> inputs;
  std::size_t m = 0;
  CssFlags css;
  std::string out;
  std::string trace;
  unsigned threads = default_threads();
};

struct HuqFlags {
  std::string probs;
  std::size_t q = 15;
  std::string out;
};

struct ToyFlags {
  std::size_t epochs = 500;
  double lr = 0.1;
  double init_scale = 0.1;
  std::uint64_t seed = 0;
  std::size_t n = 200;
  double separation = 2.0;
  double sigma = 0.4;
  std::size_t grid = 41;
  double extent = 4.0;
  std::string out;
};

struct BenchFlags {
  std::string sizes = "1000,2000,4000,8000";
  std::size_t reps = 3;
  std::size_t d = 64;
  std::size_t m = 32;
  std::size_t blobs = 32;
  double sigma = 0.05;
  CssFlags css;
  std::string out;
  std::string snapshot;
};

// ---- config merging -------------------------------------------------------

std::string json_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  throw ConfigError("config values must be scalars or arrays of scalars");
}

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.rfind(flag + "=", 0) == 0;
  });
}

// Appends config-file settings for every option the user did not pass.
std::vector<std::string> merge_config(const std::vector<std::string>& args, CLI::App& sub) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;
  json config;
  try {
    config = json::parse(io::read_text(*path));
  } catch (const json::exception& e) {
    throw ConfigError("config " + *path + ": " + e.what());
  }
  if (!config.is_object()) throw ConfigError("config " + *path + " must be a JSON object");
  std::vector<std::string> merged = args;
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    if (key == "config" || sub.get_option_no_throw(flag) == nullptr) {
      throw ConfigError("config " + *path + ": unknown key '" + key + "'");
    }
    if (flag_given(args, flag)) continue;
    if (value.is_array()) {
      const bool list_option = sub.get_option(flag)->get_expected_max() > 1;
      if (list_option) {
        merged.push_back(flag);
        for (const auto& item : value) merged.push_back(json_scalar(item));
      } else {
        std::string joined;
        for (const auto& item : value) {
          if (!joined.empty()) joined += ",";
          joined += json_scalar(item);
        }
        merged.push_back(flag);
        merged.push_back(joined);
      }
    } else {
      merged.push_back(flag);
      merged.push_back(json_scalar(value));
    }
  }
  return merged;
}

// ---- commands --------------------------------------------------------------

json cmd_synth(const SynthFlags& f) {
  SyntheticSpec spec;
  try {
    spec.mode = parse_synthetic_mode(f.mode);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  spec.n = f.n;
  spec.d = f.d;
  spec.clusters = f.c;
  spec.sigma = f.sigma;
  spec.seed = Seed{f.seed};
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  const SyntheticData data = generate_synthetic(spec);
  io::EmbeddingFormat format = io::format_for_path(f.out);
  if (f.format == "binary") {
    format = io::EmbeddingFormat::Binary;
  } else if (f.format == "csv") {
    format = io::EmbeddingFormat::Csv;
  } else if (f.format != "auto") {
    throw ConfigError("--format must be auto, binary or csv");
  }
  io::write_embeddings(data.set, f.out, format);
  const std::string sidecar = f.out + ".labels.json";
  const json labels{{"mode", to_string(spec.mode)}, {"n", spec.n},       {"d", spec.d},
                    {"clusters", spec.clusters},     {"sigma", spec.sigma}, {"seed", spec.seed.value},
                    {"labels", data.labels}};
  io::write_text(sidecar, labels.dump(2) + "\n");
  return json{{"outputs", {f.out, sidecar}}};
}

struct SelectJob {
  fs::path input;
  fs::path out;
  std::optional<fs::path> trace;
};

void run_select_job(const SelectJob& job, std::size_t m, const RatioWeights& weights,
                    const CssParams& params, Seed seed) {
  const EmbeddingSet set = io::read_embeddings(job.input);
  if (m > set.n()) {
    fail(ErrorCode::BudgetExceedsItems,
         "--m " + std::to_string(m) + " exceeds the file's " + std::to_string(set.n()) + " items");
  }
  std::string trace_text;
  TraceSink sink;
  if (job.trace) {
    sink = [&](const TraceRecord& r) { trace_text += io::trace_record_to_json(r) + "\n"; };
  }
  const SelectionResult result = css_select(set, m, weights, params, seed, sink);
  io::write_selection(result, job.out);
  if (job.trace) io::write_text(*job.trace, trace_text);
}

json cmd_select(const SelectFlags& f) {
  if (f.m == 0) throw ConfigError("--m must be positive");
  const CssParams params = f.css.params();
  const RatioWeights weights = f.css.ratio_weights();
  const Seed seed{f.css.seed};

  std::vector<SelectJob> jobs;
  const bool many = f.inputs.size() > 1;
  if (many) {
    std::error_code ec;
    fs::create_directories(f.out, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create output directory " + f.out);
    if (!f.trace.empty()) {
      fs::create_directories(f.trace, ec);
      if (ec) fail(ErrorCode::IoError, "cannot create trace directory " + f.trace);
    }
  }
  for (const auto& input : f.inputs) {
    SelectJob job;
    job.input = input;
    const std::string stem = fs::path(input).stem().string();
    job.out = many ? fs::path(f.out) / (stem + ".selection.json") : fs::path(f.out);
    if (!f.trace.empty()) {
      job.trace = many ? fs::path(f.trace) / (stem + ".trace.jsonl") : fs::path(f.trace);
    }
    jobs.push_back(std::move(job));
  }

  std::vector<std::optional<CommandFailure>> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        run_select_job(jobs[i], f.m, weights, params, seed);
      } catch (const Error& e) {
        failures[i] = CommandFailure{exit_code_for(e.code()), jobs[i].input.string() + ": " + e.what()};
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(f.threads, 1, jobs.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& failure : failures) {
    if (failure) throw *failure;
  }

  json outputs = json::array();
  for (const auto& job : jobs) outputs.push_back(job.out.string());
  return json{{"outputs", outputs}};
}

json cmd_huq(const HuqFlags& f) {
  if (f.q == 0) throw ConfigError("--q must be positive");
  const auto triples = io::read_prob_csv(f.probs);
  std::vector<huq::UncertaintyRecord> records;
  records.reserve(triples.size());
  for (std::size_t i = 0; i < triples.size(); ++i) {
    try {
      records.push_back(huq::hybrid_score(triples[i]));
    } catch (const Error& e) {
      throw CommandFailure{exit_code_for(e.code()),
                           f.probs + " row " + std::to_string(i + 1) + ": " + e.what()};
    }
  }
  json rec_json = json::array();
  for (const auto& r : records) {
    rec_json.push_back({{"id", r.id},
                        {"d_dis", r.d_dis},
                        {"entropy", r.entropy},
                        {"u", r.u},
                        {"predicted", r.predicted},
                        {"label", r.label ? json(*r.label) : json(nullptr)}});
  }
  json doc{{"records", rec_json}};
  const bool labeled = !records.empty() && std::all_of(records.begin(), records.end(),
                                                       [](const auto& r) { return r.label.has_value(); });
  const bool binary = !triples.empty() && triples.front().p.size() == 2;
  json status;
  if (labeled && binary) {
    const huq::RecallMis s = huq::recall_mis(records, f.q);
    doc["summary"] = {{"recall_mis", s.value}, {"q", s.q},
                      {"FN", s.fn},            {"FP", s.fp},
                      {"FN_prime", s.fn_prime}, {"FP_prime", s.fp_prime},
                      {"no_misdiagnoses", s.degenerate}};
    status["recall_mis"] = s.value;
  }
  io::write_text(f.out, doc.dump(2) + "\n");
  status["outputs"] = {f.out};
  return status;
}

json cmd_toy(const ToyFlags& f, std::ostream& err) {
  if (f.grid < 2) throw ConfigError("--grid must be at least 2");
  if (!(f.extent > 0.0)) throw ConfigError("--extent must be positive");
  const Seed seed{f.seed};
  const auto data = huq::make_two_blobs(f.n, f.separation, f.sigma, seed.derive(100));
  huq::ToyTrainOptions options;
  options.epochs = f.epochs;
  options.learning_rate = f.lr;
  options.init_scale = f.init_scale;
  const auto trained = huq::toy_train(data, options, seed);
  const auto& model = trained.model;

  std::error_code ec;
  fs::create_directories(f.out, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory " + f.out);

  std::string loss_csv = "epoch,main,auxiliary,discrepancy,total\n";
  for (std::size_t e = 0; e < trained.history.size(); ++e) {
    const auto& l = trained.history[e];
    loss_csv += json(e).dump() + "," + json(l.main).dump() + "," + json(l.auxiliary).dump() +
                "," + json(l.discrepancy).dump() + "," + json(l.total()).dump() + "\n";
  }

  std::vector<huq::Point2> grid;
  std::string grid_csv = "x,y,p_1,d_dis,entropy,u\n";
  for (std::size_t iy = 0; iy < f.grid; ++iy) {
    for (std::size_t ix = 0; ix < f.grid; ++ix) {
      const double step = 2.0 * f.extent / static_cast<double>(f.grid - 1);
      const huq::Point2 x{-f.extent + step * static_cast<double>(ix),
                          -f.extent + step * static_cast<double>(iy)};
      grid.push_back(x);
      const auto p = model.g.probs(x);
      const double d = huq::discrepancy(p, model.g1.probs(x), model.g2.probs(x));
      const double h = huq::entropy(p);
      grid_csv += json(x.x).dump() + "," + json(x.y).dump() + "," + json(p[1]).dump() + "," +
                  json(d).dump() + "," + json(h).dump() + "," + json(d + h).dump() + "\n";
    }
  }
  const auto stats = huq::boundary_concentration(model, grid);
  const double accuracy = huq::toy_accuracy(model.g, data);
  auto opt_json = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  auto classifier_json = [](const huq::LinearClassifier& c) {
    return json{{"w", c.w}, {"b", c.b}};
  };
  const json summary{{"epochs", f.epochs},
                     {"learning_rate", f.lr},
                     {"init_scale", f.init_scale},
                     {"seed", f.seed},
                     {"accuracy", accuracy},
                     {"near_mean_u", opt_json(stats.near_mean)},
                     {"far_mean_u", opt_json(stats.far_mean)},
                     {"near_count", stats.near_count},
                     {"far_count", stats.far_count},
                     {"ratio", opt_json(stats.ratio())},
                     {"final_loss", trained.history.back().total()},
                     {"model",
                      {{"g", classifier_json(model.g)},
                       {"g1", classifier_json(model.g1)},
                       {"g2", classifier_json(model.g2)}}}};
  if (!stats.near_mean || !stats.far_mean) {
    err << "toy: boundary statistic undefined (empty band)\n";
  }
  const fs::path dir(f.out);
  io::write_text(dir / "loss_history.csv", loss_csv);
  io::write_text(dir / "grid.csv", grid_csv);
  io::write_text(dir / "summary.json", summary.dump(2) + "\n");
  return json{{"outputs",
               {(dir / "loss_history.csv").string(), (dir / "grid.csv").string(),
                (dir / "summary.json").string()}},
              {"ratio", opt_json(stats.ratio())}};
}

json cmd_bench(const BenchFlags& f, std::ostream& err) {
  BenchConfig config;
  config.sizes = parse_size_list(f.sizes, "sizes");
  config.reps = std::max<std::size_t>(f.reps, 1);
  config.d = f.d;
  config.m = f.m;
  config.blobs = f.blobs;
  config.sigma = f.sigma;
  config.params = f.css.params();
  const RatioWeights weights = f.css.ratio_weights();
  config.weights.assign(weights.values().begin(), weights.values().end());
  config.seed = Seed{f.css.seed};
  if (config.m == 0 || config.d == 0) throw ConfigError("--m and --d must be positive");
  for (std::size_t n : config.sizes) {
    if (config.m > n) throw ConfigError("--m exceeds bench size " + std::to_string(n));
  }
  const BenchReport report = run_bench(config);
  if (report.timer_too_coarse) err << "bench: timer resolution is coarse relative to run times\n";
  io::write_text(f.out, bench_report_to_json(report, config));
  if (!f.snapshot.empty()) {
    SyntheticSpec spec;
    spec.n = config.sizes.back();
    spec.d = config.d;
    spec.clusters = std::min(config.blobs, spec.n);
    spec.sigma = config.sigma;
    spec.seed = config.seed.derive(config.sizes.size() - 1);
    const auto data = generate_synthetic(spec);
    HnswIndex::build(data.set.view(), config.params.hnsw, config.seed).save(f.snapshot);
  }
  return json{{"outputs", {f.out}}, {"slope", report.slope}};
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return kExitConfig;
    case ErrorCode::IoError:
    case ErrorCode::BadMagic:
    case ErrorCode::UnsupportedVersion:
    case ErrorCode::TruncatedFile:
    case ErrorCode::TrailingData:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaViolation:
    case ErrorCode::NonFiniteEntry:
    case ErrorCode::ZeroVectorRow:
      return kExitIo;
    default:
      return kExitConstraint;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Representative subset selection and hybrid uncertainty scoring"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_help_all_flag("--help-all");

  SynthFlags synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic embeddings");
  synth_cmd->add_option("--mode", synth.mode, "blobs, prototypes or uniform-sphere")->capture_default_str();
  synth_cmd->add_option("--n", synth.n, "Item count")->capture_default_str();
  synth_cmd->add_option("--d", synth.d, "Dimensionality")->capture_default_str();
  synth_cmd->add_option("--c", synth.c, "Blob or prototype count")->capture_default_str();
  synth_cmd->add_option("--sigma", synth.sigma, "Blob noise")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--format", synth.format, "auto, binary or csv")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output path")->required();

  SelectFlags select;
  auto* select_cmd = app.add_subcommand("select", "Select a representative, diverse subset");
  select_cmd->add_option("--input", select.inputs, "Embedding files")->required()->expected(1, -1);
  select_cmd->add_option("--m", select.m, "Total selection budget")->required();
  select.css.add_to(*select_cmd);
  select_cmd->add_option("--out", select.out, "Output file, or directory for several inputs")->required();
  select_cmd->add_option("--trace", select.trace, "Selection trace (JSON lines)");
  select_cmd->add_option("--threads", select.threads, "Worker threads")->capture_default_str();

  HuqFlags huq_flags;
  auto* huq_cmd = app.add_subcommand("huq", "Score hybrid uncertainty from probability tables");
  huq_cmd->add_option("--probs", huq_flags.probs, "Probability CSV")->required();
  huq_cmd->add_option("--q", huq_flags.q, "Top-q for misdiagnosis recall")->capture_default_str();
  huq_cmd->add_option("--out", huq_flags.out, "Output JSON")->required();

  ToyFlags toy;
  auto* toy_cmd = app.add_subcommand("toy", "Train the toy discrepancy model");
  toy_cmd->add_option("--epochs", toy.epochs, "Gradient steps")->capture_default_str();
  toy_cmd->add_option("--lr", toy.lr, "Learning rate")->capture_default_str();
  toy_cmd->add_option("--init-scale", toy.init_scale, "Auxiliary init scale")->capture_default_str();
  toy_cmd->add_option("--seed", toy.seed, "Seed")->capture_default_str();
  toy_cmd->add_option("--n", toy.n, "Training points")->capture_default_str();
  toy_cmd->add_option("--separation", toy.separation, "Blob center offset")->capture_default_str();
  toy_cmd->add_option("--sigma", toy.sigma, "Blob spread")->capture_default_str();
  toy_cmd->add_option("--grid", toy.grid, "Grid points per axis")->capture_default_str();
  toy_cmd->add_option("--extent", toy.extent, "Grid half-width")->capture_default_str();
  toy_cmd->add_option("--out", toy.out, "Output directory")->required();

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "Measure selection time scaling");
  bench_cmd->add_option("--sizes", bench.sizes, "Comma-separated item counts")->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps, "Repetitions per size")->capture_default_str();
  bench_cmd->add_option("--d", bench.d, "Dimensionality")->capture_default_str();
  bench_cmd->add_option("--m", bench.m, "Selection budget")->capture_default_str();
  bench_cmd->add_option("--blobs", bench.blobs, "Blob count in the generated data")->capture_default_str();
  bench_cmd->add_option("--sigma", bench.sigma, "Blob noise")->capture_default_str();
  bench.css.add_to(*bench_cmd);
  bench_cmd->add_option("--out", bench.out, "Report JSON")->required();
  bench_cmd->add_option("--snapshot", bench.snapshot, "Write an HNSW snapshot of the largest size");

  for (auto* sub : {synth_cmd, select_cmd, huq_cmd, toy_cmd, bench_cmd}) {
    sub->add_option("--config", "JSON config; flags override its values");
  }

  const std::string command = args.empty() ? "" : args.front();
  auto status = [&](const std::string& state, int code, json extra) {
    extra["command"] = command;
    extra["status"] = state;
    extra["exit_code"] = code;
    out << extra.dump() << "\n";
    return code;
  };

  try {
    std::vector<std::string> merged = args;
    if (!args.empty()) {
      if (auto* sub = app.get_subcommand_no_throw(args.front())) {
        merged = merge_config(args, *sub);
      }
    }
    std::reverse(merged.begin(), merged.end());
    app.parse(merged);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return status("error", kExitConfig, json::object());
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return status("error", kExitConfig, json::object());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return status("error", exit_code_for(e.code()), json::object());
  }

  try {
    json result;
    if (*synth_cmd) result = cmd_synth(synth);
    if (*select_cmd) result = cmd_select(select);
    if (*huq_cmd) result = cmd_huq(huq_flags);
    if (*toy_cmd) result = cmd_toy(toy, err);
    if (*bench_cmd) result = cmd_bench(bench, err);
    return status("ok", kExitOk, result);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return status("error", kExitConfig, json::object());
  } catch (const CommandFailure& e) {
    err << "error: " << e.message << "\n";
    return status("error", e.code, json::object());
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return status("error", exit_code_for(e.code()), json::object());
  }
}

}  // namespace coresel::cli
