#include "coresel/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "byte_io.hpp"

namespace coresel::io {

using nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

// Parses a real; "nan"/"inf" parse successfully and are rejected by callers.
bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string knn_name(KnnBackend backend) {
  return backend == KnnBackend::Hnsw ? "hnsw" : "brute";
}

KnnBackend knn_from_name(const std::string& name) {
  if (name == "hnsw") return KnnBackend::Hnsw;
  if (name == "brute") return KnnBackend::BruteForce;
  fail(ErrorCode::SchemaViolation, "unknown knn backend '" + name + "'");
}

json params_to_json(const CssParams& p) {
  return json{{"k", p.k},
              {"alpha", p.alpha},
              {"beta", p.beta},
              {"lambda", p.lambda},
              {"T", p.T},
              {"h", p.h},
              {"epsilon", p.epsilon},
              {"knn", knn_name(p.backend)},
              {"hnsw",
               {{"M", p.hnsw.M},
                {"ef_construction", p.hnsw.ef_construction},
                {"ef_search", p.hnsw.ef_search}}},
              {"kmeans",
               {{"max_iter", p.kmeans.max_iter},
                {"tol", p.kmeans.tol},
                {"init", p.kmeans.init == KMeansInit::PlusPlus ? "kmeans++" : "random"}}}};
}

CssParams params_from_json(const json& j) {
  CssParams p;
  p.k = j.at("k").get<std::size_t>();
  p.alpha = j.at("alpha").get<double>();
  p.beta = j.at("beta").get<double>();
  p.lambda = j.at("lambda").get<double>();
  p.T = j.at("T").get<std::size_t>();
  p.h = j.at("h").get<std::size_t>();
  p.epsilon = j.at("epsilon").get<double>();
  p.backend = knn_from_name(j.at("knn").get<std::string>());
  const auto& hn = j.at("hnsw");
  p.hnsw.M = hn.at("M").get<std::size_t>();
  p.hnsw.ef_construction = hn.at("ef_construction").get<std::size_t>();
  p.hnsw.ef_search = hn.at("ef_search").get<std::size_t>();
  const auto& km = j.at("kmeans");
  p.kmeans.max_iter = km.at("max_iter").get<std::size_t>();
  p.kmeans.tol = km.at("tol").get<double>();
  const auto init = km.at("init").get<std::string>();
  if (init != "random" && init != "kmeans++") {
    fail(ErrorCode::SchemaViolation, "unknown kmeans init '" + init + "'");
  }
  p.kmeans.init = init == "kmeans++" ? KMeansInit::PlusPlus : KMeansInit::RandomItems;
  return p;
}

void check_selection(const SelectionResult& r) {
  auto bad = [](const std::string& what) { fail(ErrorCode::SchemaViolation, what); };
  if (r.selected_indices.size() != r.m) bad("selected_indices has size != m");
  for (std::size_t i = 0; i < r.selected_indices.size(); ++i) {
    if (r.selected_indices[i] >= r.n) bad("selected index out of range");
    if (i > 0 && r.selected_indices[i] == r.selected_indices[i - 1]) bad("duplicate selected index");
    if (i > 0 && r.selected_indices[i] < r.selected_indices[i - 1]) bad("selected_indices not sorted");
  }
  std::size_t cursor = 0;
  std::size_t budget = 0;
  for (const auto& s : r.plan.segments) {
    if (s.start != cursor || s.end < s.start) bad("plan segments are not contiguous");
    if (s.budget > s.length()) bad("segment budget exceeds its length");
    cursor = s.end;
    budget += s.budget;
  }
  if (cursor != r.n) bad("plan does not cover all items");
  if (budget != r.m) bad("plan budgets do not sum to m");
  if (r.per_segment.size() != r.plan.segments.size()) bad("per_segment does not match plan");
  std::vector<std::size_t> merged;
  for (std::size_t s = 0; s < r.per_segment.size(); ++s) {
    const auto& seg = r.plan.segments[s];
    if (r.per_segment[s].size() != seg.budget) bad("segment selection size != budget");
    for (std::size_t item : r.per_segment[s]) {
      if (item < seg.start || item >= seg.end) bad("selected index outside its segment");
      merged.push_back(item);
    }
  }
  std::sort(merged.begin(), merged.end());
  if (merged != r.selected_indices) bad("per_segment does not match selected_indices");
  try {
    r.params.validate();
    RatioWeights check(r.weights);
    (void)check;
  } catch (const Error& e) {
    bad(e.what());
  }
}

}  // namespace

EmbeddingFormat format_for_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".csv" ? EmbeddingFormat::Csv : EmbeddingFormat::Binary;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) fail(ErrorCode::IoError, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) fail(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) fail(ErrorCode::IoError, "write failed: " + path.string());
}

std::vector<char> encode_embeddings(std::size_t n, std::size_t d,
                                    const std::vector<float>& values) {
  std::vector<char> out(std::begin(kEmbeddingMagic), std::end(kEmbeddingMagic));
  out.reserve(24 + values.size() * 4);
  detail::put_le<std::uint32_t>(out, kEmbeddingVersion);
  detail::put_le<std::uint64_t>(out, n);
  detail::put_le<std::uint64_t>(out, d);
  for (float v : values) detail::put_le<float>(out, v);
  return out;
}

EmbeddingSet read_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  const std::string text = read_text(path);
  const std::string id = path.stem().string();
  if (format == EmbeddingFormat::Binary) {
    detail::ByteReader in(text.data(), text.size(), path.string());
    char magic[4];
    if (text.size() < 4) fail(ErrorCode::BadMagic, path.string() + " is too short");
    in.get_bytes(magic, 4);
    if (!std::equal(std::begin(magic), std::end(magic), std::begin(kEmbeddingMagic))) {
      fail(ErrorCode::BadMagic, path.string() + " does not start with CSSF");
    }
    if (const auto version = in.get<std::uint32_t>(); version != kEmbeddingVersion) {
      fail(ErrorCode::UnsupportedVersion, path.string() + " has version " + std::to_string(version));
    }
    const auto n = in.get<std::uint64_t>();
    const auto d = in.get<std::uint64_t>();
    if (n == 0 || d == 0) fail(ErrorCode::ParseError, path.string() + " declares an empty matrix");
    if (d > std::numeric_limits<std::uint64_t>::max() / 4 / n) {
      fail(ErrorCode::ParseError, path.string() + " declares an impossibly large matrix");
    }
    const std::uint64_t payload = n * d * 4;
    if (in.remaining() < payload) {
      fail(ErrorCode::TruncatedFile, path.string() + " holds " + std::to_string(in.remaining() / 4) +
                                         " of " + std::to_string(n * d) + " values");
    }
    if (in.remaining() > payload) {
      fail(ErrorCode::TrailingData, path.string() + " has bytes after the declared matrix");
    }
    std::vector<float> values(n * d);
    for (auto& v : values) v = in.get<float>();
    return EmbeddingSet::from_rows(id, n, d, std::move(values));
  }

  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCode::ParseError, path.string() + " is empty");
  std::vector<float> values;
  std::size_t d = 0;
  for (std::size_t row = 0; row < lines.size(); ++row) {
    const auto fields = split_fields(lines[row]);
    if (row == 0) d = fields.size();
    if (fields.size() != d) {
      fail(ErrorCode::ParseError, path.string() + " row " + std::to_string(row) + " has " +
                                      std::to_string(fields.size()) + " columns, expected " +
                                      std::to_string(d));
    }
    for (const auto& f : fields) {
      double v = 0.0;
      if (!parse_double(f, v)) {
        fail(ErrorCode::ParseError, path.string() + " row " + std::to_string(row) +
                                        ": cannot parse '" + f + "'");
      }
      if (!std::isfinite(v) || !std::isfinite(static_cast<float>(v))) {
        fail(ErrorCode::NonFiniteEntry, path.string() + " row " + std::to_string(row));
      }
      values.push_back(static_cast<float>(v));
    }
  }
  return EmbeddingSet::from_rows(id, lines.size(), d, std::move(values));
}

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  return read_embeddings(path, format_for_path(path));
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                      EmbeddingFormat format) {
  if (format == EmbeddingFormat::Binary) {
    const std::vector<float> values(set.data().begin(), set.data().end());
    const auto bytes = encode_embeddings(set.n(), set.d(), values);
    write_text(path, std::string(bytes.begin(), bytes.end()));
    return;
  }
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < set.n(); ++i) {
    const auto row = set.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      // Shortest representation that round-trips the float exactly.
      const auto res = std::to_chars(buf, buf + sizeof(buf), row[j]);
      if (j > 0) out.push_back(',');
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  write_text(path, out);
}

std::string selection_to_json(const SelectionResult& r) {
  json plan = json::array();
  for (const auto& s : r.plan.segments) {
    plan.push_back({{"start", s.start}, {"end", s.end}, {"budget", s.budget}});
  }
  const json j{{"sequence_id", r.sequence_id},
               {"n", r.n},
               {"m", r.m},
               {"weights", r.weights},
               {"plan", plan},
               {"selected_indices", r.selected_indices},
               {"per_segment", r.per_segment},
               {"params", params_to_json(r.params)},
               {"seed", r.seed.value}};
  return j.dump(2) + "\n";
}

SelectionResult selection_from_json(const std::string& text) {
  SelectionResult r;
  try {
    const json j = json::parse(text);
    r.sequence_id = j.at("sequence_id").get<std::string>();
    r.n = j.at("n").get<std::size_t>();
    r.m = j.at("m").get<std::size_t>();
    r.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& s : j.at("plan")) {
      r.plan.segments.push_back({s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>(),
                                 s.at("budget").get<std::size_t>()});
    }
    r.selected_indices = j.at("selected_indices").get<std::vector<std::size_t>>();
    r.per_segment = j.at("per_segment").get<std::vector<std::vector<std::size_t>>>();
    r.params = params_from_json(j.at("params"));
    r.seed = Seed{j.at("seed").get<std::uint64_t>()};
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation, e.what());
  }
  check_selection(r);
  return r;
}

void write_selection(const SelectionResult& result, const std::filesystem::path& path) {
  check_selection(result);
  write_text(path, selection_to_json(result));
}

SelectionResult read_selection(const std::filesystem::path& path) {
  return selection_from_json(read_text(path));
}

std::string trace_record_to_json(const TraceRecord& record) {
  json scores = json::array();
  for (double s : record.scores) {
    if (std::isfinite(s)) {
      scores.push_back(s);
    } else {
      scores.push_back(nullptr);
    }
  }
  const json j{{"segment", record.segment},
               {"t", record.t},
               {"selected", record.selected},
               {"scores", scores}};
  return j.dump();
}

std::vector<huq::ProbTriple> parse_prob_csv(const std::string& text) {
  const auto lines = split_lines(text);
  if (lines.empty()) fail(ErrorCode::ParseError, "probability table is empty");
  const auto header = split_fields(lines[0]);
  if (header.size() < 2 || header[0] != "id" || header[1] != "label" || (header.size() - 2) % 3 != 0) {
    fail(ErrorCode::ParseError, "header must be id,label,p_*,p1_*,p2_*");
  }
  const std::size_t k = (header.size() - 2) / 3;
  if (k < 2) fail(ErrorCode::ParseError, "probability table needs at least two classes");
  const char* prefixes[3] = {"p_", "p1_", "p2_"};
  for (std::size_t g = 0; g < 3; ++g) {
    for (std::size_t c = 0; c < k; ++c) {
      const std::string want = prefixes[g] + std::to_string(c);
      if (header[2 + g * k + c] != want) {
        fail(ErrorCode::ParseError, "header column " + std::to_string(2 + g * k + c) +
                                        " should be '" + want + "'");
      }
    }
  }

  std::vector<huq::ProbTriple> out;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto fields = split_fields(lines[row]);
    const std::string where = "row " + std::to_string(row);
    if (fields.size() != header.size()) {
      fail(ErrorCode::ParseError, where + " has " + std::to_string(fields.size()) + " columns");
    }
    huq::ProbTriple t;
    t.id = fields[0];
    if (!fields[1].empty()) {
      int label = 0;
      const auto [ptr, ec] =
          std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), label);
      if (ec != std::errc() || ptr != fields[1].data() + fields[1].size() || label < 0 ||
          static_cast<std::size_t>(label) >= k) {
        fail(ErrorCode::ParseError, where + ": bad label '" + fields[1] + "'");
      }
      t.label = label;
    }
    std::vector<double>* targets[3] = {&t.p, &t.p1, &t.p2};
    for (std::size_t g = 0; g < 3; ++g) {
      for (std::size_t c = 0; c < k; ++c) {
        double v = 0.0;
        if (!parse_double(fields[2 + g * k + c], v)) {
          fail(ErrorCode::ParseError, where + ": cannot parse '" + fields[2 + g * k + c] + "'");
        }
        targets[g]->push_back(v);
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<huq::ProbTriple> read_prob_csv(const std::filesystem::path& path) {
  return parse_prob_csv(read_text(path));
}

}  // namespace coresel::io
