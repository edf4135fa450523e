#include "coresel/huq.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <string>

#include "coresel/error.hpp"

namespace coresel::huq {

namespace {

constexpr double kSimplexTolerance = 1e-6;

void check_same_size(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    fail(ErrorCode::SimplexViolation, "probability vectors differ in length");
  }
}

double l1(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

}  // namespace

void check_simplex(std::span<const double> p) {
  if (p.size() < 2) fail(ErrorCode::SimplexViolation, "need at least two classes");
  double total = 0.0;
  for (double x : p) {
    if (!std::isfinite(x) || x < 0.0) {
      fail(ErrorCode::SimplexViolation, "entries must be finite and nonnegative");
    }
    total += x;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    fail(ErrorCode::SimplexViolation, "entries sum to " + std::to_string(total));
  }
}

double discrepancy(std::span<const double> p, std::span<const double> p1,
                   std::span<const double> p2) {
  check_same_size(p, p1);
  check_same_size(p, p2);
  check_simplex(p);
  check_simplex(p1);
  check_simplex(p2);
  const auto k = static_cast<double>(p.size());
  return (l1(p1, p) + l1(p2, p) + l1(p1, p2)) / k;
}

double entropy(std::span<const double> p) {
  check_simplex(p);
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

int argmax(std::span<const double> p) {
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

UncertaintyRecord hybrid_score(const ProbTriple& triple) {
  UncertaintyRecord record;
  record.id = triple.id;
  record.d_dis = discrepancy(triple.p, triple.p1, triple.p2);
  record.entropy = entropy(triple.p);
  record.u = record.d_dis + record.entropy;
  record.predicted = argmax(triple.p);
  record.label = triple.label;
  return record;
}

bool sample_id_less(const std::string& a, const std::string& b) {
  if (all_digits(a) && all_digits(b)) {
    const auto strip = [](const std::string& s) {
      const auto pos = s.find_first_not_of('0');
      return pos == std::string::npos ? std::string("0") : s.substr(pos);
    };
    const std::string sa = strip(a);
    const std::string sb = strip(b);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
  }
  return a < b;
}

RecallMis recall_mis(std::span<const UncertaintyRecord> records, std::size_t q) {
  RecallMis out;
  out.q = q;
  const auto is_fn = [](const UncertaintyRecord& r) { return *r.label == 1 && r.predicted == 0; };
  const auto is_fp = [](const UncertaintyRecord& r) { return *r.label == 0 && r.predicted == 1; };
  for (const auto& r : records) {
    if (!r.label) fail(ErrorCode::MissingLabels, "record " + r.id + " has no label");
    if (*r.label < 0 || *r.label > 1 || r.predicted < 0 || r.predicted > 1) {
      fail(ErrorCode::InvalidArgument, "misdiagnosis recall is defined for binary labels");
    }
    out.fn += is_fn(r) ? 1 : 0;
    out.fp += is_fp(r) ? 1 : 0;
  }
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (records[a].u != records[b].u) return records[a].u > records[b].u;
    return sample_id_less(records[a].id, records[b].id);
  });
  const std::size_t top = std::min(q, records.size());
  for (std::size_t i = 0; i < top; ++i) {
    const auto& r = records[order[i]];
    out.fn_prime += is_fn(r) ? 1 : 0;
    out.fp_prime += is_fp(r) ? 1 : 0;
  }
  if (out.fn + out.fp == 0) {
    out.degenerate = true;
    out.value = 1.0;
  } else {
    out.value = static_cast<double>(out.fn_prime + out.fp_prime) /
                static_cast<double>(out.fn + out.fp);
  }
  return out;
}

}  // namespace coresel::huq
