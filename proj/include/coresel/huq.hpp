#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace coresel::huq {

/// Probability outputs for one sample: main classifier p, auxiliaries p1, p2.
struct ProbTriple {
  std::string id;
  std::optional<int> label;
  std::vector<double> p;
  std::vector<double> p1;
  std::vector<double> p2;
};

struct UncertaintyRecord {
  std::string id;
  double d_dis = 0.0;    // aleatoric proxy
  double entropy = 0.0;  // epistemic proxy
  double u = 0.0;        // d_dis + entropy
  int predicted = 0;
  std::optional<int> label;
};

/// Throws SimplexViolation unless p has >= 2 finite, nonnegative entries
/// summing to 1 within 1e-6.
void check_simplex(std::span<const double> p);

/// (1/K) (|p1 - p|_1 + |p2 - p|_1 + |p1 - p2|_1)
double discrepancy(std::span<const double> p, std::span<const double> p1,
                   std::span<const double> p2);

/// Natural-log entropy with 0 log 0 = 0.
double entropy(std::span<const double> p);

/// Argmax with ties to the lower class index.
int argmax(std::span<const double> p);

UncertaintyRecord hybrid_score(const ProbTriple& triple);

struct RecallMis {
  double value = 1.0;
  std::size_t q = 15;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::size_t fn_prime = 0;
  std::size_t fp_prime = 0;
  // No misdiagnoses at all; value is 1.0 by convention.
  bool degenerate = false;
};

/// Fraction of all misdiagnoses (binary, class 1 positive) that land among the
/// q highest-u records. Ties in u go to the lower sample id.
RecallMis recall_mis(std::span<const UncertaintyRecord> records, std::size_t q = 15);

/// Order used for sample ids: all-digit ids compare numerically, otherwise
/// lexicographically.
bool sample_id_less(const std::string& a, const std::string& b);

}  // namespace coresel::huq
