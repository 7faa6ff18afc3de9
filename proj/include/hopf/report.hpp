#pragma once

// Per-shape verification suites and their JSON / CSV serialization.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hopf/corpus.hpp"
#include "hopf/degree.hpp"

namespace hopf::report {

inline constexpr const char* kToolVersion = "hopflab 0.1.0";
inline constexpr int kSchema = 1;

struct VerifyOptions {
  std::uint64_t seed = 1;
  double tol = 0.1;              // accepted |value - rounded| when an estimator's own bar is smaller
  std::vector<int> grid;         // quadrature override; empty = shape default
  int preimage_grid = 64;
  int lemma1_points = 200;
  int tpf_points = 24;           // closedness / naturality sample points
  bool timings = false;
};

struct ChiOracle {
  std::string quantity;  // "chi_H" or "chi_W"
  std::string method;    // annotation provenance or "morse"
  int value = 0;
  int expected = 0;
  bool pass() const { return value == expected; }
};

/// A scalar check against a fixed bound: pass iff value <= limit.
struct Check {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool pass() const { return value <= limit; }
};

struct TpfChecks {
  double integral = 0.0;
  double expected = 0.0;  // -chi(W)
  std::optional<double> closedness;
  std::optional<double> naturality;
};

struct ShapeReport {
  corpus::ShapeRecord record;
  std::string parity_case;  // "odd: chi(H)/2" or "even: chi(W)"
  int expected_degree = 0;
  std::vector<degree::DegreeEstimate> estimates;
  std::vector<ChiOracle> chi;
  std::vector<Check> checks;
  std::optional<double> lemma1_max;
  std::optional<TpfChecks> tpf;
  std::vector<std::string> failures;
  double seconds = 0.0;

  /// Estimator verdict: every estimate rounds to the expected degree within
  /// max(error, tol).
  bool degree_pass = false;
  bool pass() const { return failures.empty(); }
};

struct Report {
  std::uint64_t seed = 1;
  double tol = 0.1;
  bool timings = false;
  std::vector<ShapeReport> shapes;

  bool pass() const;
};

bool estimate_matches(const degree::DegreeEstimate& e, int expected, double tol);

/// Sets degree_pass and appends a failure for every estimate, oracle or
/// check that does not match.
void finalize(ShapeReport& r, double tol);

/// Runs the estimator suite for one shape. Computation errors are recorded as
/// failures, never thrown.
ShapeReport verify_shape(const corpus::Shape& shape, const VerifyOptions& options);

/// Builds and verifies every entry (shapes in parallel, results in input
/// order). Input errors from build() propagate.
Report verify_all(const std::vector<corpus::ConfigEntry>& entries, const VerifyOptions& options);

std::string to_json(const Report& r);
std::string to_csv(const Report& r);

/// %.17g rendering shared by JSON and CSV; non-finite values become null / empty.
std::string format_number(double x);

}  // namespace hopf::report
