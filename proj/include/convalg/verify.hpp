#pragma once

// Verification suites shared by the command line tool and the test programs.
// Every suite returns a JSON report with one record per check and an overall verdict.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "convalg/serialize.hpp"

namespace convalg {

struct SuiteConfig {
  int n = 2, d = 2, c = 1;
  Complex tau{0.0, 1.0};
  std::uint64_t seed = 7;
  double tol = 1e-8;
  double trunc = 2.0;  // truncation multiplier of the comparison run in truncation studies
  // which of the above were set explicitly; suites with sweeps use them to narrow the sweep
  bool n_set = false, d_set = false, c_set = false, tau_set = false;
};

struct SuiteResult {
  bool pass = false;
  Json report;
};

/// Full name for a suite name or alias, if known.
std::optional<std::string> canonical_suite(const std::string& name);
std::vector<std::string> suite_names();

/// Runs one suite. Throws std::out_of_range for unknown names and BoundExceeded when the
/// requested sizes are outside the supported range.
SuiteResult run_suite(const std::string& name, const SuiteConfig& cfg);

/// Structure constants of S(n, d) with the associativity verdict. n <= 3, d <= 4.
SuiteResult schur_report(int n, int d);

/// Random polynomial on a shape: up to `terms` orbit sums of total degree <= max_degree,
/// coefficients p/q with |p| <= 3, 1 <= q <= 2.
BlockSymFunction random_polynomial(const BlockShape& shape, int max_degree, std::mt19937_64& rng, int terms = 3);

/// Current UTC time, ISO 8601.
std::string iso_timestamp();

}  // namespace convalg
