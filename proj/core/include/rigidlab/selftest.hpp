#pragma once

#include "rigidlab/numeric_core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace rigidlab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0 when the criterion has no time limit
  double worst = 0.0;           // largest residual or deviation observed
  double bound = 0.0;           // tolerance `worst` is held to
  int trials = 0;
  std::string detail;
};

struct SelftestOptions {
  std::uint64_t seed = 7;
  std::int64_t samples = 1000000;  // Monte Carlo samples per estimate
  Tolerances tol;
};

constexpr int kCriterionCount = 10;

/// Runs one acceptance criterion, 1..10. Exceptions raised inside a criterion
/// mark it failed with the message in `detail`.
CriterionResult run_criterion(int id, const SelftestOptions& opt = {});

/// All criteria in order, or only those listed.
std::vector<CriterionResult> run_acceptance(const SelftestOptions& opt = {}, const std::vector<int>& only = {});

/// "criterion 3 PASS  circulant spectra  worst 1.2e-15 <= 1e-10  (60 trials, 0.01 s)".
std::string format_line(const CriterionResult& r);

}  // namespace rigidlab
