#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cspca {

struct VerifyOptions {
  int trials = 10;
  std::uint64_t seed = 1;
  int max_dim = 12;
  /// Corrupts every solver update so the descent property must fail; used to
  /// exercise the failure path.
  bool inject_fault = false;
};

struct PropertyResult {
  std::string name;
  bool passed = true;
  int instances = 0;
  std::string detail;
  /// JSON description of the first failing instance (empty when passed).
  std::string replay;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;
  bool all_passed() const;
};

/// Runs the built-in battery: PCA/low-rank-regression equivalence, monotone
/// descent with stationarity, and invariance of the optimum across the seven
/// standard initializations.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace cspca
