#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "upieces/counting.hpp"

namespace upieces {

struct SuiteFailure {
  std::string property;           // the statement that was contradicted
  std::optional<Matrix> element;  // the offending unipotent, when there is one
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::string scope;  // e.g. "Sp_4(F_2)" or "q=2, d<=4"
  std::uint64_t checked = 0;
  std::uint64_t failure_count = 0;
  std::vector<SuiteFailure> failures;  // the first few, in enumeration order
  std::map<std::string, std::int64_t> stats;
  bool ok() const { return failure_count == 0; }
};

struct SuiteOptions {
  GroupSpec spec;
  /// Upper dimension for the f-recursion and construct suites (0: use spec.dim).
  std::size_t max_dim = 0;
  std::size_t sample = 200;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
};

/// Names accepted by run_suite.
const std::vector<std::string>& suite_names();

/// Runs one named invariant suite. Throws InvalidInput for an unknown suite
/// or a group the suite does not apply to, and ScaleExceeded.
SuiteResult run_suite(const std::string& name, const SuiteOptions& options);

/// Brute-force count of nondegenerate symmetric d x d matrices over F_q.
/// Throws ScaleExceeded above 2^24 candidate matrices.
std::int64_t count_sym_nondeg_brute(int d, int q);

}  // namespace upieces
