#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmelab/report.hpp"

namespace pmelab {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  /// One line of the key numbers behind the verdict.
  std::string summary;
  /// Serialized JSON object with every measured quantity.
  std::string details_json;
};

struct SuiteOptions {
  std::uint64_t seed = 1;
  ToleranceModel tolerance;
  /// Criteria to evaluate (1 to 10); empty selects all.
  std::vector<int> criteria;
};

/// Evaluates the acceptance criteria in id order. Independent simulations run
/// concurrently (see thread_limit()); results do not depend on the thread count.
std::vector<CriterionResult> run_verification_suite(const SuiteOptions& options = {});

/// Writes criteria.csv (id,title,pass,summary) and suite.json into `directory`.
/// Neither file contains timings, so repeated runs are byte-identical.
void write_suite_reports(const std::vector<CriterionResult>& results, const std::string& directory);

}  // namespace pmelab
