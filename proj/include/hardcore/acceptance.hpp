#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

namespace hardcore {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  double seconds = 0.0;
  double time_limit = 0.0;  // seconds; 0 when unlimited
  std::string detail;       // one-line summary of the measured values
  nlohmann::json metrics;
};

struct AcceptanceOptions {
  std::set<int> only;  // empty: all criteria
  std::uint64_t seed = 20240101;
  /// Called after each criterion, e.g. to print progress.
  std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kCriteriaCount = 11;

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

/// "[PASS] 3  title  (1.2 s)  detail"
std::string format_result(const CriterionResult& r);

}  // namespace hardcore
