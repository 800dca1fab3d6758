#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pcond/config.hpp"

namespace pcond::acceptance {

struct SubCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<SubCheck> checks;
  double seconds = 0.0;
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

/// Criteria ids relevant to a CLI method (for `verify`).
std::vector<int> criteria_for_method(io::Method m);

CriterionResult run_criterion(int id, int threads = 1);
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, int threads = 1);

/// All criterion ids in order.
std::vector<int> all_criteria();

}  // namespace pcond::acceptance
