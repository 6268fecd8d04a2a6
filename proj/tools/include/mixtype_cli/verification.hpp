#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mixtype_cli/config.hpp"

namespace mixtype::cli {

/// Outcome of one acceptance check. `values` holds the measured numbers that
/// go into report.json; `seconds` is kept out of it.
struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> values;
  double seconds = 0.0;

  double value(const std::string& key) const;  // NaN when absent
};

/// Problem settings of the suite are fixed by the checks; the config supplies
/// the seed of the randomized ones.
std::vector<CheckResult> run_verification(const RunConfig& config,
                                          const std::function<void(const CheckResult&)>& progress = {});

}  // namespace mixtype::cli
