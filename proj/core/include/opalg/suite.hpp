#pragma once

#include <string>
#include <vector>

#include "opalg/types.hpp"

namespace opalg {

struct SuiteEntry {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct SuiteReport {
  std::vector<SuiteEntry> entries;
  bool all_passed() const {
    for (const SuiteEntry& e : entries)
      if (!e.passed) return false;
    return true;
  }
};

struct SuiteConfig {
  unsigned long long seed = 1;
  int samples = 50;
  // Residual tolerances can be tightened wholesale for stress runs.
  double tol_scale = 1.0;
};

// Runs every module's named invariants on the bundled demo models.
SuiteReport run_suite(const SuiteConfig& config);

std::string suite_report_json(const SuiteReport& report);

}  // namespace opalg
