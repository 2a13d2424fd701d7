#pragma once

// Verification suites: each runs a documented default sweep, asserts the
// invariants it owns and reports everything else.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace ect {

struct VerifyOptions {
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct SuiteReport {
  std::string suite;
  bool passed = true;           // every asserted check passed
  nlohmann::ordered_json data;  // deterministic for fixed options
  std::string text;             // human-readable summary
};

std::vector<std::string> suite_names();

// Throws InvalidArgument for an unknown suite.
SuiteReport run_suite(const std::string& name, const VerifyOptions& opts = {});

}  // namespace ect
