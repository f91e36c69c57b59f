#pragma once

#include "msdiff/mixture.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace msdiff {

enum class SuiteStatus { Pass, Fail, ExpectedFailure, Skipped };

struct SuiteRow {
  std::string name;
  SuiteStatus status{SuiteStatus::Pass};
  std::string detail;
};

std::string_view to_string(SuiteStatus status);

/// Runs the pointwise property checks for `spec` over `samples` random
/// interior compositions drawn from `seed`. Loss of convexity is reported as
/// an expected failure, not an error.
std::vector<SuiteRow> run_property_suite(const MixtureSpec& spec, std::uint64_t seed, std::size_t samples);

}  // namespace msdiff
