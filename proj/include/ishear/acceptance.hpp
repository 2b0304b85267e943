#pragma once
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ishear/execution.hpp"

namespace ishear::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string measured;
  std::string expected;
  double runtime_s = 0.0;
  std::string note;
};

struct SuiteOptions {
  // Multiplies the reference cooling rate in the Haff-law check; 1.1 is the
  // negative control that must make criterion 7 fail.
  double zeta_scale = 1.0;
  std::uint64_t seed = 24301;
  Exec exec = Exec::parallel;
  std::vector<int> only;  // empty: all criteria
};

constexpr int kCriterionCount = 11;

std::string criterion_name(int id);
CriterionResult run_criterion(int id, const SuiteOptions& opt);

// Runs the selected criteria in order; on_result is called after each.
std::vector<CriterionResult> run_suite(const SuiteOptions& opt,
                                       const std::function<void(const CriterionResult&)>& on_result = {});

}  // namespace ishear::acceptance
