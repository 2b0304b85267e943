#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ishear::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr std::uint64_t kDefaultSeed = 24301;
// Default output directory when --output-dir is not given.
inline constexpr const char* kOutputDirEnv = "ISHEAR_OUTPUT_DIR";

enum ExitCode { kOk = 0, kNumericalFailure = 1, kConfigError = 2 };

// Entry point shared by the executable and the tests; args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ishear::cli
