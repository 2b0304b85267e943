#pragma once
#include <stdexcept>
#include <string>

namespace ishear {

// Base for every failure the library reports. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : Error { using Error::Error; };
struct InvalidKernelError : Error { using Error::Error; };
struct DegenerateKernelError : Error { using Error::Error; };
struct AccuracyError : Error { using Error::Error; };
struct NoProfileError : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct NumericalFailure : Error { using Error::Error; };
struct InstabilityError : Error { using Error::Error; };
struct InterpolationRangeError : Error { using Error::Error; };

struct OverflowError : Error {
  OverflowError(const std::string& what, double rate) : Error(what), growth_rate(rate) {}
  double growth_rate;
};

struct OutsideContractionError : Error {
  OutsideContractionError(const std::string& what, double r) : Error(what), ratio(r) {}
  double ratio;
};

}  // namespace ishear
