#pragma once

#include <stdexcept>
#include <string>

namespace scalemix {

// A matrix that was required to be symmetric positive definite is not.
struct NotSpdError : std::runtime_error {
  explicit NotSpdError(const std::string& what) : std::runtime_error(what) {}
};

// Weighted design has collapsed (zero/negative weights or a singular
// weighted cross-product), so the conditional draws are undefined.
struct DegenerateWeightsError : std::runtime_error {
  explicit DegenerateWeightsError(const std::string& what) : std::runtime_error(what) {}
};

// The requested operation is outside the supported parameter regime.
struct UnsupportedCaseError : std::runtime_error {
  explicit UnsupportedCaseError(const std::string& what) : std::runtime_error(what) {}
};

// The numerator integral of the key moment ratio diverges, so the ratio
// is +infinity for every tilt.
struct RatioInfiniteError : std::runtime_error {
  explicit RatioInfiniteError(const std::string& what) : std::runtime_error(what) {}
};

// Configuration text could not be parsed; carries the 1-based line number.
struct ConfigError : std::runtime_error {
  ConfigError(int line_number, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line_number) + ": " + what),
        line(line_number) {}
  int line;
};

}  // namespace scalemix
