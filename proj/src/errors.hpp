#pragma once

#include <stdexcept>
#include <string>

namespace pdmp {

// Argument misuse is reported with std::invalid_argument directly.

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input file; message carries file:row:column where known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model is structurally unusable (missing calibration, zero amplitude, ...).
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pdmp
