#pragma once

#include <string>

#include "errors.hpp"

namespace pdmp {

// How the second-order attractor is turned into a discrete-time update.
// PrintedA propagates velocity/position with the previous step's
// acceleration/velocity; SubstitutedEuler folds the current-step
// acceleration into the velocity update and the current-step velocity into
// the position update, matching the scalar Euler equations exactly.
enum class DiscretizationMode { PrintedA, SubstitutedEuler };

inline std::string to_string(DiscretizationMode mode) {
  return mode == DiscretizationMode::PrintedA ? "printed_a"
                                              : "substituted_euler";
}

inline DiscretizationMode discretization_mode_from_string(
    const std::string& s) {
  if (s == "printed_a") return DiscretizationMode::PrintedA;
  if (s == "substituted_euler") return DiscretizationMode::SubstitutedEuler;
  throw std::invalid_argument("unknown discretization mode: " + s);
}

}  // namespace pdmp
