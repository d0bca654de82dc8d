#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "fixedpoint/space.hpp"

namespace fixedpoint {

/// Outcome of an empirical property check. A report is `rejected` when the
/// probe's own hypotheses failed; a rejected report neither passes nor fails.
struct ProbeReport {
  std::string property;
  std::size_t trials = 0;
  double worst_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  bool rejected = false;
  std::string note;
  std::uint64_t seed = 0;
  std::optional<std::pair<Vector, Vector>> witness;

  void finalize() { pass = !rejected && worst_violation <= tolerance; }
};

}  // namespace fixedpoint
