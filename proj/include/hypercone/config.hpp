#pragma once

#include <cstddef>
#include <cstdint>

namespace hypercone {

inline constexpr const char* kVersion = "0.1.0";

struct Tolerances {
  double det_tol = 1e-9;
  double class_tol = 1e-9;
  double axis_tol = 1e-9;
  double overflow_cap = 1e300;
  double collision_tol = 1e-10;
  double arc_eq_tol = 1e-12;
  double strictness_tol = 1e-12;
};

/// Caps on exhaustive word enumeration.  A depth-n traversal over |L| labels
/// visits sum_{k<=n} |L|^k nodes; operations refuse to start above the cap.
struct Budget {
  std::uint64_t enumeration_cap = std::uint64_t{1} << 22;
};

/// Reads HYPERCONE_BUDGET from the environment, falling back to the default.
Budget budget_from_env();

}  // namespace hypercone
