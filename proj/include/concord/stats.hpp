#pragma once

#include <span>

#include "concord/types.hpp"

namespace concord {

/// Kendall rank correlation with tie correction (tau-b).
struct TauResult {
  Real tau = 0;
  bool defined = false;  // false when n < 2 or a tie-corrected denominator is zero
  Index n = 0;
};

/// O(k^2) pair enumeration over equal-length samples.
TauResult kendall_tau_b(std::span<const Real> x, std::span<const Real> y);

enum class UMethod { exact, normal };

/// Two-sided Mann-Whitney U test. u is the statistic of the first sample with
/// ties counted as 1/2. Exact mode enumerates all group assignments of the
/// pooled values and reports P(|U* - n1 n2 / 2| >= |u - n1 n2 / 2|); the
/// normal mode applies the tie-corrected variance and a 0.5 continuity
/// correction.
struct UTestResult {
  Real u = 0;
  Real p = 1;
  UMethod method = UMethod::normal;
  bool defined = false;  // false when either sample is empty
  Index n1 = 0;
  Index n2 = 0;
};

UTestResult mann_whitney(std::span<const Real> a, std::span<const Real> b,
                         Index exact_limit = 12);

}  // namespace concord
