#pragma once

#include <limits>
#include <string>
#include <vector>

#include "concord/rating_matrix.hpp"

namespace concord {

struct ImputedEntry {
  Index row = 0;
  Index col = 0;
  Real continuous = 0;  // original scale, before rounding
  Real value = 0;       // value placed in the completed matrix
};

struct ImputationResult {
  std::string algorithm;
  RatingMatrix completed;
  std::vector<ImputedEntry> entries;
  /// Weighted discordance over the imputed entries at the continuous solution.
  Real objective = std::numeric_limits<Real>::quiet_NaN();
  /// max|Az - b| of the solved system (exact solver only).
  Real residual = std::numeric_limits<Real>::quiet_NaN();
  double seconds = 0;
};

}  // namespace concord
