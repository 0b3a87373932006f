#pragma once

#include <vector>

#include "concord/rating_matrix.hpp"

namespace concord {

inline constexpr int kUnestimatable = -1;

/// Minimal estimatability level of every entry: 0 for observed entries, v >= 1
/// for missing entries that first gain a witnessing rectangle (an opposite
/// corner plus two side corners, all of strictly lower level) in round v, and
/// kUnestimatable for entries no round ever reaches. Rounds stop at the first
/// one that adds nothing: the closure is monotone, so a later round cannot add
/// an entry either.
IntMatrix closure_levels(const RatingMatrix& M);

/// Connected components of the provider graph: columns are nodes and an edge
/// joins two columns sharing at least one subject rated by both. Components
/// are sorted by smallest member.
std::vector<std::vector<Index>> rp_components(const RatingMatrix& M);

/// True when the provider graph is connected, which holds exactly when every
/// missing entry receives a closure level.
bool is_estimatable(const RatingMatrix& M);

/// Level-1 test: for every provider j, the columns sharing a rated subject
/// with j (j itself included) must jointly cover all subjects. On failure,
/// column is the first uncovered provider and uncovered_rows the subjects its
/// neighbourhood misses.
struct Level1Check {
  bool ok = false;
  Index column = -1;
  std::vector<Index> uncovered_rows;
};
Level1Check is_level1(const RatingMatrix& M);

struct EstimatabilityReport {
  IntMatrix levels;
  int dataset_level = kUnestimatable;  // max entry level; 0 for a complete matrix
  bool estimatable = false;
  bool level1 = false;
  std::vector<std::vector<Index>> components;
  std::vector<Index> level_histogram;  // level_histogram[v] = missing entries at level v+1
};

EstimatabilityReport analyze_estimatability(const RatingMatrix& M);

}  // namespace concord
