#pragma once

#include <vector>

#include "concord/rating_matrix.hpp"
#include "concord/stats.hpp"

namespace concord {

enum class WeightMode { kendall, uniform };

/// Symmetric provider-agreement weights with unit diagonal. Kendall mode uses
/// tau-b over each pair's common subjects floored at epsilon; pairs whose tau
/// is undefined also get epsilon and are listed separately.
struct WeightMatrix {
  Matrix w;
  WeightMode mode = WeightMode::kendall;
  Real epsilon = 0.01;
  std::vector<IndexPair> floored;    // pairs (j < l) raised to epsilon
  std::vector<IndexPair> undefined;  // subset of floored with undefined tau
};

WeightMatrix build_weights(const RatingMatrix& M,
                           WeightMode mode = WeightMode::kendall,
                           Real epsilon = 0.01);

/// Pairwise agreement and missingness screens.
///   tau(j,l)       tau-b over subjects rated by both (NaN when undefined)
///   common(j,l)    overlap count
///   u_p(j,l)       two-sided Mann-Whitney p comparing l's ratings on subjects
///                  where j is missing against subjects where j is observed
///                  (NaN when either group is empty)
///   direction(j,l) -1 missing-implies-lower, +1 missing-implies-higher,
///                  0 when p >= alpha or the test is undefined
struct PairReport {
  Matrix tau;
  IntMatrix common;
  Matrix u_stat;
  Matrix u_p;
  IntMatrix direction;
  Real alpha = 0.05;
  Index exact_limit = 12;
};

PairReport pair_report(const RatingMatrix& M, Real alpha = 0.05,
                       Index exact_limit = 12);

/// Columns whose agreement with target reaches threshold, plus the target,
/// sorted ascending. When nothing else qualifies the best single neighbour is
/// added and fallback is set.
struct ColumnSelection {
  std::vector<Index> columns;
  bool fallback = false;
};

ColumnSelection select_columns(const PairReport& report, Index target, Real threshold);

}  // namespace concord
