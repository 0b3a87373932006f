#pragma once

#include <cstdint>
#include <functional>

#include "concord/consensus.hpp"
#include "concord/impute_result.hpp"

namespace concord {

using BaseImputer =
    std::function<ImputationResult(const RatingMatrix&, const WeightMatrix&)>;

struct MiOptions {
  Real row_fraction = 0.8;
  /// Keep drawing rounds until every row has appeared this many times.
  Index min_coverage = 10;
  /// Resamples allowed per round when a subsample is not estimatable.
  Index max_retries = 100;
  std::uint64_t seed = 1;
  /// Aggregate by the most frequent rounded value instead of the mean of the
  /// continuous values (ties go to the smaller value).
  bool mode_aggregate = false;
};

struct MiResult {
  ImputationResult aggregated;
  /// Share of missing entries whose rounded value is identical across all
  /// rounds that sampled them.
  Real pct_zero_sd = 0;
  /// Mean over missing entries of the per-entry standard deviation of the
  /// continuous values.
  Real avg_sd = 0;
  Index rounds = 0;
  std::vector<Index> row_coverage;
};

/// Repeated-subsample imputation: each round draws row_fraction of the rows
/// without replacement, re-checks estimatability, runs the base imputer on
/// the subsample with the full-data weights, and records the continuous value
/// of every missing entry present. Rounds share one sequential RNG stream.
MiResult impute_mi(const RatingMatrix& M, const WeightMatrix& W,
                   const BaseImputer& base, const MiOptions& opts = {});

}  // namespace concord
