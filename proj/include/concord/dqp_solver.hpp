#pragma once

#include <vector>

#include "concord/consensus.hpp"
#include "concord/impute_result.hpp"

namespace concord {

/// Observed corners usable to estimate entry (p, q): pairs (i, j) with
/// x_iq, x_pj and x_ij all observed, i != p, j != q. Nonempty exactly when
/// (p, q) is level-1 estimatable.
std::vector<IndexPair> corner_set(const RatingMatrix& M, Index p, Index q);

/// Per-entry closed-form imputation over each missing entry's corner set,
/// followed by rounding and clamping per column (integer mode). Requires a
/// level-1 estimatable input.
ImputationResult impute_dqp_svas(const RatingMatrix& M, const WeightMatrix& W);

}  // namespace concord
