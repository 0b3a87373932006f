#pragma once

#include <cstdint>
#include <random>

#include "concord/rating_matrix.hpp"

namespace concord {

struct SynthSpec {
  Index m = 100;
  Index n = 5;
  Real s = 0.5;  // centre of the inter-provider correlation band
  Real r = 0.2;  // per-column missing rate
  std::uint64_t seed = 1;
};

struct SynthInstance {
  RatingMatrix observed;
  RatingMatrix truth;
  Matrix correlation;  // after PSD repair
  Index rescued_rows = 0;
  SynthSpec spec;
};

/// Symmetric, unit-diagonal matrix with off-diagonals uniform in
/// [s - 0.2, s + 0.2]; no PSD repair applied.
Matrix raw_correlation(Index n, Real s, std::mt19937_64& rng);

/// Clips eigenvalues below eig_floor, reconstructs and rescales back to a
/// unit diagonal.
Matrix repair_psd(const Matrix& C, Real eig_floor = 1e-8);

Matrix random_correlation(Index n, Real s, std::mt19937_64& rng);

/// Correlated five-category ratings with rating-biased deletion: per column,
/// round(r m) entries are removed without replacement with probability
/// proportional to 6 - rating. Rows left fully missing are restored from the
/// truth. Deterministic per seed.
SynthInstance generate(const SynthSpec& spec);

/// Probability that two columns, each missing floor(r m) subjects uniformly,
/// share at least one observed subject.
Real edge_probability(Real r, Index m);

/// Monte Carlo estimate of the probability that a random graph on n nodes
/// with independent edge probability p_edge is connected.
Real connectivity_probability(Real p_edge, Index n, Index trials, std::uint64_t seed);

}  // namespace concord
