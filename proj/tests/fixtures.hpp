#pragma once

#include <initializer_list>
#include <random>
#include <vector>

#include "concord/estimatability.hpp"
#include "concord/rating_matrix.hpp"

namespace fixtures {

using concord::Index;
using concord::IntMatrix;
using concord::Matrix;
using concord::RatingMatrix;
using concord::Real;

inline constexpr Real X = concord::kMissing;

inline RatingMatrix matrix_of(std::initializer_list<std::initializer_list<Real>> rows,
                              bool integer_mode = true) {
  const Index m = static_cast<Index>(rows.size());
  const Index n = static_cast<Index>(rows.begin()->size());
  Matrix values(m, n);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (const Real v : row) values(i, j++) = v;
    ++i;
  }
  return concord::make_matrix(std::move(values), integer_mode);
}

inline IntMatrix grid_of(std::initializer_list<std::initializer_list<int>> rows) {
  const Index m = static_cast<Index>(rows.size());
  const Index n = static_cast<Index>(rows.begin()->size());
  IntMatrix out(m, n);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (const int v : row) out(i, j++) = v;
    ++i;
  }
  return out;
}

/// Two provider blocks with no shared subject: {c0, c1} and {c2, c3}. Three
/// missing entries are reachable through the c0/c1 overlap in row r2; nothing
/// bridges into the second block, so the dataset is unestimatable.
inline RatingMatrix split_graph_fixture() {
  return matrix_of({{2, X, X, X},
                    {4, X, X, X},
                    {3, 2, X, X},
                    {X, 5, X, X},
                    {X, X, 1, 4}});
}

inline IntMatrix split_graph_levels() {
  return grid_of({{0, 1, -1, -1},
                  {0, 1, -1, -1},
                  {0, 0, -1, -1},
                  {1, 0, -1, -1},
                  {-1, -1, 0, 0}});
}

/// Connected chain c0..c3 where three entries only gain a witnessing
/// rectangle after the first imputation round: a level-2 dataset.
inline RatingMatrix chained_fixture() {
  return matrix_of({{1, 2, 3, X},
                    {4, 3, 5, X},
                    {2, X, X, 1},
                    {X, 5, X, X},
                    {X, X, X, 3}});
}

inline IntMatrix chained_levels() {
  return grid_of({{0, 0, 0, 1},
                  {0, 0, 0, 1},
                  {0, 1, 1, 0},
                  {1, 0, 1, 2},
                  {1, 2, 2, 0}});
}

/// Smallest solvable instance: one missing entry, known closed-form solution
/// (continuous 2.5 on the original scale, rounded and clamped to 2).
inline RatingMatrix tiny_fixture() {
  return matrix_of({{1, 1}, {2, 2}, {3, X}});
}

/// Uniform ratings with independent deletions; every subject and provider
/// keeps at least one rating.
inline RatingMatrix random_matrix(std::mt19937_64& rng, Index m, Index n,
                                  Real missing_prob) {
  std::uniform_int_distribution<int> rating(1, 5);
  std::uniform_real_distribution<Real> unit(0.0, 1.0);
  Matrix values(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      values(i, j) = unit(rng) < missing_prob ? X : rating(rng);
  std::uniform_int_distribution<Index> row(0, m - 1);
  std::uniform_int_distribution<Index> col(0, n - 1);
  for (Index i = 0; i < m; ++i)
    if (values.row(i).array().isNaN().all()) values(i, col(rng)) = rating(rng);
  for (Index j = 0; j < n; ++j)
    if (values.col(j).array().isNaN().all()) values(row(rng), j) = rating(rng);
  return concord::make_matrix(std::move(values));
}

inline RatingMatrix random_estimatable(std::mt19937_64& rng, Index m, Index n,
                                       Index max_missing) {
  std::uniform_int_distribution<Index> count(1, max_missing);
  while (true) {
    RatingMatrix M = random_matrix(rng, m, n, 0.0);
    std::uniform_int_distribution<Index> row(0, m - 1);
    std::uniform_int_distribution<Index> col(0, n - 1);
    const Index wanted = count(rng);
    for (Index t = 0; t < wanted; ++t) M.values(row(rng), col(rng)) = X;
    bool ok = concord::is_estimatable(M);
    for (Index i = 0; i < m && ok; ++i)
      ok = !M.values.row(i).array().isNaN().all();
    for (Index j = 0; j < n && ok; ++j)
      ok = !M.values.col(j).array().isNaN().all();
    if (ok && M.missing_count() > 0) return M;
  }
}

inline RatingMatrix random_level1(std::mt19937_64& rng, Index m, Index n,
                                  Index max_missing) {
  while (true) {
    RatingMatrix M = random_estimatable(rng, m, n, max_missing);
    if (concord::is_level1(M).ok) return M;
  }
}

}  // namespace fixtures
