#include "concord/dqp_solver.hpp"

#include <atomic>
#include <chrono>
#include <cmath>

#include "concord/error.hpp"
#include "concord/parallel.hpp"
#include "concord/qp_solver.hpp"

namespace concord {

std::vector<IndexPair> corner_set(const RatingMatrix& M, Index p, Index q) {
  std::vector<IndexPair> corners;
  for (Index j = 0; j < M.cols(); ++j) {
    if (j == q || !M.observed(p, j)) continue;
    for (Index i = 0; i < M.rows(); ++i) {
      if (i != p && M.observed(i, q) && M.observed(i, j)) corners.emplace_back(i, j);
    }
  }
  return corners;
}

ImputationResult impute_dqp_svas(const RatingMatrix& M, const WeightMatrix& W) {
  const auto t0 = std::chrono::steady_clock::now();
  ImputationResult res;
  res.algorithm = "dqp-svas";
  res.completed = M;

  const MissingIndex missing = MissingIndex::of(M);
  const ColumnScale scale = column_scales(M);
  const Vector cats = scale.categories();
  const Index m = M.rows();
  const Index n = M.cols();

  // per ordered column pair (a, b): rows rated by both, and the sums of each
  // side's ratings over those rows
  IntMatrix overlap = IntMatrix::Zero(n, n);
  Matrix sum_a = Matrix::Zero(n, n);
  Matrix sum_b = Matrix::Zero(n, n);
  for (Index i = 0; i < m; ++i) {
    for (Index a = 0; a < n; ++a) {
      if (!M.observed(i, a)) continue;
      for (Index b = a + 1; b < n; ++b) {
        if (!M.observed(i, b)) continue;
        ++overlap(a, b);
        ++overlap(b, a);
        sum_a(a, b) += M.values(i, a);
        sum_b(a, b) += M.values(i, b);
        sum_a(b, a) += M.values(i, b);
        sum_b(b, a) += M.values(i, a);
      }
    }
  }

  res.entries.resize(missing.entries.size());
  std::atomic<Index> stranded{-1};
  parallel_chunks(0, missing.size(), [&](Index lo, Index hi) {
    for (Index k = lo; k < hi; ++k) {
      const auto [p, q] = missing.entries[k];
      Real num = 0, den = 0;
      for (Index j = 0; j < n; ++j) {
        if (j == q || !M.observed(p, j)) continue;
        const Real nn = static_cast<Real>(overlap(q, j));
        num += W.w(q, j) *
               (sum_a(q, j) / cats(q) + (nn * M.values(p, j) - sum_b(q, j)) / cats(j));
        den += W.w(q, j) * nn / cats(q);
      }
      if (den == 0) {
        stranded.store(k);
        return;
      }
      const Real continuous = num / den;
      const Real value = M.integer_mode
                             ? round_clamp(continuous, scale.lower(q), scale.upper(q))
                             : continuous;
      res.entries[k] = {p, q, continuous, value};
    }
  });
  if (stranded >= 0) {
    const auto [p, q] = missing.entries[stranded];
    throw EstimatabilityError("entry (" + M.row_labels[p] + ", " + M.col_labels[q] +
                              ") is not level-1 estimatable; use the exact solver");
  }
  for (const auto& e : res.entries) res.completed.values(e.row, e.col) = e.value;
  res.objective = objective_value(res.completed, W.w, missing.entries);
  res.seconds =
      std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace concord
