#pragma once

#include <vector>

#include "concord/consensus.hpp"
#include "concord/impute_result.hpp"

namespace concord {

/// Stationarity system of the weighted discordance objective over the missing
/// entries of a normalized matrix. A is symmetric positive definite whenever
/// the input is estimatable.
struct LinearSystem {
  Matrix A;
  Vector b;
  std::vector<IndexPair> entries;  // variable order, row-major
};

/// Builds the system from the normalized values (NaN marks a variable) and a
/// symmetric weight matrix.
LinearSystem assemble_system(const Matrix& normalized, const Matrix& W);

/// Same system on a duplicate-reduced matrix whose rows are group
/// representatives with the given multiplicities. Solutions coincide with the
/// expanded system entry for entry.
LinearSystem assemble_reduced_system(const Matrix& normalized, const Matrix& W,
                                     const std::vector<Index>& multiplicity);

/// Groups rows that agree in both values and missingness.
struct RowGroups {
  std::vector<Index> representative;  // first row of each group
  std::vector<Index> multiplicity;
  std::vector<Index> group_of;  // row -> group
};
RowGroups group_duplicate_rows(const RatingMatrix& M);

/// Cholesky solve with one refinement step. Throws EstimatabilityError when
/// the factorization fails; writes max|Az - b| to *residual when given.
Vector solve_system(const LinearSystem& sys, Real* residual = nullptr);

struct QpOptions {
  /// Refuse systems with more missing entries than this.
  Index max_missing = 20000;
  /// Collapse duplicate rows before assembling when duplicates exist.
  bool duplicate_reduction = true;
};

/// Exact imputation: solves the full stationarity system on the normalized
/// scale, maps back, then rounds and clamps per column (integer mode).
/// Requires an estimatable input.
ImputationResult impute_qp_as(const RatingMatrix& M, const WeightMatrix& W,
                              const QpOptions& opts = {});

/// Weighted discordance of a completed matrix accumulated over the originally
/// missing entries Q, on the normalized scale. Column scales are taken over
/// the complement of Q.
Real objective_value(const RatingMatrix& filled, const Matrix& W,
                     const std::vector<IndexPair>& Q);

}  // namespace concord
