#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "concord/types.hpp"

namespace concord {

inline constexpr Real kMissing = std::numeric_limits<Real>::quiet_NaN();

/// Ordinal rating matrix. Rows are subjects, columns are rating providers,
/// NaN marks a missing entry. In integer mode every observed value is a whole
/// number on the provider's ordinal scale.
struct RatingMatrix {
  Matrix values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::string id_label = "id";
  bool integer_mode = true;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
  bool observed(Index i, Index j) const { return std::isfinite(values(i, j)); }
  Index observed_count() const;
  Index missing_count() const;
  bool complete() const { return missing_count() == 0; }
};

/// Wraps dense values into a RatingMatrix, generating r0../c0.. labels.
RatingMatrix make_matrix(Matrix values, bool integer_mode = true);

/// Checks label/shape/value invariants. Throws DataError on violation.
void validate(const RatingMatrix& M);

/// Missing entries in row-major order.
struct MissingIndex {
  std::vector<IndexPair> entries;

  static MissingIndex of(const RatingMatrix& M);
  Index size() const { return static_cast<Index>(entries.size()); }
};

/// Observed per-column bounds; categories() is the scale width u - l + 1.
struct ColumnScale {
  Vector lower;
  Vector upper;

  Vector categories() const {
    return upper - lower + Vector::Ones(upper.size());
  }
};

/// Bounds of each column over its observed entries only. Throws DataError
/// when a column has no observed entry.
ColumnScale column_scales(const RatingMatrix& M);

/// Divides every column by its category count. The result is continuous.
RatingMatrix normalize(const RatingMatrix& M, const ColumnScale& scale);

/// Inverse of normalize.
RatingMatrix denormalize(const RatingMatrix& M, const ColumnScale& scale);

/// Rounds half away from zero, then clamps into [lo, hi].
Real round_clamp(Real v, Real lo, Real hi);

/// Applies round_clamp columnwise with the column's observed bounds.
/// Returns M unchanged when integer_mode is false. NaN entries stay NaN.
RatingMatrix round_clamp(const RatingMatrix& M, const ColumnScale& scale);

/// Conversion of continuous scores into five ordinal categories.
struct ConversionSpec {
  enum class Mode { fixed_quantile, equal_width };

  Mode mode = Mode::fixed_quantile;
  /// Quantile fractions of the four cutoffs (fixed_quantile mode).
  std::array<Real, 4> cutoff_fractions{0.1, 0.35, 0.65, 0.9};
  /// Percentile clipping applied before equal-width binning.
  Real clip_low = 0.01;
  Real clip_high = 0.99;
};

struct ConversionResult {
  RatingMatrix ratings;
  std::vector<std::string> warnings;
};

/// Converts score columns to 1..5 ratings, one column at a time. Missing
/// scores stay missing; a constant column becomes all 3s with a warning.
ConversionResult convert_scores(const RatingMatrix& scores, const ConversionSpec& spec);

/// Linear-interpolation quantile of an ascending sample (R type 7).
Real quantile_sorted(const std::vector<Real>& sorted, Real p);

}  // namespace concord
