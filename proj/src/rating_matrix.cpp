#include "concord/rating_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "concord/error.hpp"

namespace concord {

Index RatingMatrix::observed_count() const {
  return values.size() - missing_count();
}

Index RatingMatrix::missing_count() const {
  Index c = 0;
  for (Index j = 0; j < values.cols(); ++j)
    for (Index i = 0; i < values.rows(); ++i)
      if (!std::isfinite(values(i, j))) ++c;
  return c;
}

RatingMatrix make_matrix(Matrix values, bool integer_mode) {
  RatingMatrix M;
  M.values = std::move(values);
  M.integer_mode = integer_mode;
  M.row_labels.reserve(M.rows());
  M.col_labels.reserve(M.cols());
  for (Index i = 0; i < M.rows(); ++i) M.row_labels.push_back("r" + std::to_string(i));
  for (Index j = 0; j < M.cols(); ++j) M.col_labels.push_back("c" + std::to_string(j));
  return M;
}

void validate(const RatingMatrix& M) {
  if (static_cast<Index>(M.row_labels.size()) != M.rows())
    throw DataError("row label count does not match the matrix");
  if (static_cast<Index>(M.col_labels.size()) != M.cols())
    throw DataError("column label count does not match the matrix");
  if (!M.integer_mode) return;
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i) {
      const Real v = M.values(i, j);
      if (std::isfinite(v) && v != std::round(v))
        throw DataError("non-integer rating " + std::to_string(v) + " at (" +
                        std::to_string(i) + ", " + std::to_string(j) +
                        ") in integer mode");
    }
}

MissingIndex MissingIndex::of(const RatingMatrix& M) {
  MissingIndex q;
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j)
      if (!M.observed(i, j)) q.entries.emplace_back(i, j);
  return q;
}

ColumnScale column_scales(const RatingMatrix& M) {
  const Index n = M.cols();
  ColumnScale s;
  s.lower.resize(n);
  s.upper.resize(n);
  for (Index j = 0; j < n; ++j) {
    bool any = false;
    Real lo = 0, hi = 0;
    for (Index i = 0; i < M.rows(); ++i) {
      if (!M.observed(i, j)) continue;
      const Real v = M.values(i, j);
      if (!any) {
        lo = hi = v;
        any = true;
      } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!any)
      throw DataError("column " + (j < static_cast<Index>(M.col_labels.size())
                                       ? M.col_labels[j]
                                       : std::to_string(j)) +
                      " has no observed entries");
    s.lower(j) = lo;
    s.upper(j) = hi;
  }
  return s;
}

RatingMatrix normalize(const RatingMatrix& M, const ColumnScale& scale) {
  RatingMatrix out = M;
  const Vector c = scale.categories();
  for (Index j = 0; j < M.cols(); ++j) out.values.col(j) /= c(j);
  out.integer_mode = false;
  return out;
}

RatingMatrix denormalize(const RatingMatrix& M, const ColumnScale& scale) {
  RatingMatrix out = M;
  const Vector c = scale.categories();
  for (Index j = 0; j < M.cols(); ++j) out.values.col(j) *= c(j);
  return out;
}

Real round_clamp(Real v, Real lo, Real hi) {
  return std::min(hi, std::max(lo, std::round(v)));
}

RatingMatrix round_clamp(const RatingMatrix& M, const ColumnScale& scale) {
  if (!M.integer_mode) return M;
  RatingMatrix out = M;
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i) {
      const Real v = out.values(i, j);
      if (std::isfinite(v))
        out.values(i, j) = round_clamp(v, scale.lower(j), scale.upper(j));
    }
  return out;
}

Real quantile_sorted(const std::vector<Real>& sorted, Real p) {
  if (sorted.empty()) return kMissing;
  if (sorted.size() == 1) return sorted.front();
  p = std::min<Real>(1, std::max<Real>(0, p));
  const Real h = p * static_cast<Real>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const Real frac = h - static_cast<Real>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

namespace {

int bin_of(Real v, const std::array<Real, 4>& cut) {
  if (v < cut[0]) return 1;
  if (v < cut[1]) return 2;
  if (v < cut[2]) return 3;
  if (v < cut[3]) return 4;
  return 5;
}

}  // namespace

ConversionResult convert_scores(const RatingMatrix& scores, const ConversionSpec& spec) {
  ConversionResult out;
  out.ratings = scores;
  out.ratings.integer_mode = true;
  for (Index j = 0; j < scores.cols(); ++j) {
    std::vector<Real> col;
    for (Index i = 0; i < scores.rows(); ++i)
      if (scores.observed(i, j)) col.push_back(scores.values(i, j));
    const std::string name = scores.col_labels.empty()
                                 ? std::to_string(j)
                                 : scores.col_labels[j];
    if (col.empty()) {
      out.warnings.push_back("column " + name + " has no observed scores");
      continue;
    }
    std::sort(col.begin(), col.end());
    if (col.front() == col.back()) {
      for (Index i = 0; i < scores.rows(); ++i)
        if (scores.observed(i, j)) out.ratings.values(i, j) = 3;
      out.warnings.push_back("column " + name + " is constant; converted to all 3s");
      continue;
    }
    std::array<Real, 4> cut{};
    Real lo = col.front(), hi = col.back();
    if (spec.mode == ConversionSpec::Mode::fixed_quantile) {
      for (int k = 0; k < 4; ++k)
        cut[k] = quantile_sorted(col, spec.cutoff_fractions[k]);
    } else {
      lo = quantile_sorted(col, spec.clip_low);
      hi = quantile_sorted(col, spec.clip_high);
      if (lo == hi) {
        for (Index i = 0; i < scores.rows(); ++i)
          if (scores.observed(i, j)) out.ratings.values(i, j) = 3;
        out.warnings.push_back("column " + name +
                               " is constant after clipping; converted to all 3s");
        continue;
      }
      for (int k = 0; k < 4; ++k)
        cut[k] = lo + (hi - lo) * static_cast<Real>(k + 1) / 5.0;
    }
    for (Index i = 0; i < scores.rows(); ++i) {
      if (!scores.observed(i, j)) continue;
      Real v = scores.values(i, j);
      if (spec.mode == ConversionSpec::Mode::equal_width)
        v = std::min(hi, std::max(lo, v));
      out.ratings.values(i, j) = bin_of(v, cut);
    }
  }
  return out;
}

}  // namespace concord
