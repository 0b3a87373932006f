#include "concord/qp_solver.hpp"

#include <Eigen/Cholesky>
#include <chrono>
#include <cmath>
#include <map>

#include "concord/error.hpp"
#include "concord/estimatability.hpp"

namespace concord {

namespace {

Matrix offdiagonal(const Matrix& W) {
  Matrix Wh = W;
  Wh.diagonal().setZero();
  return Wh;
}

Matrix zero_filled(const Matrix& normalized) {
  return normalized.unaryExpr([](Real v) { return std::isfinite(v) ? v : 0.0; });
}

std::vector<IndexPair> missing_of(const Matrix& normalized) {
  std::vector<IndexPair> entries;
  for (Index i = 0; i < normalized.rows(); ++i)
    for (Index j = 0; j < normalized.cols(); ++j)
      if (!std::isfinite(normalized(i, j))) entries.emplace_back(i, j);
  return entries;
}

void require_estimatable(const RatingMatrix& M) {
  for (Index i = 0; i < M.rows(); ++i) {
    bool any = false;
    for (Index j = 0; j < M.cols() && !any; ++j) any = M.observed(i, j);
    if (!any)
      throw EstimatabilityError("subject " + M.row_labels[i] + " has no ratings");
  }
  const auto components = rp_components(M);
  if (components.size() > 1)
    throw EstimatabilityError("dataset is not estimatable: provider graph has " +
                              std::to_string(components.size()) + " components");
}

Real elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

LinearSystem assemble_system(const Matrix& normalized, const Matrix& W) {
  const Index m = normalized.rows();
  const Matrix Wh = offdiagonal(W);
  const Vector Wrow = Wh.rowwise().sum();
  const Matrix y = zero_filled(normalized);
  const Matrix U = y * Wh;
  const Vector C = y.colwise().sum();
  const Vector T = U.colwise().sum();

  LinearSystem sys;
  sys.entries = missing_of(normalized);
  const Index k = static_cast<Index>(sys.entries.size());
  sys.A.resize(k, k);
  sys.b.resize(k);
  for (Index q = 0; q < k; ++q) {
    const auto [iq, jq] = sys.entries[q];
    sys.b(q) = 2 * m * U(iq, jq) + 2 * Wrow(jq) * C(jq) - 2 * T(jq);
    for (Index s = q; s < k; ++s) {
      const auto [is, js] = sys.entries[s];
      const Real rho = iq == is ? static_cast<Real>(m - 1) : -1.0;
      const Real sigma = jq == js ? Wrow(jq) : -Wh(jq, js);
      sys.A(q, s) = sys.A(s, q) = 2 * rho * sigma;
    }
  }
  return sys;
}

LinearSystem assemble_reduced_system(const Matrix& normalized, const Matrix& W,
                                     const std::vector<Index>& multiplicity) {
  const Matrix Wh = offdiagonal(W);
  const Vector Wrow = Wh.rowwise().sum();
  const Matrix y = zero_filled(normalized);
  const Matrix U = y * Wh;

  Vector d(normalized.rows());
  for (Index g = 0; g < d.size(); ++g) d(g) = static_cast<Real>(multiplicity[g]);
  const Real total = d.sum();
  const Vector C = y.transpose() * d;  // multiplicity-weighted column sums
  const Vector T = U.transpose() * d;

  LinearSystem sys;
  sys.entries = missing_of(normalized);
  const Index k = static_cast<Index>(sys.entries.size());
  sys.A.resize(k, k);
  sys.b.resize(k);
  for (Index q = 0; q < k; ++q) {
    const auto [iq, jq] = sys.entries[q];
    sys.b(q) = 2 * d(iq) * (total * U(iq, jq) + Wrow(jq) * C(jq) - T(jq));
    for (Index s = q; s < k; ++s) {
      const auto [is, js] = sys.entries[s];
      const Real rho = iq == is ? d(iq) * (total - d(iq)) : -d(iq) * d(is);
      const Real sigma = jq == js ? Wrow(jq) : -Wh(jq, js);
      sys.A(q, s) = sys.A(s, q) = 2 * rho * sigma;
    }
  }
  return sys;
}

RowGroups group_duplicate_rows(const RatingMatrix& M) {
  // missing entries get a sentinel outside any rating scale so rows compare
  // lexicographically with their masks included
  constexpr Real sentinel = std::numeric_limits<Real>::max();
  std::map<std::vector<Real>, Index> seen;
  RowGroups groups;
  groups.group_of.resize(M.rows());
  std::vector<Real> key(M.cols());
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j)
      key[j] = M.observed(i, j) ? M.values(i, j) : sentinel;
    const auto [it, fresh] =
        seen.emplace(key, static_cast<Index>(groups.representative.size()));
    if (fresh) {
      groups.representative.push_back(i);
      groups.multiplicity.push_back(0);
    }
    groups.group_of[i] = it->second;
    ++groups.multiplicity[it->second];
  }
  return groups;
}

Vector solve_system(const LinearSystem& sys, Real* residual) {
  if (sys.entries.empty()) {
    if (residual) *residual = 0;
    return Vector();
  }
  const Eigen::LLT<Matrix> llt(sys.A);
  if (llt.info() != Eigen::Success)
    throw EstimatabilityError("stationarity system is not positive definite");
  Vector z = llt.solve(sys.b);
  z += llt.solve(sys.b - sys.A * z);
  if (residual) *residual = (sys.A * z - sys.b).cwiseAbs().maxCoeff();
  return z;
}

ImputationResult impute_qp_as(const RatingMatrix& M, const WeightMatrix& W,
                              const QpOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  ImputationResult res;
  res.algorithm = "qp-as";
  res.completed = M;

  const MissingIndex missing = MissingIndex::of(M);
  if (missing.size() > opts.max_missing)
    throw ResourceError("exact solver limited to " + std::to_string(opts.max_missing) +
                        " missing entries, got " + std::to_string(missing.size()));
  const ColumnScale scale = column_scales(M);
  if (missing.size() == 0) {
    res.objective = 0;
    res.residual = 0;
    res.seconds = elapsed_since(t0);
    return res;
  }
  require_estimatable(M);

  const RatingMatrix normalized = normalize(M, scale);
  const RowGroups groups = opts.duplicate_reduction
                               ? group_duplicate_rows(M)
                               : RowGroups{};
  const bool reduced = opts.duplicate_reduction &&
                       static_cast<Index>(groups.representative.size()) < M.rows();

  LinearSystem sys;
  if (reduced) {
    Matrix rep(static_cast<Index>(groups.representative.size()), M.cols());
    for (Index g = 0; g < rep.rows(); ++g)
      rep.row(g) = normalized.values.row(groups.representative[g]);
    sys = assemble_reduced_system(rep, W.w, groups.multiplicity);
  } else {
    sys = assemble_system(normalized.values, W.w);
  }
  const Vector z = solve_system(sys, &res.residual);

  IntMatrix var(reduced ? static_cast<Index>(groups.representative.size()) : M.rows(),
                M.cols());
  var.setConstant(-1);
  for (Index q = 0; q < static_cast<Index>(sys.entries.size()); ++q)
    var(sys.entries[q].first, sys.entries[q].second) = static_cast<int>(q);

  const Vector cats = scale.categories();
  for (const auto& [i, j] : missing.entries) {
    const Index row = reduced ? groups.group_of[i] : i;
    const Real continuous = z(var(row, j)) * cats(j);
    const Real value = M.integer_mode
                           ? round_clamp(continuous, scale.lower(j), scale.upper(j))
                           : continuous;
    res.completed.values(i, j) = value;
    res.entries.push_back({i, j, continuous, value});
  }
  res.objective = objective_value(res.completed, W.w, missing.entries);
  res.seconds = elapsed_since(t0);
  return res;
}

Real objective_value(const RatingMatrix& filled, const Matrix& W,
                     const std::vector<IndexPair>& Q) {
  const Index m = filled.rows();
  const Index n = filled.cols();
  std::vector<char> held(static_cast<std::size_t>(m) * n, 0);
  for (const auto& [i, j] : Q) held[static_cast<std::size_t>(i) * n + j] = 1;

  Matrix xn = filled.values;
  for (Index j = 0; j < n; ++j) {
    Real lo = std::numeric_limits<Real>::infinity();
    Real hi = -lo;
    for (Index i = 0; i < m; ++i) {
      if (held[static_cast<std::size_t>(i) * n + j] || !filled.observed(i, j)) continue;
      lo = std::min(lo, filled.values(i, j));
      hi = std::max(hi, filled.values(i, j));
    }
    if (!std::isfinite(lo))
      throw DataError("column " + filled.col_labels[j] +
                      " has no rating outside the evaluated set");
    xn.col(j) /= hi - lo + 1;
  }

  const Vector colsum = xn.colwise().sum();
  Matrix P(n, n);
  for (Index l = 0; l < n; ++l)
    for (Index j = 0; j < n; ++j) P(l, j) = (xn.col(j) - xn.col(l)).squaredNorm();

  Real total = 0;
  for (const auto& [k, l] : Q) {
    for (Index j = 0; j < n; ++j) {
      if (j == l) continue;
      const Real g = xn(k, l) - xn(k, j);
      const Real s1 = colsum(j) - colsum(l) + g;
      const Real s2 = P(l, j) - g * g;
      total += W(l, j) * ((m - 1) * g * g + 2 * g * s1 + s2);
    }
  }
  return total;
}

}  // namespace concord
