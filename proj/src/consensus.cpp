#include "concord/consensus.hpp"

#include <algorithm>
#include <cmath>

namespace concord {

namespace {

// ratings of columns a and b restricted to rows where both are observed
void common_rows(const RatingMatrix& M, Index a, Index b, std::vector<Real>& xa,
                 std::vector<Real>& xb) {
  xa.clear();
  xb.clear();
  for (Index i = 0; i < M.rows(); ++i) {
    if (M.observed(i, a) && M.observed(i, b)) {
      xa.push_back(M.values(i, a));
      xb.push_back(M.values(i, b));
    }
  }
}

}  // namespace

WeightMatrix build_weights(const RatingMatrix& M, WeightMode mode, Real epsilon) {
  const Index n = M.cols();
  WeightMatrix wm;
  wm.mode = mode;
  wm.epsilon = epsilon;
  wm.w = Matrix::Ones(n, n);
  if (mode == WeightMode::uniform) return wm;

  std::vector<Real> xa, xb;
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      common_rows(M, a, b, xa, xb);
      const TauResult t = kendall_tau_b(xa, xb);
      Real w = epsilon;
      if (!t.defined) {
        wm.undefined.emplace_back(a, b);
        wm.floored.emplace_back(a, b);
      } else if (t.tau < epsilon) {
        wm.floored.emplace_back(a, b);
      } else {
        w = t.tau;
      }
      wm.w(a, b) = w;
      wm.w(b, a) = w;
    }
  }
  return wm;
}

PairReport pair_report(const RatingMatrix& M, Real alpha, Index exact_limit) {
  const Index n = M.cols();
  PairReport rep;
  rep.alpha = alpha;
  rep.exact_limit = exact_limit;
  rep.tau = Matrix::Constant(n, n, std::numeric_limits<Real>::quiet_NaN());
  rep.common = IntMatrix::Zero(n, n);
  rep.u_stat = Matrix::Constant(n, n, std::numeric_limits<Real>::quiet_NaN());
  rep.u_p = Matrix::Constant(n, n, std::numeric_limits<Real>::quiet_NaN());
  rep.direction = IntMatrix::Zero(n, n);

  std::vector<Real> xa, xb;
  for (Index a = 0; a < n; ++a) {
    rep.tau(a, a) = 1.0;
    rep.common(a, a) = static_cast<int>(
        (Index)std::count_if(M.values.col(a).begin(), M.values.col(a).end(),
                             [](Real v) { return !std::isnan(v); }));
    for (Index b = 0; b < n; ++b) {
      if (a == b) continue;
      if (b > a) {
        common_rows(M, a, b, xa, xb);
        rep.common(a, b) = rep.common(b, a) = static_cast<int>(xa.size());
        const TauResult t = kendall_tau_b(xa, xb);
        if (t.defined) rep.tau(a, b) = rep.tau(b, a) = t.tau;
      }
      // ratings of b split by whether a is missing on the same subject
      std::vector<Real> where_missing, where_rated;
      for (Index i = 0; i < M.rows(); ++i) {
        if (!M.observed(i, b)) continue;
        (M.observed(i, a) ? where_rated : where_missing).push_back(M.values(i, b));
      }
      const UTestResult u = mann_whitney(where_missing, where_rated, exact_limit);
      if (!u.defined) continue;
      rep.u_stat(a, b) = u.u;
      rep.u_p(a, b) = u.p;
      if (u.p < alpha) {
        const Real mid = static_cast<Real>(u.n1) * static_cast<Real>(u.n2) / 2.0;
        rep.direction(a, b) = u.u > mid ? 1 : -1;
      }
    }
  }
  return rep;
}

ColumnSelection select_columns(const PairReport& report, Index target, Real threshold) {
  ColumnSelection sel;
  Index best = -1;
  Real best_tau = -std::numeric_limits<Real>::infinity();
  for (Index j = 0; j < report.tau.cols(); ++j) {
    if (j == target) continue;
    const Real t = report.tau(target, j);
    if (std::isnan(t)) continue;
    if (t >= threshold) sel.columns.push_back(j);
    if (t > best_tau) {
      best_tau = t;
      best = j;
    }
  }
  if (sel.columns.empty() && best >= 0) {
    sel.columns.push_back(best);
    sel.fallback = true;
  }
  sel.columns.push_back(target);
  std::sort(sel.columns.begin(), sel.columns.end());
  return sel;
}

}  // namespace concord
