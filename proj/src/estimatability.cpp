#include "concord/estimatability.hpp"

#include <algorithm>
#include <queue>

namespace concord {

namespace {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

// pair_rows(a, b) = number of rows assigned in both columns a and b
IntMatrix pair_rows(const BoolMatrix& assigned) {
  const Index n = assigned.cols();
  IntMatrix cnt = IntMatrix::Zero(n, n);
  for (Index i = 0; i < assigned.rows(); ++i) {
    for (Index a = 0; a < n; ++a) {
      if (!assigned(i, a)) continue;
      for (Index b = a + 1; b < n; ++b) {
        if (!assigned(i, b)) {
          continue;
        }
        ++cnt(a, b);
        ++cnt(b, a);
      }
    }
  }
  return cnt;
}

}  // namespace

IntMatrix closure_levels(const RatingMatrix& M) {
  const Index m = M.rows();
  const Index n = M.cols();
  BoolMatrix assigned(m, n);
  IntMatrix levels(m, n);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      assigned(i, j) = M.observed(i, j);
      levels(i, j) = assigned(i, j) ? 0 : kUnestimatable;
    }
  }
  IntMatrix cnt = pair_rows(assigned);

  std::vector<IndexPair> batch;
  for (int round = 1;; ++round) {
    batch.clear();
    for (Index i = 0; i < m; ++i) {
      for (Index q = 0; q < n; ++q) {
        if (assigned(i, q)) continue;
        for (Index j = 0; j < n; ++j) {
          if (j != q && assigned(i, j) && cnt(q, j) > 0) {
            batch.emplace_back(i, q);
            break;
          }
        }
      }
    }
    if (batch.empty()) break;
    for (const auto& [i, q] : batch) {
      levels(i, q) = round;
      assigned(i, q) = true;
      for (Index j = 0; j < n; ++j) {
        if (j != q && assigned(i, j)) {
          ++cnt(q, j);
          ++cnt(j, q);
        }
      }
    }
  }
  return levels;
}

std::vector<std::vector<Index>> rp_components(const RatingMatrix& M) {
  const Index n = M.cols();
  std::vector<std::vector<Index>> adj(n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = a + 1; b < n; ++b) {
      bool linked = false;
      for (Index i = 0; i < M.rows() && !linked; ++i)
        linked = M.observed(i, a) && M.observed(i, b);
      if (linked) {
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }
  }
  std::vector<std::vector<Index>> components;
  std::vector<bool> seen(n, false);
  for (Index start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<Index> comp;
    std::queue<Index> frontier;
    frontier.push(start);
    seen[start] = true;
    while (!frontier.empty()) {
      const Index c = frontier.front();
      frontier.pop();
      comp.push_back(c);
      for (const Index next : adj[c]) {
        if (!seen[next]) {
          seen[next] = true;
          frontier.push(next);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    components.push_back(std::move(comp));
  }
  return components;
}

bool is_estimatable(const RatingMatrix& M) {
  for (Index i = 0; i < M.rows(); ++i) {
    bool any = false;
    for (Index j = 0; j < M.cols() && !any; ++j) any = M.observed(i, j);
    if (!any) return false;
  }
  return rp_components(M).size() == 1;
}

Level1Check is_level1(const RatingMatrix& M) {
  const Index m = M.rows();
  const Index n = M.cols();
  BoolMatrix assigned(m, n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j) assigned(i, j) = M.observed(i, j);
  const IntMatrix cnt = pair_rows(assigned);

  Level1Check out;
  for (Index q = 0; q < n; ++q) {
    std::vector<bool> covered(m, false);
    for (Index j = 0; j < n; ++j) {
      if (j != q && cnt(q, j) == 0) continue;  // j must neighbour q or be q
      for (Index i = 0; i < m; ++i)
        if (assigned(i, j)) covered[i] = true;
    }
    std::vector<Index> missing;
    for (Index i = 0; i < m; ++i)
      if (!covered[i]) missing.push_back(i);
    if (!missing.empty()) {
      out.column = q;
      out.uncovered_rows = std::move(missing);
      return out;
    }
  }
  out.ok = true;
  return out;
}

EstimatabilityReport analyze_estimatability(const RatingMatrix& M) {
  EstimatabilityReport rep;
  rep.levels = closure_levels(M);
  rep.components = rp_components(M);

  int max_level = 0;
  bool all_assigned = true;
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      const int v = rep.levels(i, j);
      if (v == kUnestimatable)
        all_assigned = false;
      else
        max_level = std::max(max_level, v);
    }
  }
  rep.estimatable = all_assigned;
  rep.dataset_level = all_assigned ? max_level : kUnestimatable;

  rep.level_histogram.assign(static_cast<std::size_t>(std::max(max_level, 0)), 0);
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j)
      if (rep.levels(i, j) >= 1) ++rep.level_histogram[rep.levels(i, j) - 1];

  rep.level1 = is_level1(M).ok;
  return rep;
}

}  // namespace concord
