#include "concord/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <vector>

namespace concord {

TauResult kendall_tau_b(std::span<const Real> a, std::span<const Real> b) {
  TauResult r;
  r.n = static_cast<Index>(a.size());
  if (a.size() != b.size() || a.size() < 2) return r;
  long long concordant = 0, discordant = 0, ties_a = 0, ties_b = 0;
  const std::size_t n = a.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const Real dx = a[j] - a[i];
      const Real dy = b[j] - b[i];
      if (dx == 0 && dy == 0) {
        ++ties_a;
        ++ties_b;
      } else if (dx == 0) {
        ++ties_a;
      } else if (dy == 0) {
        ++ties_b;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const long long n0 = static_cast<long long>(n) * (n - 1) / 2;
  const Real denom = std::sqrt(static_cast<Real>(n0 - ties_a)) *
                     std::sqrt(static_cast<Real>(n0 - ties_b));
  if (denom == 0) return r;
  r.tau = static_cast<Real>(concordant - discordant) / denom;
  r.defined = true;
  return r;
}

namespace {

// U counted directly over pairs; ties contribute one half.
Real u_statistic(std::span<const Real> a, std::span<const Real> b) {
  Real u = 0;
  for (const Real x : a) {
    for (const Real y : b) {
      if (x > y)
        u += 1;
      else if (x == y)
        u += 0.5;
    }
  }
  return u;
}

Real exact_p(std::span<const Real> a, std::span<const Real> b, Real u_obs) {
  std::vector<Real> pool(a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());
  const std::size_t total = pool.size();
  const std::size_t n1 = a.size();
  const Real mid = static_cast<Real>(n1) * static_cast<Real>(b.size()) / 2.0;
  const Real cut = std::abs(u_obs - mid) - 1e-12;

  std::vector<std::size_t> pick(n1);
  std::iota(pick.begin(), pick.end(), 0);
  long long hits = 0, splits = 0;
  std::vector<Real> ga(n1), gb(total - n1);
  while (true) {
    std::size_t ai = 0, bi = 0, next = 0;
    for (std::size_t p = 0; p < total; ++p) {
      if (next < n1 && pick[next] == p) {
        ga[ai++] = pool[p];
        ++next;
      } else {
        gb[bi++] = pool[p];
      }
    }
    ++splits;
    if (std::abs(u_statistic(ga, gb) - mid) >= cut) ++hits;

    // advance to the next n1-subset of {0..total-1}
    std::size_t k = n1;
    while (k > 0 && pick[k - 1] == total - n1 + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t j = k; j < n1; ++j) pick[j] = pick[j - 1] + 1;
  }
  return static_cast<Real>(hits) / static_cast<Real>(splits);
}

Real normal_p(std::span<const Real> a, std::span<const Real> b, Real u_obs) {
  const Real n1 = static_cast<Real>(a.size());
  const Real n2 = static_cast<Real>(b.size());
  const Real nn = n1 + n2;
  std::map<Real, long long> tally;
  for (const Real x : a) ++tally[x];
  for (const Real y : b) ++tally[y];
  Real tie_term = 0;
  for (const auto& [v, t] : tally) tie_term += static_cast<Real>(t) * t * t - t;
  const Real var = n1 * n2 / 12.0 * ((nn + 1) - tie_term / (nn * (nn - 1)));
  if (var <= 0) return std::numeric_limits<Real>::quiet_NaN();
  const Real z = std::max(0.0, std::abs(u_obs - n1 * n2 / 2.0) - 0.5) / std::sqrt(var);
  return std::erfc(z / std::sqrt(2.0));
}

}  // namespace

UTestResult mann_whitney(std::span<const Real> a, std::span<const Real> b,
                         Index exact_limit) {
  UTestResult r;
  r.n1 = static_cast<Index>(a.size());
  r.n2 = static_cast<Index>(b.size());
  if (a.empty() || b.empty()) return r;
  r.u = u_statistic(a, b);
  if (static_cast<Index>(a.size() + b.size()) <= exact_limit) {
    r.method = UMethod::exact;
    r.p = exact_p(a, b, r.u);
    r.defined = true;
  } else {
    r.method = UMethod::normal;
    r.p = normal_p(a, b, r.u);
    r.defined = std::isfinite(r.p);
  }
  if (r.defined) r.p = std::clamp(r.p, 0.0, 1.0);
  return r;
}

}  // namespace concord
