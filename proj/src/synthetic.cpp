#include "concord/synthetic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "concord/error.hpp"

namespace concord {

Matrix raw_correlation(Index n, Real s, std::mt19937_64& rng) {
  std::uniform_real_distribution<Real> band(s - 0.2, s + 0.2);
  Matrix C = Matrix::Identity(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) C(i, j) = C(j, i) = band(rng);
  return C;
}

Matrix repair_psd(const Matrix& C, Real eig_floor) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
  const Vector lam = eig.eigenvalues().cwiseMax(eig_floor);
  Matrix R = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
  const Vector d = R.diagonal().cwiseSqrt().cwiseInverse();
  R = d.asDiagonal() * R * d.asDiagonal();
  R = ((R + R.transpose()) / 2).eval();
  R.diagonal().setOnes();
  return R;
}

Matrix random_correlation(Index n, Real s, std::mt19937_64& rng) {
  Matrix C = repair_psd(raw_correlation(n, s, rng));
  // repair can push entries out of the band; clip back and re-repair until
  // both constraints hold
  for (int pass = 0; pass < 8; ++pass) {
    bool clipped = false;
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) {
        if (i == j) continue;
        const Real v = std::clamp(C(i, j), s - 0.2, s + 0.2);
        if (v != C(i, j)) clipped = true;
        C(i, j) = v;
      }
    if (!clipped) break;
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(C);
    if (eig.eigenvalues().minCoeff() >= -1e-10) break;
    C = repair_psd(C);
  }
  return C;
}

namespace {

Matrix cholesky_factor(const Matrix& C) {
  Eigen::LLT<Matrix> llt(C);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  llt.compute(repair_psd(C, 1e-6));
  if (llt.info() != Eigen::Success)
    throw Error("correlation matrix cannot be factorized");
  return llt.matrixL();
}

}  // namespace

SynthInstance generate(const SynthSpec& spec) {
  if (spec.m < 2 || spec.n < 2)
    throw ConfigError("synthetic data needs at least 2 subjects and 2 providers");
  if (std::abs(spec.s) > 0.8)
    throw ConfigError("correlation centre must lie in [-0.8, 0.8]");
  if (spec.r < 0 || spec.r >= 1)
    throw ConfigError("missing rate must lie in [0, 1)");

  std::mt19937_64 rng(spec.seed);
  SynthInstance inst;
  inst.spec = spec;
  inst.correlation = random_correlation(spec.n, spec.s, rng);
  const Matrix L = cholesky_factor(inst.correlation);

  std::normal_distribution<Real> gauss;
  Matrix Z(spec.m, spec.n);
  for (Index i = 0; i < spec.m; ++i)
    for (Index j = 0; j < spec.n; ++j) Z(i, j) = gauss(rng);
  const Matrix X = Z * L.transpose();

  // equal-width bins over the clipped standard-normal range [-2.5, 2.5]
  Matrix ratings(spec.m, spec.n);
  for (Index i = 0; i < spec.m; ++i)
    for (Index j = 0; j < spec.n; ++j) {
      const Real clipped = std::clamp(X(i, j), -2.5, 2.5);
      ratings(i, j) =
          std::min(5, 1 + static_cast<int>(std::floor(clipped + 2.5)));
    }
  inst.truth = make_matrix(ratings);

  // remove round(r m) entries per column, favouring low ratings
  Matrix masked = ratings;
  std::uniform_real_distribution<Real> unit(0.0, 1.0);
  const Index k = static_cast<Index>(std::llround(spec.r * static_cast<Real>(spec.m)));
  for (Index j = 0; j < spec.n; ++j) {
    std::vector<Index> alive(spec.m);
    std::iota(alive.begin(), alive.end(), Index{0});
    for (Index drop = 0; drop < k; ++drop) {
      Real total = 0;
      for (const Index i : alive) total += 6.0 - ratings(i, j);
      Real u = unit(rng) * total;
      std::size_t pick = 0;
      for (; pick + 1 < alive.size(); ++pick) {
        u -= 6.0 - ratings(alive[pick], j);
        if (u < 0) break;
      }
      masked(alive[pick], j) = kMissing;
      alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(pick));
    }
  }

  std::uniform_int_distribution<Index> any_col(0, spec.n - 1);
  for (Index i = 0; i < spec.m; ++i) {
    if (!masked.row(i).array().isNaN().all()) continue;
    const Index j = any_col(rng);
    masked(i, j) = ratings(i, j);
    ++inst.rescued_rows;
  }

  inst.observed = make_matrix(std::move(masked));
  return inst;
}

Real edge_probability(Real r, Index m) {
  const auto lchoose = [](Real a, Real b) {
    return std::lgamma(a + 1) - std::lgamma(b + 1) - std::lgamma(a - b + 1);
  };
  const Real k = std::floor(r * static_cast<Real>(m));
  if (2 * k < static_cast<Real>(m)) return 1.0;
  return 1.0 - std::exp(lchoose(k, 2 * k - static_cast<Real>(m)) -
                        lchoose(static_cast<Real>(m), k));
}

Real connectivity_probability(Real p_edge, Index n, Index trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<Real> unit(0.0, 1.0);
  std::vector<std::vector<Index>> adj(n);
  Index connected = 0;
  for (Index t = 0; t < trials; ++t) {
    for (auto& a : adj) a.clear();
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        if (unit(rng) < p_edge) {
          adj[i].push_back(j);
          adj[j].push_back(i);
        }
      }
    }
    std::vector<bool> seen(n, false);
    std::queue<Index> frontier;
    frontier.push(0);
    seen[0] = true;
    Index reached = 1;
    while (!frontier.empty()) {
      const Index c = frontier.front();
      frontier.pop();
      for (const Index next : adj[c]) {
        if (!seen[next]) {
          seen[next] = true;
          frontier.push(next);
          ++reached;
        }
      }
    }
    if (reached == n) ++connected;
  }
  return static_cast<Real>(connected) / static_cast<Real>(trials);
}

}  // namespace concord
