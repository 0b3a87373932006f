#include <random>

#include "concord/error.hpp"
#include "concord/qp_solver.hpp"
#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace concord;
using fixtures::X;

namespace {

WeightMatrix uniform_weights(Index n) {
  WeightMatrix W;
  W.mode = WeightMode::uniform;
  W.w = Matrix::Ones(n, n);
  return W;
}

Matrix normalized_values(const RatingMatrix& M) {
  return normalize(M, column_scales(M)).values;
}

}  // namespace

TEST_CASE("stationarity system of the one-variable fixture") {
  const RatingMatrix M = fixtures::tiny_fixture();
  const LinearSystem sys = assemble_system(normalized_values(M), Matrix::Ones(2, 2));
  REQUIRE(sys.entries.size() == 1);
  CHECK(sys.entries[0] == IndexPair{2, 1});
  CHECK(sys.A(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(sys.b(0) == doctest::Approx(5.0).epsilon(1e-14));

  Real residual = -1;
  const Vector z = solve_system(sys, &residual);
  CHECK(z(0) == doctest::Approx(1.25).epsilon(1e-14));
  CHECK(residual <= 1e-12);
}

TEST_CASE("exact imputation of the one-variable fixture") {
  const RatingMatrix M = fixtures::tiny_fixture();
  const ImputationResult res = impute_qp_as(M, uniform_weights(2));
  REQUIRE(res.entries.size() == 1);
  CHECK(res.entries[0].row == 2);
  CHECK(res.entries[0].col == 1);
  CHECK(res.entries[0].continuous == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(res.entries[0].value == 2);  // clamped into the observed scale [1, 2]
  CHECK(res.completed.values(2, 1) == 2);
  CHECK(res.algorithm == "qp-as");
  CHECK(res.residual <= 1e-10);
}

TEST_CASE("system entries follow the row-major missing index") {
  std::mt19937_64 rng(11);
  const RatingMatrix M = fixtures::random_estimatable(rng, 8, 4, 10);
  const LinearSystem sys = assemble_system(normalized_values(M), Matrix::Ones(4, 4));
  CHECK(sys.entries == MissingIndex::of(M).entries);
  CHECK(sys.A.isApprox(sys.A.transpose()));
}

TEST_CASE("solution zeroes the discordance gradient") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 25; ++rep) {
    const RatingMatrix M = fixtures::random_estimatable(rng, 10, 4, 12);
    const WeightMatrix W =
        rep % 2 ? build_weights(M) : uniform_weights(M.cols());
    const Matrix xn = normalized_values(M);
    const LinearSystem sys = assemble_system(xn, W.w);
    const Vector z = solve_system(sys);

    const Real f = oracles::eval_discordance(xn, sys.entries, z, W.w);
    const Vector fd = oracles::fd_gradient(xn, sys.entries, z, W.w);
    CHECK(fd.cwiseAbs().maxCoeff() <= 1e-6 * (1 + std::abs(f)));

    const Vector an = oracles::discordance_gradient(xn, sys.entries, z, W.w);
    CHECK(an.cwiseAbs().maxCoeff() <= 1e-8 * (1 + std::abs(f)));
  }
}

TEST_CASE("solution matches a conjugate-gradient minimizer") {
  std::mt19937_64 rng(37);
  for (int rep = 0; rep < 10; ++rep) {
    const RatingMatrix M = fixtures::random_estimatable(rng, 9, 4, 10);
    const WeightMatrix W = build_weights(M);
    const Matrix xn = normalized_values(M);
    const LinearSystem sys = assemble_system(xn, W.w);
    const Vector z = solve_system(sys);
    const Vector via_cg = oracles::cg_minimize(
        [&](const Vector& v) {
          return oracles::discordance_gradient(xn, sys.entries, v, W.w);
        },
        static_cast<Index>(sys.entries.size()));
    CHECK((z - via_cg).cwiseAbs().maxCoeff() <= 1e-7);
  }
}

TEST_CASE("duplicate rows collapse without changing the solution") {
  std::mt19937_64 rng(41);
  for (int rep = 0; rep < 10; ++rep) {
    const RatingMatrix base = fixtures::random_estimatable(rng, 5, 4, 6);
    Matrix stacked(base.rows() * 2 + 1, base.cols());
    stacked << base.values, base.values, base.values.row(2);
    const RatingMatrix M = make_matrix(std::move(stacked));

    const RowGroups groups = group_duplicate_rows(M);
    CHECK(static_cast<Index>(groups.representative.size()) <= base.rows());
    Index total = 0;
    for (const Index mult : groups.multiplicity) total += mult;
    CHECK(total == M.rows());
    for (Index i = 0; i < M.rows(); ++i) {
      const Index g = groups.group_of[i];
      const Index r = groups.representative[g];
      for (Index j = 0; j < M.cols(); ++j) {
        CHECK(M.observed(i, j) == M.observed(r, j));
        if (M.observed(i, j)) CHECK(M.values(i, j) == M.values(r, j));
      }
    }

    const WeightMatrix W = build_weights(M);
    QpOptions plain;
    plain.duplicate_reduction = false;
    const ImputationResult full = impute_qp_as(M, W, plain);
    const ImputationResult reduced = impute_qp_as(M, W);
    REQUIRE(full.entries.size() == reduced.entries.size());
    for (std::size_t k = 0; k < full.entries.size(); ++k) {
      CHECK(full.entries[k].row == reduced.entries[k].row);
      CHECK(full.entries[k].col == reduced.entries[k].col);
      CHECK(full.entries[k].continuous ==
            doctest::Approx(reduced.entries[k].continuous).epsilon(1e-9));
    }
  }
}

TEST_CASE("solver refuses oversized systems before anything else") {
  RatingMatrix M = fixtures::split_graph_fixture();  // unestimatable on top
  QpOptions opts;
  opts.max_missing = 5;
  CHECK_THROWS_AS(impute_qp_as(M, uniform_weights(4), opts), ResourceError);

  opts.max_missing = 20000;
  CHECK_THROWS_AS(impute_qp_as(M, uniform_weights(4), opts), EstimatabilityError);
}

TEST_CASE("empty row is rejected with a subject message") {
  RatingMatrix M = fixtures::matrix_of({{1, 2}, {X, X}, {3, 4}});
  CHECK_THROWS_WITH_AS(impute_qp_as(M, uniform_weights(2)),
                       doctest::Contains("r1"), EstimatabilityError);
}

TEST_CASE("complete matrix passes through untouched") {
  const RatingMatrix M = fixtures::matrix_of({{1, 2}, {3, 4}, {5, 1}});
  const ImputationResult res = impute_qp_as(M, uniform_weights(2));
  CHECK(res.entries.empty());
  CHECK(res.objective == 0);
  CHECK((res.completed.values - M.values).cwiseAbs().maxCoeff() == 0);
}

TEST_CASE("reported objective matches the definition-driven sum") {
  std::mt19937_64 rng(53);
  for (int rep = 0; rep < 20; ++rep) {
    const RatingMatrix M = fixtures::random_estimatable(rng, 8, 4, 8);
    const WeightMatrix W = build_weights(M);
    const auto Q = MissingIndex::of(M).entries;

    const ImputationResult res = impute_qp_as(M, W);
    const Real direct = objective_value(res.completed, W.w, Q);
    CHECK(res.objective == doctest::Approx(direct).epsilon(1e-12));

    const Real slow = oracles::missing_only_discordance(res.completed, W.w, Q);
    CHECK(direct == doctest::Approx(slow).epsilon(1e-9));
  }
}

TEST_CASE("objective needs a rating outside the evaluated set per column") {
  const RatingMatrix filled = fixtures::matrix_of({{1, 2}, {3, 4}});
  const std::vector<IndexPair> Q{{0, 1}, {1, 1}};
  CHECK_THROWS_AS(objective_value(filled, Matrix::Ones(2, 2), Q), DataError);
}
