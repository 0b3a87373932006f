#include <cmath>

#include "concord/consensus.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace concord;
using fixtures::X;

TEST_CASE("uniform weights are all ones") {
  const RatingMatrix M = fixtures::chained_fixture();
  const WeightMatrix W = build_weights(M, WeightMode::uniform);
  CHECK(W.mode == WeightMode::uniform);
  CHECK(W.w.rows() == M.cols());
  CHECK((W.w.array() == 1).all());
  CHECK(W.floored.empty());
  CHECK(W.undefined.empty());
}

TEST_CASE("kendall weights floor disagreeing and undefined pairs") {
  const RatingMatrix M = fixtures::matrix_of({{1, 1, 4, X},
                                              {2, 2, 3, X},
                                              {3, 3, 2, X},
                                              {4, 4, X, 4}});
  const WeightMatrix W = build_weights(M);
  CHECK(W.epsilon == 0.01);
  CHECK(W.w.diagonal().isOnes());
  CHECK(W.w.isApprox(W.w.transpose()));

  CHECK(W.w(0, 1) == doctest::Approx(1.0));   // identical columns
  CHECK(W.w(0, 2) == doctest::Approx(0.01));  // tau = -1, floored
  CHECK(W.w(0, 3) == doctest::Approx(0.01));  // single common row, undefined

  const auto has = [](const std::vector<IndexPair>& v, Index a, Index b) {
    return std::find(v.begin(), v.end(), IndexPair{a, b}) != v.end();
  };
  CHECK(has(W.floored, 0, 2));
  CHECK(has(W.floored, 0, 3));
  CHECK(has(W.undefined, 0, 3));
  CHECK(!has(W.undefined, 0, 2));  // defined, merely negative

  const WeightMatrix W5 = build_weights(M, WeightMode::kendall, 0.05);
  CHECK(W5.w(0, 2) == doctest::Approx(0.05));
}

TEST_CASE("pair report tallies agreement and overlap") {
  const RatingMatrix M = fixtures::matrix_of({{1, 1, 4, X},
                                              {2, 2, 3, X},
                                              {3, 3, 2, X},
                                              {4, 4, X, 4}});
  const PairReport rep = pair_report(M);
  CHECK(rep.tau(0, 1) == doctest::Approx(1.0));
  CHECK(rep.tau(0, 2) == doctest::Approx(-1.0));
  CHECK(std::isnan(rep.tau(0, 3)));
  CHECK(rep.tau(2, 2) == doctest::Approx(1.0));
  CHECK(rep.common(0, 1) == 4);
  CHECK(rep.common(0, 2) == 3);
  CHECK(rep.common(0, 0) == 4);  // diagonal counts the column itself
  CHECK(rep.common(3, 3) == 1);
}

TEST_CASE("missingness screen flags a one-sided shift") {
  // c0 is missing exactly on the subjects c1 rates highest
  const RatingMatrix M = fixtures::matrix_of({{X, 5},
                                              {X, 5},
                                              {X, 4},
                                              {X, 4},
                                              {1, 1},
                                              {2, 2},
                                              {3, 3},
                                              {4, 3}});
  const PairReport rep = pair_report(M);
  CHECK(rep.u_p(0, 1) < 0.05);
  CHECK(rep.direction(0, 1) == 1);

  // flipped: missing subjects rate lowest
  RatingMatrix flipped = M;
  flipped.values.col(1) = 6 - M.values.col(1).array();
  const PairReport rep2 = pair_report(flipped);
  CHECK(rep2.direction(0, 1) == -1);

  // no contrast, no direction
  const RatingMatrix flat = fixtures::matrix_of({{X, 3}, {X, 3}, {1, 3}, {2, 3}});
  CHECK(pair_report(flat).direction(0, 1) == 0);
}

TEST_CASE("column selection filters by agreement with fallback") {
  PairReport rep;
  rep.tau = Matrix::Constant(4, 4, std::numeric_limits<Real>::quiet_NaN());
  rep.tau.diagonal().setOnes();
  const auto set = [&](Index a, Index b, Real v) {
    rep.tau(a, b) = v;
    rep.tau(b, a) = v;
  };
  set(1, 0, 0.5);
  set(1, 3, 0.35);
  set(1, 2, 0.2);

  const ColumnSelection pick = select_columns(rep, 1, 0.3);
  CHECK(pick.columns == std::vector<Index>{0, 1, 3});
  CHECK(!pick.fallback);

  const ColumnSelection best = select_columns(rep, 1, 0.9);
  CHECK(best.columns == std::vector<Index>{0, 1});
  CHECK(best.fallback);
}
