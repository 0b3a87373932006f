#include <random>

#include "concord/dqp_solver.hpp"
#include "concord/error.hpp"
#include "concord/multi_impute.hpp"
#include "concord/qp_solver.hpp"
#include "concord/synthetic.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace concord;

namespace {

BaseImputer dqp_base() {
  return [](const RatingMatrix& M, const WeightMatrix& W) {
    return impute_dqp_svas(M, W);
  };
}

}  // namespace

TEST_CASE("subsample rounds cover every row and aggregate the draws") {
  const SynthInstance inst = generate({.m = 30, .n = 4, .s = 0.6, .r = 0.15, .seed = 21});
  const RatingMatrix& M = inst.observed;
  const WeightMatrix W = build_weights(M);

  MiOptions opts;
  opts.min_coverage = 4;
  opts.seed = 2;
  const MiResult res = impute_mi(M, W, dqp_base(), opts);

  CHECK(res.rounds >= opts.min_coverage);
  REQUIRE(static_cast<Index>(res.row_coverage.size()) == M.rows());
  for (const Index c : res.row_coverage) CHECK(c >= opts.min_coverage);

  CHECK(res.aggregated.algorithm == "dqp-svas+mi");
  CHECK(res.aggregated.completed.complete());
  CHECK(static_cast<Index>(res.aggregated.entries.size()) == M.missing_count());
  CHECK(res.pct_zero_sd >= 0);
  CHECK(res.pct_zero_sd <= 100);
  CHECK(res.avg_sd >= 0);

  const ColumnScale scale = column_scales(M);
  for (const ImputedEntry& e : res.aggregated.entries) {
    CHECK(e.value >= scale.lower(e.col));
    CHECK(e.value <= scale.upper(e.col));
    CHECK(e.value == std::round(e.value));
  }
}

TEST_CASE("multiple imputation is deterministic per seed") {
  const SynthInstance inst = generate({.m = 24, .n = 4, .s = 0.5, .r = 0.2, .seed = 4});
  const WeightMatrix W = build_weights(inst.observed);
  MiOptions opts;
  opts.min_coverage = 3;
  opts.seed = 11;
  const MiResult a = impute_mi(inst.observed, W, dqp_base(), opts);
  const MiResult b = impute_mi(inst.observed, W, dqp_base(), opts);
  CHECK(a.rounds == b.rounds);
  CHECK(a.pct_zero_sd == b.pct_zero_sd);
  CHECK(a.avg_sd == b.avg_sd);
  REQUIRE(a.aggregated.entries.size() == b.aggregated.entries.size());
  for (std::size_t k = 0; k < a.aggregated.entries.size(); ++k)
    CHECK(a.aggregated.entries[k].continuous == b.aggregated.entries[k].continuous);

  opts.seed = 12;
  const MiResult c = impute_mi(inst.observed, W, dqp_base(), opts);
  CHECK(c.rounds >= opts.min_coverage);  // different stream still terminates
}

TEST_CASE("mode aggregation returns integer consensus values") {
  const SynthInstance inst = generate({.m = 24, .n = 4, .s = 0.5, .r = 0.2, .seed = 6});
  const WeightMatrix W = build_weights(inst.observed);
  MiOptions opts;
  opts.min_coverage = 3;
  opts.mode_aggregate = true;
  const MiResult res = impute_mi(inst.observed, W, dqp_base(), opts);
  const ColumnScale scale = column_scales(inst.observed);
  for (const ImputedEntry& e : res.aggregated.entries) {
    CHECK(e.value == std::round(e.value));
    CHECK(e.value >= scale.lower(e.col));
    CHECK(e.value <= scale.upper(e.col));
  }
}

TEST_CASE("configuration and input guards") {
  const SynthInstance inst = generate({.m = 12, .n = 3, .s = 0.5, .r = 0.2, .seed = 8});
  const WeightMatrix W = build_weights(inst.observed);

  MiOptions bad;
  bad.row_fraction = 0;
  CHECK_THROWS_AS(impute_mi(inst.observed, W, dqp_base(), bad), ConfigError);
  bad.row_fraction = 1.2;
  CHECK_THROWS_AS(impute_mi(inst.observed, W, dqp_base(), bad), ConfigError);

  MiOptions tiny;
  tiny.row_fraction = 0.05;  // one row per draw
  CHECK_THROWS_AS(impute_mi(inst.observed, W, dqp_base(), tiny), ConfigError);

  MiOptions zero_cov;
  zero_cov.min_coverage = 0;
  CHECK_THROWS_AS(impute_mi(inst.observed, W, dqp_base(), zero_cov), ConfigError);

  const RatingMatrix split = fixtures::split_graph_fixture();
  CHECK_THROWS_AS(impute_mi(split, build_weights(split), dqp_base(), {}),
                  EstimatabilityError);
}

TEST_CASE("complete input returns immediately") {
  const RatingMatrix M = fixtures::matrix_of({{1, 2}, {3, 4}, {5, 1}});
  const MiResult res = impute_mi(M, build_weights(M), dqp_base(), {});
  CHECK(res.aggregated.entries.empty());
  CHECK(res.pct_zero_sd == 100);
  CHECK(res.rounds == 0);
}
