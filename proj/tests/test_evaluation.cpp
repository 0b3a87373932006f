#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "concord/error.hpp"
#include "concord/evaluation.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace concord;
using fixtures::X;

TEST_CASE("folds partition the observed cells and stay solvable") {
  const SynthInstance inst = generate({.m = 40, .n = 4, .s = 0.5, .r = 0.2, .seed = 5});
  const RatingMatrix& M = inst.observed;
  const Index k = 5;
  const auto folds = make_folds(M, k, 17);
  REQUIRE(static_cast<Index>(folds.size()) == k);

  std::set<IndexPair> taken;
  Index held_total = 0, restored_total = 0;
  for (const FoldInstance& fold : folds) {
    CHECK(is_estimatable(fold.train));
    held_total += static_cast<Index>(fold.held.size());
    restored_total += fold.restored;
    for (const HeldEntry& h : fold.held) {
      CHECK(M.observed(h.row, h.col));
      CHECK(h.value == M.values(h.row, h.col));
      CHECK(!fold.train.observed(h.row, h.col));  // actually deleted
      CHECK(taken.insert({h.row, h.col}).second);  // held at most once overall
    }
    // train = original minus held
    Index train_observed = 0;
    for (Index i = 0; i < M.rows(); ++i)
      for (Index j = 0; j < M.cols(); ++j) {
        if (fold.train.observed(i, j)) {
          ++train_observed;
          CHECK(M.observed(i, j));
        }
      }
    CHECK(train_observed ==
          M.observed_count() - static_cast<Index>(fold.held.size()));
    for (Index i = 0; i < fold.train.rows(); ++i)
      CHECK(!fold.train.values.row(i).array().isNaN().all());
  }
  CHECK(held_total + restored_total == M.observed_count());

  // deterministic per seed
  const auto again = make_folds(M, k, 17);
  REQUIRE(again.size() == folds.size());
  for (std::size_t f = 0; f < folds.size(); ++f)
    CHECK(again[f].held.size() == folds[f].held.size());
}

TEST_CASE("fold construction rejects bad inputs") {
  const RatingMatrix M = fixtures::matrix_of({{1, 2}, {3, 4}, {5, 1}});
  CHECK_THROWS_AS(make_folds(M, 1, 1), ConfigError);
  CHECK_THROWS_AS(make_folds(M, 7, 1), ConfigError);  // more folds than cells
  CHECK_THROWS_AS(make_folds(fixtures::split_graph_fixture(), 2, 1),
                  EstimatabilityError);
}

TEST_CASE("imputation scores compare completed against held") {
  RatingMatrix completed = fixtures::matrix_of({{1, 2}, {3, 4}});
  const std::vector<HeldEntry> held{{0, 0, 1}, {0, 1, 4}, {1, 0, 3}};
  const Scores s = score_imputation(completed, held);
  CHECK(s.n == 3);
  CHECK(s.accuracy == doctest::Approx(2.0 / 3));  // (1,1) hit, (4,2) miss, (3,3) hit
  CHECK(s.rmse == doctest::Approx(std::sqrt(4.0 / 3)));
  CHECK(s.mad == doctest::Approx(2.0 / 3));

  const Scores empty = score_imputation(completed, {});
  CHECK(empty.n == 0);
  CHECK(std::isnan(empty.accuracy));
}

TEST_CASE("tau delta measures the agreement shift") {
  // overlap rows 0..1 disagree; the completion aligns the full columns
  const RatingMatrix original = fixtures::matrix_of({{1, 2}, {2, 1}, {3, X}, {4, X}});
  RatingMatrix completed = original;
  completed.values(2, 1) = 3;
  completed.values(3, 1) = 4;
  const TauDelta d = kendall_delta(original, completed);
  CHECK(d.pairs == 1);
  CHECK(d.skipped == 0);
  const Real before = -1.0;
  const Real after = 4.0 / 6.0;
  CHECK(d.avg == doctest::Approx(after - before));
  CHECK(d.rmse == doctest::Approx(std::abs(after - before)));
  CHECK(d.mad == doctest::Approx(std::abs(after - before)));

  // a complete matrix shifts nothing
  const RatingMatrix full = fixtures::matrix_of({{1, 2}, {2, 3}, {3, 4}});
  const TauDelta none = kendall_delta(full, full);
  CHECK(none.pairs == 1);
  CHECK(none.avg == doctest::Approx(0.0));

  // undefined taus are skipped, not scored
  const RatingMatrix flat = fixtures::matrix_of({{1, 3}, {2, 3}, {3, X}});
  RatingMatrix flat_done = flat;
  flat_done.values(2, 1) = 3;
  const TauDelta skip = kendall_delta(flat, flat_done);
  CHECK(skip.pairs == 0);
  CHECK(skip.skipped == 1);
  CHECK(std::isnan(skip.avg));
}

TEST_CASE("column mean and mode baselines") {
  const RatingMatrix M = fixtures::matrix_of({{1, 3}, {1, 5}, {2, X}, {2, X}, {X, X}});
  SUBCASE("mean rounds half away from zero") {
    const ImputationResult res = impute_baseline(M, Baseline::column_mean);
    CHECK(res.algorithm == "mean");
    CHECK(res.completed.values(4, 0) == 2);  // mean 1.5 rounds up
    CHECK(res.completed.values(2, 1) == 4);  // mean 4
    REQUIRE(res.entries.size() == 4);
    CHECK(res.entries[0].row == 2);  // row-major order
    CHECK(res.entries[0].col == 1);
    CHECK(res.entries[0].continuous == doctest::Approx(4.0));
    CHECK(res.entries[2].continuous == doctest::Approx(1.5));
  }
  SUBCASE("mode breaks ties toward the smaller rating") {
    const ImputationResult res = impute_baseline(M, Baseline::column_mode);
    CHECK(res.algorithm == "mode");
    CHECK(res.completed.values(4, 0) == 1);  // 1 and 2 tie
    CHECK(res.completed.values(2, 1) == 3);  // 3 and 5 tie
  }
}

TEST_CASE("synthetic grid experiments produce one row per algorithm") {
  EvalConfig cfg;
  cfg.m_list = {30};
  cfg.n_list = {4};
  cfg.s_list = {0.6};
  cfg.r_list = {0.2};
  cfg.seeds = {1, 2};
  cfg.algorithms = {"dqp-svas", "mean"};
  const EvalReport rep = run_experiment(cfg);
  REQUIRE(rep.rows.size() == 4);
  for (const EvalRow& row : rep.rows) {
    CHECK(row.dataset == "synth");
    CHECK(row.m == 30);
    CHECK(row.scores.n > 0);
    CHECK(row.scores.accuracy >= 0);
    CHECK(row.scores.accuracy <= 1);
    CHECK(row.scores.rmse >= 0);
    CHECK(row.seconds >= 0);
  }
  REQUIRE(rep.aggregate.size() == 2);
  for (const EvalRow& row : rep.aggregate) CHECK(row.fold == -1);
  CHECK(rep.table.find("dqp-svas") != std::string::npos);
  CHECK(rep.table.find("mean") != std::string::npos);

  EvalConfig missing_lists;
  missing_lists.algorithms = {"mean"};
  CHECK_THROWS_AS(run_experiment(missing_lists), ConfigError);
}

TEST_CASE("strong consensus favours the discordance solver over the mean") {
  EvalConfig cfg;
  cfg.m_list = {200};
  cfg.n_list = {5};
  cfg.s_list = {0.7};
  cfg.r_list = {0.3};
  cfg.seeds = {1, 2, 3};
  cfg.algorithms = {"dqp-svas", "mean"};
  const EvalReport rep = run_experiment(cfg);
  Real dqp = std::numeric_limits<Real>::quiet_NaN();
  Real mean = std::numeric_limits<Real>::quiet_NaN();
  for (const EvalRow& row : rep.aggregate) {
    if (row.algorithm == "dqp-svas") dqp = row.scores.rmse;
    if (row.algorithm == "mean") mean = row.scores.rmse;
  }
  CHECK(dqp < mean);
}

TEST_CASE("csv experiments run the fold protocol") {
  const auto dir = std::filesystem::temp_directory_path() / "concord-eval-test";
  std::filesystem::create_directories(dir);
  const auto csv = (dir / "ratings.csv").string();
  {
    const SynthInstance inst =
        generate({.m = 30, .n = 4, .s = 0.6, .r = 0.15, .seed = 9});
    save_csv(inst.observed, csv);
  }

  EvalConfig cfg;
  cfg.csv_path = csv;
  cfg.folds = 3;
  cfg.fold_seed = 4;
  cfg.algorithms = {"mean", "dqp-svas"};
  const EvalReport rep = run_experiment(cfg);
  CHECK(rep.rows.size() == 6);
  for (const EvalRow& row : rep.rows) {
    CHECK(row.dataset == "ratings.csv");
    CHECK(row.fold >= 0);
    CHECK(row.fold < 3);
    CHECK(row.scores.n > 0);
  }

  const auto out = (dir / "rows.csv").string();
  write_rows_csv(rep.rows, out);
  std::ifstream in(out);
  std::string line;
  Index lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 7);  // header plus one line per row

  CHECK_THROWS_AS(write_rows_csv(rep.rows, (dir / "no-such" / "x.csv").string()),
                  IoError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("multiple imputation rows carry stability metrics") {
  EvalConfig cfg;
  cfg.m_list = {30};
  cfg.n_list = {4};
  cfg.s_list = {0.6};
  cfg.r_list = {0.15};
  cfg.seeds = {3};
  cfg.algorithms = {"dqp-svas"};
  cfg.mi_base = "dqp-svas";
  cfg.mi.min_coverage = 3;
  const EvalReport rep = run_experiment(cfg);
  REQUIRE(rep.rows.size() == 2);
  const EvalRow* mi_row = nullptr;
  for (const EvalRow& row : rep.rows)
    if (row.algorithm == "dqp-svas+mi") mi_row = &row;
  REQUIRE(mi_row != nullptr);
  CHECK(mi_row->pct_zero_sd >= 0);
  CHECK(mi_row->pct_zero_sd <= 100);
  CHECK(mi_row->avg_sd >= 0);
  CHECK(std::isnan(rep.rows[0].pct_zero_sd));
}
