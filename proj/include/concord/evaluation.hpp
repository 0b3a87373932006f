#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "concord/csv.hpp"
#include "concord/impute_result.hpp"
#include "concord/multi_impute.hpp"
#include "concord/qp_solver.hpp"
#include "concord/synthetic.hpp"

namespace concord {

struct HeldEntry {
  Index row = 0;
  Index col = 0;
  Real value = 0;
};

struct FoldInstance {
  RatingMatrix train;
  std::vector<HeldEntry> held;
  /// Deletions returned to the observed pool by the assumption-1 and
  /// estimatability guards. Restored entries are not scored.
  Index restored = 0;
};

/// Random k-fold deletion of the observed entries. Every instance keeps
/// assumption 1 and estimatability; blocking deletions are restored.
std::vector<FoldInstance> make_folds(const RatingMatrix& M, Index k,
                                     std::uint64_t seed);

struct Scores {
  Real accuracy = std::numeric_limits<Real>::quiet_NaN();
  Real rmse = std::numeric_limits<Real>::quiet_NaN();
  Real mad = std::numeric_limits<Real>::quiet_NaN();
  Index n = 0;
};

Scores score_imputation(const RatingMatrix& completed,
                        const std::vector<HeldEntry>& held);

/// Provider-agreement shift caused by imputation: tau-b matrices before
/// (overlap subjects only) and after completion, compared over the pairs
/// defined in both. avg > 0 means imputation raised agreement.
struct TauDelta {
  Real rmse = std::numeric_limits<Real>::quiet_NaN();
  Real mad = std::numeric_limits<Real>::quiet_NaN();
  Real avg = std::numeric_limits<Real>::quiet_NaN();
  Index pairs = 0;
  Index skipped = 0;
};

TauDelta kendall_delta(const RatingMatrix& original, const RatingMatrix& completed);

enum class Baseline { column_mean, column_mode };

/// Column mean (rounded, clamped) or column mode (ties to the smaller value).
ImputationResult impute_baseline(const RatingMatrix& M, Baseline kind);

struct EvalConfig {
  // Either a CSV path (k-fold protocol) or a synthetic grid.
  std::optional<std::string> csv_path;
  CsvOptions csv{};
  Index folds = 10;
  std::uint64_t fold_seed = 1;

  std::vector<Index> m_list{};
  std::vector<Index> n_list{};
  std::vector<Real> s_list{};
  std::vector<Real> r_list{};
  std::vector<std::uint64_t> seeds{};

  std::vector<std::string> algorithms{"qp-as", "dqp-svas", "mean", "mode"};
  std::optional<std::string> mi_base;  // adds a "<base>+mi" row per instance
  MiOptions mi{};

  WeightMode weights = WeightMode::kendall;
  Real epsilon = 0.01;
  QpOptions qp{};
};

struct EvalRow {
  std::string dataset;
  std::string algorithm;
  Index m = 0;
  Index n = 0;
  Real s = std::numeric_limits<Real>::quiet_NaN();
  Real r = std::numeric_limits<Real>::quiet_NaN();
  std::uint64_t seed = 0;
  Index fold = -1;
  Scores scores;
  TauDelta tau;
  double seconds = 0;
  Real objective = std::numeric_limits<Real>::quiet_NaN();
  Real pct_zero_sd = std::numeric_limits<Real>::quiet_NaN();  // MI rows only
  Real avg_sd = std::numeric_limits<Real>::quiet_NaN();       // MI rows only
};

struct EvalReport {
  std::vector<EvalRow> rows;
  /// Aggregate means grouped by (dataset parameters, algorithm).
  std::vector<EvalRow> aggregate;
  std::string table;  // printable summary
};

EvalReport run_experiment(const EvalConfig& cfg);

void write_rows_csv(const std::vector<EvalRow>& rows, const std::string& path);

}  // namespace concord
