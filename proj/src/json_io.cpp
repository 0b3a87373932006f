#include "concord/json_io.hpp"

#include <cmath>

namespace concord {

namespace {

Json num(Real v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json int_matrix_json(const IntMatrix& M) {
  Json rows = Json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json pair_labels(const std::vector<IndexPair>& pairs, const RatingMatrix& M) {
  Json out = Json::array();
  for (const auto& [a, b] : pairs)
    out.push_back(Json::array({M.col_labels[a], M.col_labels[b]}));
  return out;
}

}  // namespace

Json matrix_json(const Matrix& M) {
  Json rows = Json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(num(M(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const RatingMatrix& M) {
  return Json{{"id_label", M.id_label},
              {"row_labels", M.row_labels},
              {"col_labels", M.col_labels},
              {"integer_mode", M.integer_mode},
              {"values", matrix_json(M.values)}};
}

Json to_json(const EstimatabilityReport& report, const RatingMatrix& M) {
  Json components = Json::array();
  for (const auto& comp : report.components) {
    Json labels = Json::array();
    for (const Index c : comp) labels.push_back(M.col_labels[c]);
    components.push_back(std::move(labels));
  }
  return Json{{"estimatable", report.estimatable},
              {"dataset_level", report.dataset_level},
              {"level1", report.level1},
              {"components", std::move(components)},
              {"level_histogram", report.level_histogram},
              {"levels", int_matrix_json(report.levels)}};
}

Json to_json(const WeightMatrix& W, const RatingMatrix& M) {
  return Json{{"mode", W.mode == WeightMode::kendall ? "kendall" : "uniform"},
              {"epsilon", W.epsilon},
              {"floored", pair_labels(W.floored, M)},
              {"undefined", pair_labels(W.undefined, M)},
              {"weights", matrix_json(W.w)}};
}

Json to_json(const PairReport& report, const RatingMatrix& M) {
  return Json{{"labels", M.col_labels},
              {"alpha", report.alpha},
              {"tau", matrix_json(report.tau)},
              {"common", int_matrix_json(report.common)},
              {"u", matrix_json(report.u_stat)},
              {"p", matrix_json(report.u_p)},
              {"direction", int_matrix_json(report.direction)}};
}

Json to_json(const ImputationResult& result) {
  Json entries = Json::array();
  for (const auto& e : result.entries) {
    entries.push_back(Json{{"row", result.completed.row_labels[e.row]},
                           {"col", result.completed.col_labels[e.col]},
                           {"continuous", num(e.continuous)},
                           {"value", num(e.value)}});
  }
  return Json{{"algorithm", result.algorithm},
              {"objective", num(result.objective)},
              {"residual", num(result.residual)},
              {"seconds", result.seconds},
              {"entries", std::move(entries)},
              {"completed", to_json(result.completed)}};
}

Json to_json(const MiResult& result) {
  return Json{{"rounds", result.rounds},
              {"pct_zero_sd", num(result.pct_zero_sd)},
              {"avg_sd", num(result.avg_sd)},
              {"row_coverage", result.row_coverage},
              {"aggregated", to_json(result.aggregated)}};
}

Json to_json(const SynthInstance& inst) {
  return Json{{"spec",
               Json{{"m", inst.spec.m},
                    {"n", inst.spec.n},
                    {"s", inst.spec.s},
                    {"r", inst.spec.r},
                    {"seed", inst.spec.seed}}},
              {"rescued_rows", inst.rescued_rows},
              {"correlation", matrix_json(inst.correlation)},
              {"observed", to_json(inst.observed)},
              {"truth", to_json(inst.truth)}};
}

namespace {

Json to_json(const EvalRow& r) {
  return Json{{"dataset", r.dataset},
              {"algorithm", r.algorithm},
              {"m", r.m},
              {"n", r.n},
              {"s", num(r.s)},
              {"r", num(r.r)},
              {"seed", r.seed},
              {"fold", r.fold},
              {"scored", r.scores.n},
              {"accuracy", num(r.scores.accuracy)},
              {"rmse", num(r.scores.rmse)},
              {"mad", num(r.scores.mad)},
              {"tau_rmse", num(r.tau.rmse)},
              {"tau_mad", num(r.tau.mad)},
              {"tau_avg", num(r.tau.avg)},
              {"tau_pairs", r.tau.pairs},
              {"tau_skipped", r.tau.skipped},
              {"seconds", r.seconds},
              {"objective", num(r.objective)},
              {"pct_zero_sd", num(r.pct_zero_sd)},
              {"avg_sd", num(r.avg_sd)}};
}

}  // namespace

Json to_json(const EvalReport& report) {
  Json rows = Json::array();
  for (const EvalRow& r : report.rows) rows.push_back(to_json(r));
  Json aggregate = Json::array();
  for (const EvalRow& r : report.aggregate) aggregate.push_back(to_json(r));
  return Json{{"rows", std::move(rows)},
              {"aggregate", std::move(aggregate)},
              {"table", report.table}};
}

}  // namespace concord
