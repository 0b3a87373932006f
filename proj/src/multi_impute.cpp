#include "concord/multi_impute.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "concord/error.hpp"
#include "concord/estimatability.hpp"
#include "concord/qp_solver.hpp"

namespace concord {

namespace {

RatingMatrix take_rows(const RatingMatrix& M, const std::vector<Index>& rows) {
  RatingMatrix S;
  S.values.resize(static_cast<Index>(rows.size()), M.cols());
  S.row_labels.reserve(rows.size());
  for (std::size_t t = 0; t < rows.size(); ++t) {
    S.values.row(static_cast<Index>(t)) = M.values.row(rows[t]);
    S.row_labels.push_back(M.row_labels[rows[t]]);
  }
  S.col_labels = M.col_labels;
  S.id_label = M.id_label;
  S.integer_mode = M.integer_mode;
  return S;
}

}  // namespace

MiResult impute_mi(const RatingMatrix& M, const WeightMatrix& W,
                   const BaseImputer& base, const MiOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  if (opts.row_fraction <= 0 || opts.row_fraction > 1)
    throw ConfigError("row fraction must lie in (0, 1]");
  if (opts.min_coverage < 1) throw ConfigError("coverage target must be positive");
  const Index m = M.rows();
  const Index k =
      static_cast<Index>(std::llround(opts.row_fraction * static_cast<Real>(m)));
  if (k < 2) throw ConfigError("row fraction keeps fewer than 2 subjects");
  if (!is_estimatable(M)) throw EstimatabilityError("dataset is not estimatable");

  MiResult out;
  out.row_coverage.assign(static_cast<std::size_t>(m), 0);
  const MissingIndex missing = MissingIndex::of(M);
  if (missing.size() == 0) {
    out.aggregated.algorithm = "mi";
    out.aggregated.completed = M;
    out.aggregated.objective = 0;
    out.pct_zero_sd = 100;
    out.aggregated.seconds =
        std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }

  struct Cell {
    Index count = 0;
    Real sum = 0;
    Real sumsq = 0;
    std::map<Real, Index> tally;  // rounded value -> rounds
  };
  std::vector<Cell> cells(missing.entries.size());
  IntMatrix slot(m, M.cols());
  slot.setConstant(-1);
  for (std::size_t q = 0; q < missing.entries.size(); ++q)
    slot(missing.entries[q].first, missing.entries[q].second) = static_cast<int>(q);

  std::mt19937_64 rng(opts.seed);
  std::vector<Index> idx(static_cast<std::size_t>(m));
  std::string base_name;
  while (true) {
    if (out.rounds > 0 &&
        *std::min_element(out.row_coverage.begin(), out.row_coverage.end()) >=
            opts.min_coverage)
      break;

    std::vector<Index> rows;
    RatingMatrix sub;
    for (Index tries = 0;; ++tries) {
      if (tries >= opts.max_retries)
        throw EstimatabilityError("no estimatable subsample within " +
                                  std::to_string(opts.max_retries) + " draws");
      std::iota(idx.begin(), idx.end(), Index{0});
      for (Index t = 0; t < k; ++t) {
        std::uniform_int_distribution<Index> d(t, m - 1);
        std::swap(idx[static_cast<std::size_t>(t)], idx[static_cast<std::size_t>(d(rng))]);
      }
      rows.assign(idx.begin(), idx.begin() + k);
      std::sort(rows.begin(), rows.end());
      sub = take_rows(M, rows);
      if (is_estimatable(sub)) break;
    }

    const ImputationResult round = base(sub, W);
    base_name = round.algorithm;
    for (const Index r : rows) ++out.row_coverage[static_cast<std::size_t>(r)];
    for (const auto& e : round.entries) {
      Cell& c = cells[static_cast<std::size_t>(slot(rows[static_cast<std::size_t>(e.row)], e.col))];
      ++c.count;
      c.sum += e.continuous;
      c.sumsq += e.continuous * e.continuous;
      ++c.tally[e.value];
    }
    ++out.rounds;
  }

  const ColumnScale scale = column_scales(M);
  ImputationResult agg;
  agg.algorithm = base_name + "+mi";
  agg.completed = M;
  Real sd_total = 0;
  Index zero_sd = 0;
  for (std::size_t q = 0; q < missing.entries.size(); ++q) {
    const auto [i, j] = missing.entries[q];
    const Cell& c = cells[q];
    const Real mean = c.sum / static_cast<Real>(c.count);
    const Real var = std::max(0.0, c.sumsq / static_cast<Real>(c.count) - mean * mean);
    sd_total += std::sqrt(var);
    if (c.tally.size() == 1) ++zero_sd;

    Real value;
    if (opts.mode_aggregate) {
      Index best = 0;
      value = c.tally.begin()->first;
      for (const auto& [v, hits] : c.tally) {
        if (hits > best) {
          best = hits;
          value = v;
        }
      }
    } else {
      value = M.integer_mode ? round_clamp(mean, scale.lower(j), scale.upper(j)) : mean;
    }
    agg.completed.values(i, j) = value;
    agg.entries.push_back({i, j, mean, value});
  }
  out.pct_zero_sd = 100.0 * static_cast<Real>(zero_sd) /
                    static_cast<Real>(missing.entries.size());
  out.avg_sd = sd_total / static_cast<Real>(missing.entries.size());
  agg.objective = objective_value(agg.completed, W.w, missing.entries);
  agg.seconds =
      std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
  out.aggregated = std::move(agg);
  return out;
}

}  // namespace concord
