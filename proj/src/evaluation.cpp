#include "concord/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "concord/dqp_solver.hpp"
#include "concord/error.hpp"
#include "concord/estimatability.hpp"

namespace concord {

namespace {

std::vector<Index> empty_lines(const RatingMatrix& M, bool rows) {
  std::vector<Index> out;
  const Index outer = rows ? M.rows() : M.cols();
  const Index inner = rows ? M.cols() : M.rows();
  for (Index a = 0; a < outer; ++a) {
    bool any = false;
    for (Index b = 0; b < inner && !any; ++b)
      any = rows ? M.observed(a, b) : M.observed(b, a);
    if (!any) out.push_back(a);
  }
  return out;
}

}  // namespace

std::vector<FoldInstance> make_folds(const RatingMatrix& M, Index k,
                                     std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (!is_estimatable(M))
    throw EstimatabilityError("dataset is not estimatable; cannot form folds");

  std::vector<IndexPair> observed;
  for (Index i = 0; i < M.rows(); ++i)
    for (Index j = 0; j < M.cols(); ++j)
      if (M.observed(i, j)) observed.emplace_back(i, j);
  if (static_cast<Index>(observed.size()) < k)
    throw ConfigError("fewer observed entries than folds");

  std::mt19937_64 rng(seed);
  std::shuffle(observed.begin(), observed.end(), rng);

  std::vector<FoldInstance> folds;
  folds.reserve(static_cast<std::size_t>(k));
  for (Index f = 0; f < k; ++f) {
    FoldInstance inst;
    inst.train = M;
    std::vector<IndexPair> held;
    for (std::size_t t = static_cast<std::size_t>(f); t < observed.size();
         t += static_cast<std::size_t>(k)) {
      held.push_back(observed[t]);
      inst.train.values(observed[t].first, observed[t].second) = kMissing;
    }

    const auto restore_at = [&](std::size_t pos) {
      const auto [i, j] = held[pos];
      inst.train.values(i, j) = M.values(i, j);
      held.erase(held.begin() + static_cast<std::ptrdiff_t>(pos));
      ++inst.restored;
    };
    const auto restore_random = [&](const std::vector<std::size_t>& candidates) {
      std::uniform_int_distribution<std::size_t> d(0, candidates.size() - 1);
      restore_at(candidates[d(rng)]);
    };

    // every subject and provider keeps at least one rating
    for (const bool by_rows : {true, false}) {
      for (const Index line : empty_lines(inst.train, by_rows)) {
        std::vector<std::size_t> candidates;
        for (std::size_t t = 0; t < held.size(); ++t)
          if ((by_rows ? held[t].first : held[t].second) == line)
            candidates.push_back(t);
        if (!candidates.empty()) restore_random(candidates);
      }
    }

    // reconnect the provider graph, preferring deletions that bridge components
    while (!is_estimatable(inst.train)) {
      const auto components = rp_components(inst.train);
      std::vector<int> comp(static_cast<std::size_t>(M.cols()), 0);
      for (std::size_t c = 0; c < components.size(); ++c)
        for (const Index col : components[c]) comp[static_cast<std::size_t>(col)] = static_cast<int>(c);

      std::vector<std::size_t> bridging;
      for (std::size_t t = 0; t < held.size(); ++t) {
        const auto [i, j] = held[t];
        for (Index l = 0; l < M.cols(); ++l) {
          if (inst.train.observed(i, l) && comp[static_cast<std::size_t>(l)] !=
                                               comp[static_cast<std::size_t>(j)]) {
            bridging.push_back(t);
            break;
          }
        }
      }
      if (!bridging.empty()) {
        restore_random(bridging);
      } else if (!held.empty()) {
        std::uniform_int_distribution<std::size_t> d(0, held.size() - 1);
        restore_at(d(rng));
      } else {
        throw EstimatabilityError("fold restoration exhausted all deletions");
      }
    }

    inst.held.reserve(held.size());
    for (const auto& [i, j] : held) inst.held.push_back({i, j, M.values(i, j)});
    folds.push_back(std::move(inst));
  }
  return folds;
}

Scores score_imputation(const RatingMatrix& completed,
                        const std::vector<HeldEntry>& held) {
  Scores s;
  if (held.empty()) return s;
  Index exact = 0;
  Real sq = 0, ab = 0;
  for (const auto& h : held) {
    const Real pred = completed.values(h.row, h.col);
    const Real err = pred - h.value;
    if (err == 0) ++exact;
    sq += err * err;
    ab += std::abs(err);
  }
  s.n = static_cast<Index>(held.size());
  s.accuracy = static_cast<Real>(exact) / static_cast<Real>(s.n);
  s.rmse = std::sqrt(sq / static_cast<Real>(s.n));
  s.mad = ab / static_cast<Real>(s.n);
  return s;
}

TauDelta kendall_delta(const RatingMatrix& original, const RatingMatrix& completed) {
  TauDelta d;
  std::vector<Real> before_a, before_b, after_a, after_b;
  Real sq = 0, ab = 0, sum = 0;
  for (Index a = 0; a < original.cols(); ++a) {
    for (Index b = a + 1; b < original.cols(); ++b) {
      before_a.clear();
      before_b.clear();
      after_a.clear();
      after_b.clear();
      for (Index i = 0; i < original.rows(); ++i) {
        if (original.observed(i, a) && original.observed(i, b)) {
          before_a.push_back(original.values(i, a));
          before_b.push_back(original.values(i, b));
        }
        if (completed.observed(i, a) && completed.observed(i, b)) {
          after_a.push_back(completed.values(i, a));
          after_b.push_back(completed.values(i, b));
        }
      }
      const TauResult before = kendall_tau_b(before_a, before_b);
      const TauResult after = kendall_tau_b(after_a, after_b);
      if (!before.defined || !after.defined) {
        ++d.skipped;
        continue;
      }
      const Real delta = after.tau - before.tau;
      sq += delta * delta;
      ab += std::abs(delta);
      sum += delta;
      ++d.pairs;
    }
  }
  if (d.pairs > 0) {
    d.rmse = std::sqrt(sq / static_cast<Real>(d.pairs));
    d.mad = ab / static_cast<Real>(d.pairs);
    d.avg = sum / static_cast<Real>(d.pairs);
  }
  return d;
}

ImputationResult impute_baseline(const RatingMatrix& M, Baseline kind) {
  const auto t0 = std::chrono::steady_clock::now();
  ImputationResult res;
  res.algorithm = kind == Baseline::column_mean ? "mean" : "mode";
  res.completed = M;
  const ColumnScale scale = column_scales(M);

  Vector fill(M.cols());
  for (Index j = 0; j < M.cols(); ++j) {
    if (kind == Baseline::column_mean) {
      Real sum = 0;
      Index cnt = 0;
      for (Index i = 0; i < M.rows(); ++i) {
        if (M.observed(i, j)) {
          sum += M.values(i, j);
          ++cnt;
        }
      }
      fill(j) = sum / static_cast<Real>(cnt);
    } else {
      std::map<Real, Index> tally;
      for (Index i = 0; i < M.rows(); ++i)
        if (M.observed(i, j)) ++tally[M.values(i, j)];
      Index best = 0;
      Real value = 0;
      for (const auto& [v, hits] : tally) {
        if (hits > best) {
          best = hits;
          value = v;
        }
      }
      fill(j) = value;
    }
  }

  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (M.observed(i, j)) continue;
      const Real value =
          M.integer_mode && kind == Baseline::column_mean
              ? round_clamp(fill(j), scale.lower(j), scale.upper(j))
              : fill(j);
      res.completed.values(i, j) = value;
      res.entries.push_back({i, j, fill(j), value});
    }
  }
  res.seconds =
      std::chrono::duration<Real>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

namespace {

BaseImputer make_base(const std::string& name, const QpOptions& qp) {
  if (name == "qp-as")
    return [qp](const RatingMatrix& M, const WeightMatrix& W) {
      return impute_qp_as(M, W, qp);
    };
  if (name == "dqp-svas")
    return [](const RatingMatrix& M, const WeightMatrix& W) {
      return impute_dqp_svas(M, W);
    };
  throw ConfigError("unknown base algorithm: " + name);
}

void run_instance(const EvalConfig& cfg, const RatingMatrix& train,
                  const std::vector<HeldEntry>& held, const EvalRow& proto,
                  std::vector<EvalRow>& rows) {
  const WeightMatrix W = build_weights(train, cfg.weights, cfg.epsilon);

  const auto emit = [&](const ImputationResult& result) {
    EvalRow row = proto;
    row.algorithm = result.algorithm;
    row.scores = score_imputation(result.completed, held);
    row.tau = kendall_delta(train, result.completed);
    row.seconds = result.seconds;
    row.objective = result.objective;
    rows.push_back(std::move(row));
    return &rows.back();
  };

  for (const std::string& name : cfg.algorithms) {
    try {
      if (name == "qp-as") {
        emit(impute_qp_as(train, W, cfg.qp));
      } else if (name == "dqp-svas") {
        emit(impute_dqp_svas(train, W));
      } else if (name == "mean") {
        emit(impute_baseline(train, Baseline::column_mean));
      } else if (name == "mode") {
        emit(impute_baseline(train, Baseline::column_mode));
      } else {
        throw ConfigError("unknown algorithm: " + name);
      }
    } catch (const EstimatabilityError&) {
    } catch (const ResourceError&) {
    }
  }
  if (cfg.mi_base) {
    try {
      const MiResult mi = impute_mi(train, W, make_base(*cfg.mi_base, cfg.qp), cfg.mi);
      EvalRow* row = emit(mi.aggregated);
      row->pct_zero_sd = mi.pct_zero_sd;
      row->avg_sd = mi.avg_sd;
    } catch (const EstimatabilityError&) {
    } catch (const ResourceError&) {
    }
  }
}

Real nan_mean(const std::vector<Real>& values) {
  Real sum = 0;
  Index cnt = 0;
  for (const Real v : values) {
    if (std::isfinite(v)) {
      sum += v;
      ++cnt;
    }
  }
  return cnt > 0 ? sum / static_cast<Real>(cnt) : std::numeric_limits<Real>::quiet_NaN();
}

std::string group_key(const EvalRow& r) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s|%s|%lld|%lld|%.6g|%.6g", r.dataset.c_str(),
                r.algorithm.c_str(), static_cast<long long>(r.m),
                static_cast<long long>(r.n), r.s, r.r);
  return buf;
}

std::vector<EvalRow> aggregate_rows(const std::vector<EvalRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const EvalRow*>> groups;
  for (const EvalRow& r : rows) {
    const std::string key = group_key(r);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<EvalRow> out;
  for (const std::string& key : order) {
    const auto& members = groups[key];
    EvalRow agg = *members.front();
    agg.fold = -1;
    agg.seed = 0;
    const auto mean_of = [&](auto field) {
      std::vector<Real> v;
      v.reserve(members.size());
      for (const EvalRow* r : members) v.push_back(field(*r));
      return nan_mean(v);
    };
    agg.scores.accuracy = mean_of([](const EvalRow& r) { return r.scores.accuracy; });
    agg.scores.rmse = mean_of([](const EvalRow& r) { return r.scores.rmse; });
    agg.scores.mad = mean_of([](const EvalRow& r) { return r.scores.mad; });
    agg.scores.n = 0;
    for (const EvalRow* r : members) agg.scores.n += r->scores.n;
    agg.tau.rmse = mean_of([](const EvalRow& r) { return r.tau.rmse; });
    agg.tau.mad = mean_of([](const EvalRow& r) { return r.tau.mad; });
    agg.tau.avg = mean_of([](const EvalRow& r) { return r.tau.avg; });
    agg.tau.pairs = 0;
    agg.tau.skipped = 0;
    for (const EvalRow* r : members) {
      agg.tau.pairs += r->tau.pairs;
      agg.tau.skipped += r->tau.skipped;
    }
    agg.seconds = mean_of([](const EvalRow& r) { return r.seconds; });
    agg.objective = mean_of([](const EvalRow& r) { return r.objective; });
    agg.pct_zero_sd = mean_of([](const EvalRow& r) { return r.pct_zero_sd; });
    agg.avg_sd = mean_of([](const EvalRow& r) { return r.avg_sd; });
    out.push_back(std::move(agg));
  }
  return out;
}

std::string format_table(const std::vector<EvalRow>& aggregate) {
  std::ostringstream out;
  char buf[240];
  std::snprintf(buf, sizeof(buf), "%-12s %-12s %6s %4s %5s %5s %8s %8s %8s %8s %9s\n",
                "dataset", "algorithm", "m", "n", "s", "r", "accuracy", "rmse",
                "mad", "dtau", "seconds");
  out << buf;
  const auto num = [](Real v, const char* fmt) {
    char cell[32];
    if (std::isfinite(v))
      std::snprintf(cell, sizeof(cell), fmt, v);
    else
      std::snprintf(cell, sizeof(cell), "-");
    return std::string(cell);
  };
  for (const EvalRow& r : aggregate) {
    std::snprintf(buf, sizeof(buf),
                  "%-12s %-12s %6lld %4lld %5s %5s %8s %8s %8s %8s %9s\n",
                  r.dataset.c_str(), r.algorithm.c_str(), static_cast<long long>(r.m),
                  static_cast<long long>(r.n), num(r.s, "%.2f").c_str(),
                  num(r.r, "%.2f").c_str(), num(r.scores.accuracy, "%.4f").c_str(),
                  num(r.scores.rmse, "%.4f").c_str(), num(r.scores.mad, "%.4f").c_str(),
                  num(r.tau.avg, "%+.4f").c_str(), num(r.seconds, "%.3f").c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace

EvalReport run_experiment(const EvalConfig& cfg) {
  EvalReport report;
  if (cfg.csv_path) {
    const LoadResult loaded = load_csv(*cfg.csv_path, cfg.csv);
    const RatingMatrix& M = loaded.matrix;
    EvalRow proto;
    proto.dataset = std::filesystem::path(*cfg.csv_path).filename().string();
    proto.m = M.rows();
    proto.n = M.cols();
    proto.seed = cfg.fold_seed;
    const auto folds = make_folds(M, cfg.folds, cfg.fold_seed);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      proto.fold = static_cast<Index>(f);
      run_instance(cfg, folds[f].train, folds[f].held, proto, report.rows);
    }
  } else {
    if (cfg.m_list.empty() || cfg.n_list.empty() || cfg.s_list.empty() ||
        cfg.r_list.empty() || cfg.seeds.empty())
      throw ConfigError("synthetic evaluation needs m, n, s, r and seed lists");
    for (const Index m : cfg.m_list) {
      for (const Index n : cfg.n_list) {
        for (const Real s : cfg.s_list) {
          for (const Real r : cfg.r_list) {
            for (const std::uint64_t seed : cfg.seeds) {
              const SynthInstance inst = generate({m, n, s, r, seed});
              std::vector<HeldEntry> held;
              for (Index i = 0; i < m; ++i)
                for (Index j = 0; j < n; ++j)
                  if (!inst.observed.observed(i, j))
                    held.push_back({i, j, inst.truth.values(i, j)});
              EvalRow proto;
              proto.dataset = "synth";
              proto.m = m;
              proto.n = n;
              proto.s = s;
              proto.r = r;
              proto.seed = seed;
              run_instance(cfg, inst.observed, held, proto, report.rows);
            }
          }
        }
      }
    }
  }
  report.aggregate = aggregate_rows(report.rows);
  report.table = format_table(report.aggregate);
  return report;
}

void write_rows_csv(const std::vector<EvalRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "dataset,algorithm,m,n,s,r,seed,fold,scored,accuracy,rmse,mad,"
         "tau_rmse,tau_mad,tau_avg,tau_pairs,tau_skipped,seconds,objective,"
         "pct_zero_sd,avg_sd\n";
  const auto cell = [](Real v) {
    if (!std::isfinite(v)) return std::string();
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  for (const EvalRow& r : rows) {
    out << r.dataset << ',' << r.algorithm << ',' << r.m << ',' << r.n << ','
        << cell(r.s) << ',' << cell(r.r) << ',' << r.seed << ',' << r.fold << ','
        << r.scores.n << ',' << cell(r.scores.accuracy) << ',' << cell(r.scores.rmse)
        << ',' << cell(r.scores.mad) << ',' << cell(r.tau.rmse) << ','
        << cell(r.tau.mad) << ',' << cell(r.tau.avg) << ',' << r.tau.pairs << ','
        << r.tau.skipped << ',' << cell(r.seconds) << ',' << cell(r.objective) << ','
        << cell(r.pct_zero_sd) << ',' << cell(r.avg_sd) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace concord
