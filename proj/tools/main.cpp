#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "concord/consensus.hpp"
#include "concord/csv.hpp"
#include "concord/dqp_solver.hpp"
#include "concord/error.hpp"
#include "concord/estimatability.hpp"
#include "concord/evaluation.hpp"
#include "concord/json_io.hpp"
#include "concord/multi_impute.hpp"
#include "concord/parallel.hpp"
#include "concord/qp_solver.hpp"
#include "concord/synthetic.hpp"

namespace {

using namespace concord;

struct InputOpts {
  std::string path;
  std::vector<std::string> missing_tokens;
};

void add_input(CLI::App* cmd, InputOpts& in) {
  cmd->add_option("-i,--input", in.path, "rating matrix CSV")->required();
  cmd->add_option("--missing-token", in.missing_tokens,
                  "extra tokens treated as missing");
}

RatingMatrix load_matrix(const InputOpts& in, bool integer_mode = true) {
  CsvOptions opts;
  opts.integer_mode = integer_mode;
  for (const auto& t : in.missing_tokens) opts.missing_tokens.push_back(t);
  const LoadResult loaded = load_csv(in.path, opts);
  if (loaded.dropped_rows > 0)
    std::cerr << "note: dropped " << loaded.dropped_rows
              << " fully missing subjects\n";
  return loaded.matrix;
}

WeightMode mode_of(const std::string& name) {
  return name == "uniform" ? WeightMode::uniform : WeightMode::kendall;
}

void write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------- analyze --

struct AnalyzeOpts {
  InputOpts in;
  std::string weights = "kendall";
  Real epsilon = 0.01;
  Real alpha = 0.05;
  Index exact_limit = 12;
  std::string json_path;
};

void run_analyze(const AnalyzeOpts& opt) {
  const RatingMatrix M = load_matrix(opt.in);
  const EstimatabilityReport report = analyze_estimatability(M);
  const WeightMatrix W = build_weights(M, mode_of(opt.weights), opt.epsilon);
  const PairReport pairs = pair_report(M, opt.alpha, opt.exact_limit);

  const Index total = M.rows() * M.cols();
  std::printf("subjects: %lld   providers: %lld   observed: %lld (%.1f%%)   missing: %lld\n",
              static_cast<long long>(M.rows()), static_cast<long long>(M.cols()),
              static_cast<long long>(M.observed_count()),
              100.0 * static_cast<double>(M.observed_count()) / static_cast<double>(total),
              static_cast<long long>(M.missing_count()));
  std::printf("estimatable: %s\n", report.estimatable ? "yes" : "no");
  if (report.estimatable)
    std::printf("dataset level: %d\n", report.dataset_level);
  for (std::size_t v = 0; v < report.level_histogram.size(); ++v)
    if (report.level_histogram[v] > 0)
      std::printf("  level %zu entries: %lld\n", v + 1,
                  static_cast<long long>(report.level_histogram[v]));
  if (report.components.size() > 1) {
    std::printf("provider components: %zu\n", report.components.size());
    for (const auto& comp : report.components) {
      std::printf(" ");
      for (const Index c : comp) std::printf(" %s", M.col_labels[c].c_str());
      std::printf("\n");
    }
  }
  const Level1Check level1 = is_level1(M);
  if (level1.ok) {
    std::printf("single-pass solvable: yes\n");
  } else {
    std::printf("single-pass solvable: no (provider %s leaves %zu subjects uncovered)\n",
                M.col_labels[level1.column].c_str(), level1.uncovered_rows.size());
  }
  std::printf("weights: %s", opt.weights.c_str());
  if (W.mode == WeightMode::kendall)
    std::printf(", epsilon %g, floored pairs: %zu (%zu undefined)", W.epsilon,
                W.floored.size(), W.undefined.size());
  std::printf("\n");

  Index directional = 0;
  for (Index a = 0; a < M.cols(); ++a)
    for (Index b = 0; b < M.cols(); ++b)
      if (a != b && pairs.direction(a, b) != 0) ++directional;
  std::printf("missingness screens at alpha %g: %lld directional pairs\n", opt.alpha,
              static_cast<long long>(directional));
  for (Index a = 0; a < M.cols(); ++a) {
    for (Index b = 0; b < M.cols(); ++b) {
      if (a == b || pairs.direction(a, b) == 0) continue;
      std::printf("  subjects unrated by %s rate %s on %s (p=%.4g)\n",
                  M.col_labels[a].c_str(),
                  pairs.direction(a, b) > 0 ? "higher" : "lower",
                  M.col_labels[b].c_str(), pairs.u_p(a, b));
    }
  }

  if (!opt.json_path.empty()) {
    write_json_file(Json{{"matrix",
                          Json{{"subjects", M.rows()},
                               {"providers", M.cols()},
                               {"observed", M.observed_count()},
                               {"missing", M.missing_count()}}},
                         {"estimatability", to_json(report, M)},
                         {"weights", to_json(W, M)},
                         {"pairs", to_json(pairs, M)}},
                    opt.json_path);
  }
}

// ----------------------------------------------------------------- impute --

struct ImputeOpts {
  InputOpts in;
  std::string algorithm = "qp-as";
  std::string output;
  std::string json_path;
  std::string dump_system;
  std::string weights = "kendall";
  Real epsilon = 0.01;
  Index qp_cap = QpOptions{}.max_missing;
  bool no_dedupe = false;
  bool per_component = false;
  bool continuous = false;
  bool mi = false;
  MiOptions mi_opts;
  int threads = 0;
};

ImputationResult run_solver(const std::string& name, const RatingMatrix& M,
                            const WeightMatrix& W, const QpOptions& qp) {
  if (name == "qp-as") return impute_qp_as(M, W, qp);
  if (name == "dqp-svas") return impute_dqp_svas(M, W);
  if (name == "mean") return impute_baseline(M, Baseline::column_mean);
  if (name == "mode") return impute_baseline(M, Baseline::column_mode);
  throw ConfigError("unknown algorithm: " + name);
}

RatingMatrix take_component(const RatingMatrix& M, const std::vector<Index>& cols,
                            std::vector<Index>& rows) {
  rows.clear();
  for (Index i = 0; i < M.rows(); ++i) {
    bool any = false;
    for (const Index j : cols) any = any || M.observed(i, j);
    if (any) rows.push_back(i);
  }
  RatingMatrix S;
  S.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = 0; b < cols.size(); ++b)
      S.values(static_cast<Index>(a), static_cast<Index>(b)) =
          M.values(rows[a], cols[b]);
    S.row_labels.push_back(M.row_labels[rows[a]]);
  }
  for (const Index j : cols) S.col_labels.push_back(M.col_labels[j]);
  S.id_label = M.id_label;
  S.integer_mode = M.integer_mode;
  return S;
}

ImputationResult run_per_component(const std::string& name, const RatingMatrix& M,
                                   WeightMode wmode, Real epsilon,
                                   const QpOptions& qp) {
  ImputationResult res;
  res.algorithm = name;
  res.completed = M;
  Real seconds = 0;
  std::vector<Index> rows;
  for (const auto& cols : rp_components(M)) {
    if (cols.size() < 2) continue;
    const RatingMatrix sub = take_component(M, cols, rows);
    if (sub.complete()) continue;
    const WeightMatrix W = build_weights(sub, wmode, epsilon);
    const ImputationResult part = run_solver(name, sub, W, qp);
    seconds += part.seconds;
    for (const auto& e : part.entries) {
      res.completed.values(rows[static_cast<std::size_t>(e.row)],
                           cols[static_cast<std::size_t>(e.col)]) = e.value;
      res.entries.push_back({rows[static_cast<std::size_t>(e.row)],
                             cols[static_cast<std::size_t>(e.col)], e.continuous,
                             e.value});
    }
  }
  res.seconds = seconds;
  return res;
}

void run_impute(const ImputeOpts& opt) {
  if (opt.threads > 0) set_thread_count(opt.threads);
  if (opt.mi && opt.per_component)
    throw ConfigError("choose one of --mi and --per-component");

  RatingMatrix M = load_matrix(opt.in, !opt.continuous);
  const QpOptions qp{opt.qp_cap, !opt.no_dedupe};
  const WeightMode wmode = mode_of(opt.weights);

  if (!opt.dump_system.empty()) {
    const WeightMatrix W = build_weights(M, wmode, opt.epsilon);
    const LinearSystem sys =
        assemble_system(normalize(M, column_scales(M)).values, W.w);
    Json entries = Json::array();
    for (const auto& [i, j] : sys.entries)
      entries.push_back(Json::array({M.row_labels[i], M.col_labels[j]}));
    write_json_file(Json{{"entries", std::move(entries)},
                         {"A", matrix_json(sys.A)},
                         {"b", std::vector<Real>(sys.b.begin(), sys.b.end())}},
                    opt.dump_system);
  }

  ImputationResult result;
  Json report;
  if (opt.mi) {
    if (opt.algorithm != "qp-as" && opt.algorithm != "dqp-svas")
      throw ConfigError("--mi wraps qp-as or dqp-svas");
    const WeightMatrix W = build_weights(M, wmode, opt.epsilon);
    const BaseImputer base = [&](const RatingMatrix& S, const WeightMatrix& SW) {
      return run_solver(opt.algorithm, S, SW, qp);
    };
    const MiResult mi = impute_mi(M, W, base, opt.mi_opts);
    result = mi.aggregated;
    report = to_json(mi);
  } else if (opt.per_component) {
    result = run_per_component(opt.algorithm, M, wmode, opt.epsilon, qp);
    report = to_json(result);
  } else {
    const WeightMatrix W = build_weights(M, wmode, opt.epsilon);
    result = run_solver(opt.algorithm, M, W, qp);
    report = to_json(result);
  }

  if (!opt.json_path.empty()) write_json_file(report, opt.json_path);
  if (opt.output.empty()) {
    write_csv(result.completed, std::cout);
  } else {
    save_csv(result.completed, opt.output);
    std::printf("imputed %zu entries with %s in %.3fs", result.entries.size(),
                result.algorithm.c_str(), result.seconds);
    if (std::isfinite(result.objective))
      std::printf(", discordance %.6g", result.objective);
    if (std::isfinite(result.residual))
      std::printf(", residual %.3g", result.residual);
    std::printf("\n");
  }
}

// ------------------------------------------------------------------ synth --

struct SynthOpts {
  SynthSpec spec;
  std::string output;
  std::string truth_path;
  std::string json_path;
};

void run_synth(const SynthOpts& opt) {
  const SynthInstance inst = generate(opt.spec);
  if (!opt.truth_path.empty()) save_csv(inst.truth, opt.truth_path);
  if (!opt.json_path.empty()) write_json_file(to_json(inst), opt.json_path);
  if (opt.output.empty()) {
    write_csv(inst.observed, std::cout);
  } else {
    save_csv(inst.observed, opt.output);
    std::printf("wrote %lld x %lld matrix, %lld missing entries, %lld rescued rows\n",
                static_cast<long long>(inst.observed.rows()),
                static_cast<long long>(inst.observed.cols()),
                static_cast<long long>(inst.observed.missing_count()),
                static_cast<long long>(inst.rescued_rows));
  }
}

// ------------------------------------------------------------------- eval --

struct EvalOpts {
  EvalConfig cfg;
  InputOpts in;
  bool have_input = false;
  std::string rows_path;
  std::string json_path;
  std::string weights = "kendall";
  std::string mi_base;
  bool connectivity = false;
  Index trials = 10000;
  std::uint64_t mc_seed = 1;
  int threads = 0;
};

void run_connectivity_tables(Index trials, std::uint64_t seed) {
  const std::vector<Real> rates{0.6, 0.7, 0.8, 0.9, 0.95};
  const std::vector<Index> sizes{50, 100, 500, 1000, 5000};
  std::printf("probability that two providers share a rated subject\n");
  std::printf("%6s", "r\\m");
  for (const Index m : sizes) std::printf("%9lld", static_cast<long long>(m));
  std::printf("\n");
  for (const Real r : rates) {
    std::printf("%6.2f", r);
    for (const Index m : sizes) std::printf("%9.4f", edge_probability(r, m));
    std::printf("\n");
  }

  const std::vector<Real> ps{0.1, 0.2, 0.3, 0.4, 0.5};
  const std::vector<Index> ns{4, 8, 12, 16, 20, 50};
  std::printf("\nprobability that the provider graph is connected (%lld trials)\n",
              static_cast<long long>(trials));
  std::printf("%6s", "p\\n");
  for (const Index n : ns) std::printf("%9lld", static_cast<long long>(n));
  std::printf("\n");
  for (const Real p : ps) {
    std::printf("%6.2f", p);
    for (const Index n : ns)
      std::printf("%9.4f", connectivity_probability(p, n, trials, seed));
    std::printf("\n");
  }
}

void run_eval(EvalOpts& opt) {
  if (opt.threads > 0) set_thread_count(opt.threads);
  if (opt.connectivity) {
    run_connectivity_tables(opt.trials, opt.mc_seed);
    return;
  }
  if (opt.have_input) {
    opt.cfg.csv_path = opt.in.path;
    for (const auto& t : opt.in.missing_tokens)
      opt.cfg.csv.missing_tokens.push_back(t);
  }
  opt.cfg.weights = mode_of(opt.weights);
  if (!opt.mi_base.empty()) opt.cfg.mi_base = opt.mi_base;

  const EvalReport report = run_experiment(opt.cfg);
  std::fputs(report.table.c_str(), stdout);
  if (!opt.rows_path.empty()) write_rows_csv(report.rows, opt.rows_path);
  if (!opt.json_path.empty()) write_json_file(to_json(report), opt.json_path);
}

// -------------------------------------------------------- select-columns --

struct SelectOpts {
  InputOpts in;
  std::string target;
  Real threshold = 0.3;
  Real alpha = 0.05;
  std::string json_path;
};

void run_select(const SelectOpts& opt) {
  const RatingMatrix M = load_matrix(opt.in);
  Index target = -1;
  for (Index j = 0; j < M.cols(); ++j)
    if (M.col_labels[j] == opt.target) target = j;
  if (target < 0) throw ConfigError("no provider named " + opt.target);

  const PairReport pairs = pair_report(M, opt.alpha);
  const ColumnSelection sel = select_columns(pairs, target, opt.threshold);
  for (std::size_t t = 0; t < sel.columns.size(); ++t)
    std::printf("%s%s", t ? " " : "", M.col_labels[sel.columns[t]].c_str());
  std::printf("\n");
  if (sel.fallback)
    std::fprintf(stderr,
                 "note: no provider reaches agreement %g; kept the closest one\n",
                 opt.threshold);

  if (!opt.json_path.empty()) {
    Json cols = Json::array();
    for (const Index c : sel.columns) cols.push_back(M.col_labels[c]);
    write_json_file(Json{{"target", opt.target},
                         {"threshold", opt.threshold},
                         {"fallback", sel.fallback},
                         {"columns", std::move(cols)}},
                    opt.json_path);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imputation of ordinal rating matrices by pairwise concordance"};
  app.require_subcommand(1);

  AnalyzeOpts analyze;
  CLI::App* cmd = app.add_subcommand("analyze", "estimatability and agreement report");
  add_input(cmd, analyze.in);
  cmd->add_option("--weights", analyze.weights)->check(CLI::IsMember({"kendall", "uniform"}));
  cmd->add_option("--epsilon", analyze.epsilon, "weight floor");
  cmd->add_option("--alpha", analyze.alpha, "missingness screen level");
  cmd->add_option("--exact-limit", analyze.exact_limit,
                  "largest pooled sample for the exact rank test");
  cmd->add_option("--json", analyze.json_path, "write the full report as JSON");
  cmd->callback([&] { run_analyze(analyze); });

  ImputeOpts impute;
  cmd = app.add_subcommand("impute", "fill the missing entries");
  add_input(cmd, impute.in);
  cmd->add_option("-a,--algorithm", impute.algorithm)
      ->check(CLI::IsMember({"qp-as", "dqp-svas", "mean", "mode"}));
  cmd->add_option("-o,--output", impute.output, "completed CSV (default stdout)");
  cmd->add_option("--json", impute.json_path, "write the imputation report as JSON");
  cmd->add_option("--dump-system", impute.dump_system,
                  "write the stationarity system as JSON");
  cmd->add_option("--weights", impute.weights)->check(CLI::IsMember({"kendall", "uniform"}));
  cmd->add_option("--epsilon", impute.epsilon, "weight floor");
  cmd->add_option("--qp-cap", impute.qp_cap, "missing-entry cap of the exact solver");
  cmd->add_flag("--no-dedupe", impute.no_dedupe, "skip duplicate-row reduction");
  cmd->add_flag("--per-component", impute.per_component,
                "impute each provider component separately");
  cmd->add_flag("--continuous", impute.continuous,
                "treat ratings as continuous: parse fractions, skip rounding");
  cmd->add_flag("--mi", impute.mi, "aggregate repeated row-subsample runs");
  cmd->add_option("--mi-fraction", impute.mi_opts.row_fraction, "rows kept per round");
  cmd->add_option("--mi-coverage", impute.mi_opts.min_coverage,
                  "rounds every row must reach");
  cmd->add_option("--mi-retries", impute.mi_opts.max_retries,
                  "resamples allowed per round");
  cmd->add_option("--mi-seed", impute.mi_opts.seed);
  cmd->add_flag("--mi-mode-aggregate", impute.mi_opts.mode_aggregate,
                "aggregate by most frequent value");
  cmd->add_option("--threads", impute.threads, "worker threads (default: all cores)");
  cmd->callback([&] { run_impute(impute); });

  SynthOpts synth;
  cmd = app.add_subcommand("synth", "generate a synthetic rating matrix");
  cmd->add_option("--m", synth.spec.m, "subjects");
  cmd->add_option("--n", synth.spec.n, "providers");
  cmd->add_option("--s", synth.spec.s, "centre of the correlation band");
  cmd->add_option("--r", synth.spec.r, "per-provider missing rate");
  cmd->add_option("--seed", synth.spec.seed);
  cmd->add_option("-o,--output", synth.output, "observed CSV (default stdout)");
  cmd->add_option("--truth", synth.truth_path, "write the complete matrix too");
  cmd->add_option("--json", synth.json_path, "write generation metadata as JSON");
  cmd->callback([&] { run_synth(synth); });

  EvalOpts eval;
  cmd = app.add_subcommand("eval", "deletion experiments and baselines");
  cmd->add_option("-i,--input", eval.in.path, "rating matrix CSV (k-fold protocol)");
  cmd->add_option("--missing-token", eval.in.missing_tokens,
                  "extra tokens treated as missing");
  cmd->add_option("--folds", eval.cfg.folds);
  cmd->add_option("--fold-seed", eval.cfg.fold_seed);
  cmd->add_option("--m", eval.cfg.m_list, "subject counts")->delimiter(',');
  cmd->add_option("--n", eval.cfg.n_list, "provider counts")->delimiter(',');
  cmd->add_option("--s", eval.cfg.s_list, "correlation centres")->delimiter(',');
  cmd->add_option("--r", eval.cfg.r_list, "missing rates")->delimiter(',');
  cmd->add_option("--seeds", eval.cfg.seeds)->delimiter(',');
  cmd->add_option("--algorithms", eval.cfg.algorithms)->delimiter(',');
  cmd->add_option("--mi-base", eval.mi_base, "also run MI over this solver");
  cmd->add_option("--mi-coverage", eval.cfg.mi.min_coverage);
  cmd->add_option("--mi-seed", eval.cfg.mi.seed);
  cmd->add_option("--weights", eval.weights)->check(CLI::IsMember({"kendall", "uniform"}));
  cmd->add_option("--epsilon", eval.cfg.epsilon, "weight floor");
  cmd->add_option("--qp-cap", eval.cfg.qp.max_missing);
  cmd->add_option("--rows", eval.rows_path, "write one CSV row per run");
  cmd->add_option("--json", eval.json_path, "write the full report as JSON");
  cmd->add_flag("--connectivity", eval.connectivity,
                "print provider-graph connectivity tables instead");
  cmd->add_option("--trials", eval.trials, "Monte Carlo trials per cell");
  cmd->add_option("--mc-seed", eval.mc_seed, "Monte Carlo seed");
  cmd->add_option("--threads", eval.threads, "worker threads (default: all cores)");
  CLI::Option* eval_input = cmd->get_option("--input");
  cmd->callback([&] {
    eval.have_input = eval_input->count() > 0;
    run_eval(eval);
  });

  SelectOpts select;
  cmd = app.add_subcommand("select-columns", "providers agreeing with a target");
  add_input(cmd, select.in);
  cmd->add_option("--target", select.target, "target provider label")->required();
  cmd->add_option("--threshold", select.threshold, "agreement cut");
  cmd->add_option("--alpha", select.alpha, "missingness screen level");
  cmd->add_option("--json", select.json_path, "write the selection as JSON");
  cmd->callback([&] { run_select(select); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const EstimatabilityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
