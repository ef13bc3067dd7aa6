#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <system_error>
#include <unordered_map>
#include <utility>
#include <vector>

#include "diverank/aspects.hpp"
#include "diverank/config.hpp"
#include "diverank/corpus.hpp"
#include "diverank/distance.hpp"
#include "diverank/errors.hpp"
#include "diverank/metrics.hpp"
#include "diverank/mf.hpp"
#include "diverank/parallel.hpp"
#include "diverank/rerank.hpp"
#include "diverank/rng.hpp"
#include "diverank/similarity.hpp"
#include "diverank/sudden_death.hpp"
#include "diverank/svg.hpp"

namespace diverank {

struct ResultRow {
  std::string algorithm;
  double lambda = 0.0;
  std::size_t n = 0;
  std::string metric;
  double value = 0.0;
};

// One sudden-death round (a full roster comparison at one grid point).
struct SDRun {
  double lambda = 0.0;
  SDReport report;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<SDRun> sd_runs;  // ordered by (N, lambda) grid position
};

inline DiversityKind kind_of(const std::string& algorithm) {
  if (algorithm == "mf") return DiversityKind::none;
  if (algorithm == "mmr") return DiversityKind::mmr;
  if (algorithm == "xquad") return DiversityKind::intent_aware_features;
  if (algorithm == "spad") return DiversityKind::intent_aware_subprofiles;
  throw InvalidConfig("unknown algorithm \"" + algorithm + "\"");
}

inline const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "ild",       "alpha_ndcg_features", "alpha_ndcg_subprofiles",
      "precision", "mrr",                 "one_call"};
  return names;
}

namespace detail {

// Rethrow module errors with the pipeline stage prepended, preserving the
// config/data split the CLI exit codes depend on.
template <class Fn>
auto with_stage(const char* stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(stage) + ": " + e.what());
  } catch (const Error& e) {
    throw Error(std::string(stage) + ": " + e.what());
  }
}

inline std::string fixed6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

}  // namespace detail

// Everything derived from the corpus that the sweeps reuse: the trained
// model, per-user candidates, both aspect families, and the judged test
// items. Users are the evaluation set (at least one test rating and a
// non-empty candidate pool), in ascending id order.
struct ExperimentContext {
  SplitCorpus corpus;
  RelevanceJudgments judged;
  MFModel model;
  DistanceModel distance;
  ItemSimilarity similarity;
  std::vector<UserId> users;
  std::vector<ScoredCandidates> candidates;  // aligned with users
  AspectFamily feature_family;
  AspectFamily subprofile_family;
  std::map<UserId, std::vector<Subprofile>> subprofiles;
};

inline ExperimentContext build_context(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentContext ctx;

  detail::with_stage("corpus", [&] {
    std::ifstream ratings_in(cfg.ratings_path);
    if (!ratings_in) {
      throw DataError("cannot open ratings file " + cfg.ratings_path);
    }
    const std::vector<Rating> ratings = parse_ratings(ratings_in);
    ctx.corpus = split(ratings, cfg.holdout_fraction, cfg.seed);
    ctx.judged = judgments(ctx.corpus, cfg.relevance_threshold);
  });

  detail::with_stage("factorizer", [&] {
    MFConfig mf = cfg.mf;
    mf.seed = mix_seed(cfg.seed, 1ull << 32);
    ctx.model = train(ctx.corpus.train, mf);
    if (!cfg.model_checkpoint.empty()) {
      auto out = detail::open_output(cfg.model_checkpoint);
      ctx.model.save(out);
    }
  });

  detail::with_stage("corpus", [&] {
    std::set<UserId> test_users;
    for (const Rating& r : ctx.corpus.test) test_users.insert(r.user);
    for (const UserId u : test_users) {
      if (ctx.model.rated_items(u).size() < ctx.corpus.items.size()) {
        ctx.users.push_back(u);
      }
    }
    if (ctx.users.empty()) throw EmptyUserSet();
  });

  detail::with_stage("factorizer", [&] {
    ctx.candidates.resize(ctx.users.size());
    parallel_for(ctx.users.size(), [&](std::size_t i) {
      const UserId u = ctx.users[i];
      const std::vector<ItemId>& rated = ctx.model.rated_items(u);
      std::vector<ItemId> pool;
      pool.reserve(ctx.corpus.items.size() - rated.size());
      for (const ItemId item : ctx.corpus.items) {
        if (!std::binary_search(rated.begin(), rated.end(), item)) {
          pool.push_back(item);
        }
      }
      ctx.candidates[i] = ctx.model.candidates(u, pool, cfg.candidate_k);
    });
  });

  detail::with_stage("aspects", [&] {
    std::ifstream items_in(cfg.items_path);
    if (!items_in) throw DataError("cannot open items file " + cfg.items_path);
    ctx.distance = DistanceModel(parse_item_features(items_in));
    ctx.similarity = ItemSimilarity(ctx.corpus.train, cfg.knn_k);
    ctx.feature_family = AspectFamily(&ctx.distance, nullptr);
    ctx.subprofile_family = AspectFamily(&ctx.distance, &ctx.similarity);

    std::map<UserId, std::vector<ItemId>> liked;
    for (const Rating& r : ctx.corpus.train) {
      if (r.value >= cfg.relevance_threshold) liked[r.user].push_back(r.item);
    }

    std::vector<UserAspects> features(ctx.users.size());
    std::vector<UserAspects> subs(ctx.users.size());
    std::vector<std::vector<Subprofile>> mined(ctx.users.size());
    parallel_for(ctx.users.size(), [&](std::size_t i) {
      const UserId u = ctx.users[i];
      static const std::vector<ItemId> no_likes;
      const auto it = liked.find(u);
      const std::vector<ItemId>& likes = it == liked.end() ? no_likes : it->second;
      features[i] = feature_aspects(ctx.distance, likes, ctx.candidates[i]);
      mined[i] = mine_subprofiles(u, likes, ctx.similarity, cfg.knn_k);
      std::vector<ItemId> domain;
      for (const ItemId item : ctx.judged.for_user(u)) domain.push_back(item);
      subs[i] = subprofile_aspects(ctx.similarity, mined[i], ctx.candidates[i],
                                   domain);
    });
    for (std::size_t i = 0; i < ctx.users.size(); ++i) {
      ctx.feature_family.set_user(ctx.users[i], std::move(features[i]));
      ctx.subprofile_family.set_user(ctx.users[i], std::move(subs[i]));
      ctx.subprofiles[ctx.users[i]] = std::move(mined[i]);
    }

    if (!cfg.subprofile_dump.empty()) {
      auto out = detail::open_output(cfg.subprofile_dump);
      for (const auto& [user, list] : ctx.subprofiles) {
        for (const Subprofile& s : list) {
          out << user << ": {";
          for (std::size_t m = 0; m < s.members.size(); ++m) {
            if (m > 0) out << ", ";
            out << s.members[m];
          }
          out << "}\n";
        }
      }
    }
  });

  return ctx;
}

namespace detail {

// Lists for one (algorithm, lambda) grid point at the largest N; shorter
// cutoffs reuse prefixes since greedy insertion never revisits a pick.
inline std::vector<RankedList> rerank_all(const ExperimentContext& ctx,
                                          const ExperimentConfig& cfg,
                                          const std::string& algorithm,
                                          double lambda, std::size_t n_max) {
  GreedyConfig gc;
  gc.lambda = lambda;
  gc.n = n_max;
  gc.kind = kind_of(algorithm);
  gc.normalize_scores = cfg.normalize_scores;
  const AspectFamily* family =
      gc.kind == DiversityKind::intent_aware_features ? &ctx.feature_family
      : gc.kind == DiversityKind::intent_aware_subprofiles
          ? &ctx.subprofile_family
          : nullptr;
  std::vector<RankedList> lists(ctx.users.size());
  parallel_for(ctx.users.size(), [&](std::size_t i) {
    lists[i] = rerank(ctx.candidates[i], gc, &ctx.distance, family);
  });
  return lists;
}

inline RankedList prefix(const RankedList& list, std::size_t n) {
  RankedList out;
  out.user = list.user;
  const std::size_t take = std::min(n, list.items.size());
  out.items.assign(list.items.begin(),
                   list.items.begin() + static_cast<std::ptrdiff_t>(take));
  return out;
}

}  // namespace detail

inline ExperimentResult evaluate(const ExperimentContext& ctx,
                                 const ExperimentConfig& cfg) {
  ExperimentResult result;
  const std::size_t n_max =
      *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end());
  const std::size_t n_metrics = metric_names().size();

  // lists[alg][lambda][user], each at n_max.
  std::vector<std::vector<std::vector<RankedList>>> lists(
      cfg.algorithms.size());
  detail::with_stage("reranker", [&] {
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      lists[a].reserve(cfg.lambda_grid.size());
      for (const double lambda : cfg.lambda_grid) {
        lists[a].push_back(
            detail::rerank_all(ctx, cfg, cfg.algorithms[a], lambda, n_max));
      }
    }
  });

  detail::with_stage("metrics", [&] {
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
        // per_user[user][n index * metrics + metric index]
        std::vector<std::vector<double>> per_user(ctx.users.size());
        parallel_for(ctx.users.size(), [&](std::size_t i) {
          const UserId u = ctx.users[i];
          const std::unordered_set<ItemId>& rel = ctx.judged.for_user(u);
          std::vector<double>& row = per_user[i];
          row.resize(cfg.n_grid.size() * n_metrics);
          for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
            const RankedList l = detail::prefix(lists[a][li][i], cfg.n_grid[ni]);
            double* slot = &row[ni * n_metrics];
            slot[0] = ild(l, ctx.distance);
            slot[1] = alpha_ndcg(l, u, ctx.feature_family, rel, cfg.alpha);
            slot[2] = alpha_ndcg(l, u, ctx.subprofile_family, rel, cfg.alpha);
            slot[3] = precision(l, rel);
            slot[4] = mrr(l, rel);
            slot[5] = one_call(l, rel);
          }
        });
        std::vector<double> sums(cfg.n_grid.size() * n_metrics, 0.0);
        for (const std::vector<double>& row : per_user) {
          for (std::size_t k = 0; k < sums.size(); ++k) sums[k] += row[k];
        }
        for (std::size_t ni = 0; ni < cfg.n_grid.size(); ++ni) {
          for (std::size_t m = 0; m < n_metrics; ++m) {
            result.rows.push_back(ResultRow{
                cfg.algorithms[a], cfg.lambda_grid[li], cfg.n_grid[ni],
                metric_names()[m],
                sums[ni * n_metrics + m] / static_cast<double>(ctx.users.size())});
          }
        }
      }
    }
  });

  detail::with_stage("sudden-death", [&] {
    for (const std::size_t n : cfg.n_grid) {
      for (std::size_t li = 0; li < cfg.lambda_grid.size(); ++li) {
        RunSet rs;
        rs.algorithms = cfg.algorithms;
        rs.users = ctx.users;
        rs.n = n;
        rs.judgments = ctx.judged;
        for (std::size_t i = 0; i < ctx.users.size(); ++i) {
          std::vector<RankedList>& per_alg = rs.lists[ctx.users[i]];
          per_alg.reserve(cfg.algorithms.size());
          for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
            per_alg.push_back(detail::prefix(lists[a][li][i], n));
          }
        }
        result.sd_runs.push_back(SDRun{cfg.lambda_grid[li], sd_scores(rs)});
      }
    }
  });

  return result;
}

inline void emit_csv(const std::vector<ResultRow>& rows,
                     const std::vector<SDRun>& sd_runs,
                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    auto out = detail::open_output(fs::path(out_dir) / "metrics.csv");
    out << "algorithm,lambda,N,metric,value\n";
    for (const ResultRow& r : rows) {
      out << r.algorithm << "," << detail::fixed6(r.lambda) << "," << r.n << ","
          << r.metric << "," << detail::fixed6(r.value) << "\n";
    }
  }
  {
    auto out = detail::open_output(fs::path(out_dir) / "sd.csv");
    out << "N,lambda,algorithm,sd_score,algs_roster\n";
    for (const SDRun& run : sd_runs) {
      const std::string roster = detail::join(run.report.algorithms, '|');
      for (std::size_t a = 0; a < run.report.algorithms.size(); ++a) {
        out << run.report.n << "," << detail::fixed6(run.lambda) << ","
            << run.report.algorithms[a] << ","
            << detail::fixed6(run.report.scores[a]) << "," << roster << "\n";
      }
    }
  }
}

namespace detail {

inline const ResultRow* find_row(const std::vector<ResultRow>& rows,
                                 const std::string& algorithm, double lambda,
                                 std::size_t n, const std::string& metric) {
  for (const ResultRow& r : rows) {
    if (r.algorithm == algorithm && r.lambda == lambda && r.n == n &&
        r.metric == metric) {
      return &r;
    }
  }
  return nullptr;
}

}  // namespace detail

// Four chart families: diversity metrics vs N, relevance metrics vs N,
// precision/diversity tradeoff across the lambda grid at the sweep N, and
// sudden-death scores vs N. The N sweeps pin each algorithm to its resolved
// sweep lambda, recorded in the subtitle.
inline void emit_charts(const std::vector<ResultRow>& rows,
                        const std::vector<SDRun>& sd_runs,
                        const ExperimentConfig& cfg,
                        const std::string& out_dir) {
  namespace fs = std::filesystem;
  if (rows.empty()) throw DataError("no result rows to chart");
  fs::create_directories(out_dir);

  std::string lambda_note;
  for (const std::string& alg : cfg.algorithms) {
    if (!lambda_note.empty()) lambda_note += ", ";
    lambda_note += alg + ": lambda=" +
                   detail::tick_label(resolved_sweep_lambda(cfg, alg));
  }

  const auto n_sweep_chart = [&](const std::string& metric,
                                 const std::string& title,
                                 const std::string& file) {
    ChartSpec spec;
    spec.title = title;
    spec.subtitle = lambda_note;
    spec.x_label = "N";
    spec.y_label = metric;
    for (const std::string& alg : cfg.algorithms) {
      const double lambda = resolved_sweep_lambda(cfg, alg);
      ChartSeries series;
      series.label = alg;
      for (const std::size_t n : cfg.n_grid) {
        const ResultRow* r = detail::find_row(rows, alg, lambda, n, metric);
        if (r != nullptr) {
          series.points.emplace_back(static_cast<double>(n), r->value);
        }
      }
      spec.series.push_back(std::move(series));
    }
    auto out = detail::open_output(fs::path(out_dir) / file);
    write_svg_chart(out, spec);
  };

  n_sweep_chart("ild", "Intra-list diversity by cutoff", "diversity_ild_vs_n.svg");
  n_sweep_chart("alpha_ndcg_features", "Feature coverage by cutoff",
                "diversity_alpha_ndcg_features_vs_n.svg");
  n_sweep_chart("alpha_ndcg_subprofiles", "Subprofile coverage by cutoff",
                "diversity_alpha_ndcg_subprofiles_vs_n.svg");
  n_sweep_chart("precision", "Precision by cutoff", "relevance_precision_vs_n.svg");
  n_sweep_chart("mrr", "Reciprocal rank by cutoff", "relevance_mrr_vs_n.svg");
  n_sweep_chart("one_call", "1-call by cutoff", "relevance_one_call_vs_n.svg");

  // Tradeoff scatter: one point per lambda at the sweep N, dotted reference
  // lines mark the plain baseline when it is part of the roster.
  const auto tradeoff_chart = [&](const std::string& metric,
                                  const std::string& title,
                                  const std::string& file) {
    ChartSpec spec;
    spec.title = title;
    char note[64];
    std::snprintf(note, sizeof(note), "N=%zu, one point per lambda",
                  cfg.sweep_n);
    spec.subtitle = note;
    spec.x_label = "precision";
    spec.y_label = metric;
    for (const std::string& alg : cfg.algorithms) {
      ChartSeries series;
      series.label = alg;
      for (const double lambda : cfg.lambda_grid) {
        const ResultRow* px =
            detail::find_row(rows, alg, lambda, cfg.sweep_n, "precision");
        const ResultRow* py =
            detail::find_row(rows, alg, lambda, cfg.sweep_n, metric);
        if (px != nullptr && py != nullptr) {
          series.points.emplace_back(px->value, py->value);
        }
      }
      spec.series.push_back(std::move(series));
    }
    const bool has_baseline =
        std::find(cfg.algorithms.begin(), cfg.algorithms.end(), "mf") !=
        cfg.algorithms.end();
    if (has_baseline) {
      const double lambda = resolved_sweep_lambda(cfg, "mf");
      const ResultRow* px =
          detail::find_row(rows, "mf", lambda, cfg.sweep_n, "precision");
      const ResultRow* py =
          detail::find_row(rows, "mf", lambda, cfg.sweep_n, metric);
      if (px != nullptr) spec.ref_x.push_back(px->value);
      if (py != nullptr) spec.ref_y.push_back(py->value);
    }
    auto out = detail::open_output(fs::path(out_dir) / file);
    write_svg_chart(out, spec);
  };

  tradeoff_chart("ild", "Precision versus intra-list diversity",
                 "tradeoff_ild.svg");
  tradeoff_chart("alpha_ndcg_features", "Precision versus feature coverage",
                 "tradeoff_alpha_ndcg_features.svg");
  tradeoff_chart("alpha_ndcg_subprofiles",
                 "Precision versus subprofile coverage",
                 "tradeoff_alpha_ndcg_subprofiles.svg");

  {
    ChartSpec spec;
    spec.title = "Sudden-death scores by cutoff";
    const double lambda = nearest_grid_lambda(cfg, cfg.sweep_lambda);
    char note[96];
    std::snprintf(note, sizeof(note), "roster scored jointly at lambda=%s",
                  detail::tick_label(lambda).c_str());
    spec.subtitle = note;
    spec.x_label = "N";
    spec.y_label = "sd_score";
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      ChartSeries series;
      series.label = cfg.algorithms[a];
      for (const SDRun& run : sd_runs) {
        if (run.lambda == lambda) {
          series.points.emplace_back(static_cast<double>(run.report.n),
                                     run.report.scores[a]);
        }
      }
      spec.series.push_back(std::move(series));
    }
    auto out = detail::open_output(fs::path(out_dir) / "sd_vs_n.svg");
    write_svg_chart(out, spec);
  }
}

// Full pipeline: corpus -> factorizer -> aspects -> reranker -> metrics ->
// sudden death, then CSVs and charts under cfg.out_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const ExperimentContext ctx = build_context(cfg);
  ExperimentResult result = evaluate(ctx, cfg);
  detail::with_stage("output", [&] {
    emit_csv(result.rows, result.sd_runs, cfg.out_dir);
    emit_charts(result.rows, result.sd_runs, cfg, cfg.out_dir);
  });
  return result;
}

}  // namespace diverank
