#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "diverank/diverank.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir,
                bool have_seed, std::uint64_t seed) {
  diverank::ExperimentConfig cfg = diverank::parse_config_file(config_path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (have_seed) cfg.seed = seed;
  const diverank::ExperimentResult result = diverank::run_experiment(cfg);
  std::printf("wrote %zu metric rows and %zu sudden-death rounds to %s\n",
              result.rows.size(), result.sd_runs.size(), cfg.out_dir.c_str());
  return 0;
}

int score_runs_command(const std::string& runs_path,
                       const std::string& judgments_path, std::size_t n) {
  std::ifstream runs_in(runs_path);
  if (!runs_in) throw diverank::DataError("cannot open runs file " + runs_path);
  diverank::RunSet rs = diverank::parse_runs_csv(runs_in, n);

  std::ifstream judgments_in(judgments_path);
  if (!judgments_in) {
    throw diverank::DataError("cannot open judgments file " + judgments_path);
  }
  rs.judgments = diverank::parse_judgments_csv(judgments_in);

  const diverank::SDReport report = diverank::sd_scores(rs);
  std::string roster;
  for (std::size_t a = 0; a < report.algorithms.size(); ++a) {
    if (a > 0) roster += '|';
    roster += report.algorithms[a];
  }
  std::printf("algorithm,sd_score,algs_roster\n");
  for (std::size_t a = 0; a < report.algorithms.size(); ++a) {
    std::printf("%s,%.6f,%s\n", report.algorithms[a].c_str(), report.scores[a],
                roster.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"batch workbench for diversified recommendation sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  CLI::App* run = app.add_subcommand("run", "run a configured experiment");
  run->add_option("--config", config_path, "experiment config file")
      ->required();
  run->add_option("--out", out_dir, "output directory (overrides config)");
  CLI::Option* seed_opt =
      run->add_option("--seed", seed, "seed override (overrides config)");

  std::string runs_path;
  std::string judgments_path;
  std::size_t cutoff = 0;
  CLI::App* score = app.add_subcommand(
      "score-runs", "sudden-death scoring of externally produced runs");
  score->add_option("--runs", runs_path, "run file (algorithm,user,rank,item)")
      ->required();
  score->add_option("--judgments", judgments_path, "judgments file (user,item)")
      ->required();
  score->add_option("--n", cutoff, "cutoff N")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed()) {
      return run_command(config_path, out_dir, seed_opt->count() > 0, seed);
    }
    return score_runs_command(runs_path, judgments_path, cutoff);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends, exit 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;  // bad usage is a config error
  } catch (const diverank::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const diverank::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
