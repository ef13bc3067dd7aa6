#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "support/synthetic.hpp"

// End-to-end runs of the installed binary (path injected by the build).

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const fs::path& stdout_file,
            const fs::path& stderr_file) {
  const std::string cmd = std::string(DIVERANK_BIN) + " " + args + " >" +
                          stdout_file.string() + " 2>" + stderr_file.string();
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

struct Workspace {
  fs::path dir;
  fs::path config;
  fs::path stdout_file;
  fs::path stderr_file;

  explicit Workspace(const std::string& tag)
      : dir(synthetic::temp_dir(tag)),
        config(dir / "experiment.conf"),
        stdout_file(dir / "stdout.txt"),
        stderr_file(dir / "stderr.txt") {
    synthetic::CorpusSpec spec;
    spec.users = 60;
    spec.items = 80;
    spec.genres = 6;
    spec.ratings_per_user = 20;
    spec.seed = 5;
    const synthetic::Corpus corpus = synthetic::genre_corpus(spec);
    synthetic::write_file(dir / "ratings.dat",
                          synthetic::ratings_text(corpus.ratings));
    synthetic::write_file(dir / "items.dat",
                          synthetic::items_text(corpus.items));
    synthetic::write_file(config, config_text("out"));
  }

  std::string config_text(const std::string& out_name) const {
    return "ratings = " + (dir / "ratings.dat").string() + "\n" +
           "items = " + (dir / "items.dat").string() + "\n" +
           "out_dir = " + (dir / out_name).string() + "\n" +
           "seed = 11\n"
           "holdout_fraction = 0.25\n"
           "mf.d = 8\n"
           "mf.epochs = 5\n"
           "candidate_k = 30\n"
           "lambda_grid = 0.0, 0.5, 1.0\n"
           "n_grid = 5, 10\n"
           "sweep_n = 10\n"
           "knn_k = 3\n";
  }

  std::string out_text(const std::string& name) const {
    return synthetic::read_file(dir / "out" / name);
  }
};

std::size_t count_lines(const std::string& text) {
  std::size_t lines = 0;
  for (const char c : text) lines += c == '\n';
  return lines;
}

}  // namespace

TEST_CASE("a full experiment writes csv tables and charts") {
  const Workspace ws("pipeline_run");
  // Optional dumps aimed at a directory that does not exist yet.
  synthetic::write_file(
      ws.config,
      ws.config_text("out") +
          "model_checkpoint = " + (ws.dir / "side" / "mf.ckpt").string() +
          "\n" +
          "subprofile_dump = " + (ws.dir / "side" / "subs.txt").string() +
          "\n");
  const int code =
      run_cli("run --config " + ws.config.string(), ws.stdout_file,
              ws.stderr_file);
  CAPTURE(synthetic::read_file(ws.stderr_file));
  REQUIRE(code == 0);

  // 4 algorithms x 3 lambdas x 2 cutoffs x 6 metrics, plus the header.
  const std::string metrics = ws.out_text("metrics.csv");
  CHECK(count_lines(metrics) == 145);
  CHECK(metrics.rfind("algorithm,lambda,N,metric,value\n", 0) == 0);
  CHECK(metrics.find("\r") == std::string::npos);
  CHECK(metrics.find("spad,1.000000,10,one_call,") != std::string::npos);

  // 2 cutoffs x 3 lambdas x 4 roster entries, plus the header.
  const std::string sd = ws.out_text("sd.csv");
  CHECK(count_lines(sd) == 25);
  CHECK(sd.rfind("N,lambda,algorithm,sd_score,algs_roster\n", 0) == 0);
  CHECK(sd.find("mf|mmr|xquad|spad") != std::string::npos);

  const std::vector<std::string> charts = {
      "diversity_ild_vs_n.svg",
      "diversity_alpha_ndcg_features_vs_n.svg",
      "diversity_alpha_ndcg_subprofiles_vs_n.svg",
      "relevance_precision_vs_n.svg",
      "relevance_mrr_vs_n.svg",
      "relevance_one_call_vs_n.svg",
      "tradeoff_ild.svg",
      "tradeoff_alpha_ndcg_features.svg",
      "tradeoff_alpha_ndcg_subprofiles.svg",
      "sd_vs_n.svg",
  };
  for (const std::string& name : charts) {
    CAPTURE(name);
    const std::string svg = ws.out_text(name);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
  }

  const std::string ckpt = synthetic::read_file(ws.dir / "side" / "mf.ckpt");
  CHECK(ckpt.rfind("diverank-mf-checkpoint v1\n", 0) == 0);
  const std::string subs = synthetic::read_file(ws.dir / "side" / "subs.txt");
  CHECK(subs.find(": {") != std::string::npos);

  const std::string summary = synthetic::read_file(ws.stdout_file);
  // One round per (N, lambda) pair; each round covers the whole roster.
  CHECK(summary == "wrote 144 metric rows and 6 sudden-death rounds to " +
                       (ws.dir / "out").string() + "\n");
}

TEST_CASE("equal seeds reproduce byte-identical tables") {
  const Workspace ws("pipeline_repro");
  REQUIRE(run_cli("run --config " + ws.config.string(), ws.stdout_file,
                  ws.stderr_file) == 0);
  const std::string metrics_a = ws.out_text("metrics.csv");
  const std::string sd_a = ws.out_text("sd.csv");

  REQUIRE(run_cli("run --config " + ws.config.string() + " --out " +
                      (ws.dir / "again").string(),
                  ws.stdout_file, ws.stderr_file) == 0);
  CHECK(synthetic::read_file(ws.dir / "again" / "metrics.csv") == metrics_a);
  CHECK(synthetic::read_file(ws.dir / "again" / "sd.csv") == sd_a);

  // A different seed changes the split, hence the numbers.
  REQUIRE(run_cli("run --config " + ws.config.string() + " --seed 99 --out " +
                      (ws.dir / "reseeded").string(),
                  ws.stdout_file, ws.stderr_file) == 0);
  CHECK(synthetic::read_file(ws.dir / "reseeded" / "metrics.csv") != metrics_a);
}

TEST_CASE("usage and configuration failures exit with code 1") {
  const Workspace ws("pipeline_config_errors");
  CHECK(run_cli("", ws.stdout_file, ws.stderr_file) == 1);
  CHECK(run_cli("frobnicate", ws.stdout_file, ws.stderr_file) == 1);
  CHECK(run_cli("run", ws.stdout_file, ws.stderr_file) == 1);
  CHECK(run_cli("run --config " + (ws.dir / "absent.conf").string(),
                ws.stdout_file, ws.stderr_file) == 1);

  synthetic::write_file(ws.dir / "bad.conf", "no_such_key = 1\n");
  CHECK(run_cli("run --config " + (ws.dir / "bad.conf").string(),
                ws.stdout_file, ws.stderr_file) == 1);
  CHECK(synthetic::read_file(ws.stderr_file).rfind("config error:", 0) == 0);

  synthetic::write_file(ws.dir / "range.conf",
                        ws.config_text("out") + "alpha = 7\n");
  CHECK(run_cli("run --config " + (ws.dir / "range.conf").string(),
                ws.stdout_file, ws.stderr_file) == 1);

  CHECK(run_cli("--help", ws.stdout_file, ws.stderr_file) == 0);
}

TEST_CASE("data failures exit with code 2") {
  const Workspace ws("pipeline_data_errors");
  synthetic::write_file(ws.dir / "missing.conf",
                        "ratings = " + (ws.dir / "absent.dat").string() + "\n" +
                            "items = " + (ws.dir / "items.dat").string() + "\n");
  CHECK(run_cli("run --config " + (ws.dir / "missing.conf").string(),
                ws.stdout_file, ws.stderr_file) == 2);
  CHECK(synthetic::read_file(ws.stderr_file).rfind("data error:", 0) == 0);

  synthetic::write_file(ws.dir / "ratings.dat", "1::2::5\n");
  CHECK(run_cli("run --config " + ws.config.string(), ws.stdout_file,
                ws.stderr_file) == 2);
  const std::string err = synthetic::read_file(ws.stderr_file);
  CHECK(err.find("corpus") != std::string::npos);
  CHECK(err.find("line 1") != std::string::npos);
}

TEST_CASE("external runs are scored from the command line") {
  const Workspace ws("pipeline_score_runs");
  synthetic::write_file(ws.dir / "runs.csv",
                        "algorithm,user,rank,item\n"
                        "A,1,1,10\n"
                        "A,1,2,11\n"
                        "A,1,3,12\n"
                        "B,1,1,13\n"
                        "B,1,2,10\n"
                        "B,1,3,11\n"
                        "A,2,1,20\n"
                        "A,2,2,21\n"
                        "B,2,1,20\n"
                        "B,2,2,22\n");
  synthetic::write_file(ws.dir / "judgments.csv",
                        "user,item\n"
                        "1,11\n"
                        "2,20\n");
  const int code = run_cli("score-runs --runs " + (ws.dir / "runs.csv").string() +
                               " --judgments " +
                               (ws.dir / "judgments.csv").string() + " --n 3",
                           ws.stdout_file, ws.stderr_file);
  REQUIRE(code == 0);
  CHECK(synthetic::read_file(ws.stdout_file) ==
        "algorithm,sd_score,algs_roster\n"
        "A,1.000000,A|B\n"
        "B,0.500000,A|B\n");

  // Broken runs files are data errors.
  synthetic::write_file(ws.dir / "broken.csv", "algorithm,user,rank,item\nA,1,1\n");
  CHECK(run_cli("score-runs --runs " + (ws.dir / "broken.csv").string() +
                    " --judgments " + (ws.dir / "judgments.csv").string() +
                    " --n 3",
                ws.stdout_file, ws.stderr_file) == 2);
}
