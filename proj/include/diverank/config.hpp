#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "diverank/errors.hpp"
#include "diverank/mf.hpp"

namespace diverank {

struct ExperimentConfig {
  std::string ratings_path;
  std::string items_path;
  std::string out_dir = "out";
  std::uint64_t seed = 42;
  double holdout_fraction = 0.2;
  int relevance_threshold = 4;
  MFConfig mf;
  std::size_t candidate_k = 100;
  std::vector<double> lambda_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                     0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<std::size_t> n_grid = {5, 10, 20, 30};
  // Fixed N for the lambda sweep chart, and the lambda each algorithm uses
  // in the N sweep charts (resolved to the nearest grid value).
  std::size_t sweep_n = 10;
  double sweep_lambda = 0.5;
  std::map<std::string, double> sweep_lambda_overrides;
  std::vector<std::string> algorithms = {"mf", "mmr", "xquad", "spad"};
  double alpha = 0.5;
  std::size_t knn_k = 10;
  bool normalize_scores = false;
  std::string model_checkpoint;  // optional MF dump
  std::string subprofile_dump;   // optional mined-subprofile dump
};

namespace detail {

inline std::string trim(std::string s) {
  const auto is_space = [](unsigned char c) { return c == ' ' || c == '\t'; };
  while (!s.empty() && is_space(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && is_space(s[i])) ++i;
  return s.substr(i);
}

inline double config_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidConfig(key + ": expected a number, got \"" + v + "\"");
  }
}

inline long long config_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw InvalidConfig(key + ": expected an integer, got \"" + v + "\"");
  }
}

inline std::uint64_t config_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const unsigned long long i = std::stoull(v, &used);
    if (used != v.size() || v[0] == '-') throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw InvalidConfig(key + ": expected a non-negative integer, got \"" + v +
                        "\"");
  }
}

inline bool config_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidConfig(key + ": expected true/false, got \"" + v + "\"");
}

inline std::vector<std::string> config_list(const std::string& key,
                                            const std::string& v) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream in(v);
  while (std::getline(in, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  if (out.empty()) throw InvalidConfig(key + ": list must not be empty");
  return out;
}

}  // namespace detail

// Plain key = value lines; '#' starts a comment, blank lines are skipped,
// later keys override earlier ones. Unknown keys are rejected so typos
// surface instead of silently running defaults.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("config line " + std::to_string(line_number) +
                          ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) {
      throw InvalidConfig("config line " + std::to_string(line_number) +
                          ": empty key");
    }

    if (key == "ratings") {
      cfg.ratings_path = value;
    } else if (key == "items") {
      cfg.items_path = value;
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "seed") {
      cfg.seed = detail::config_u64(key, value);
    } else if (key == "holdout_fraction") {
      cfg.holdout_fraction = detail::config_double(key, value);
    } else if (key == "relevance_threshold") {
      cfg.relevance_threshold =
          static_cast<int>(detail::config_int(key, value));
    } else if (key == "mf.d") {
      cfg.mf.d = static_cast<int>(detail::config_int(key, value));
    } else if (key == "mf.learning_rate") {
      cfg.mf.learning_rate = detail::config_double(key, value);
    } else if (key == "mf.regularization") {
      cfg.mf.regularization = detail::config_double(key, value);
    } else if (key == "mf.epochs") {
      cfg.mf.epochs = static_cast<int>(detail::config_int(key, value));
    } else if (key == "candidate_k") {
      const long long k = detail::config_int(key, value);
      if (k < 1) throw InvalidConfig("candidate_k must be positive");
      cfg.candidate_k = static_cast<std::size_t>(k);
    } else if (key == "lambda_grid") {
      cfg.lambda_grid.clear();
      for (const std::string& part : detail::config_list(key, value)) {
        cfg.lambda_grid.push_back(detail::config_double(key, part));
      }
    } else if (key == "n_grid") {
      cfg.n_grid.clear();
      for (const std::string& part : detail::config_list(key, value)) {
        const long long n = detail::config_int(key, part);
        if (n < 1) throw InvalidConfig("n_grid values must be positive");
        cfg.n_grid.push_back(static_cast<std::size_t>(n));
      }
    } else if (key == "sweep_n") {
      const long long n = detail::config_int(key, value);
      if (n < 1) throw InvalidConfig("sweep_n must be positive");
      cfg.sweep_n = static_cast<std::size_t>(n);
    } else if (key == "sweep_lambda") {
      cfg.sweep_lambda = detail::config_double(key, value);
    } else if (key.rfind("sweep_lambda.", 0) == 0) {
      cfg.sweep_lambda_overrides[key.substr(13)] =
          detail::config_double(key, value);
    } else if (key == "algorithms") {
      cfg.algorithms = detail::config_list(key, value);
    } else if (key == "alpha") {
      cfg.alpha = detail::config_double(key, value);
    } else if (key == "knn_k") {
      const long long k = detail::config_int(key, value);
      if (k < 1) throw InvalidConfig("knn_k must be positive");
      cfg.knn_k = static_cast<std::size_t>(k);
    } else if (key == "normalize_scores") {
      cfg.normalize_scores = detail::config_bool(key, value);
    } else if (key == "model_checkpoint") {
      cfg.model_checkpoint = value;
    } else if (key == "subprofile_dump") {
      cfg.subprofile_dump = value;
    } else {
      throw InvalidConfig("unknown config key \"" + key + "\"");
    }
  }
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot open config file " + path);
  return parse_config(in);
}

inline void validate(const ExperimentConfig& cfg) {
  if (cfg.ratings_path.empty()) throw InvalidConfig("ratings path is required");
  if (cfg.items_path.empty()) throw InvalidConfig("items path is required");
  validate(cfg.mf);
  if (!(cfg.holdout_fraction > 0.0 && cfg.holdout_fraction < 1.0)) {
    throw InvalidConfig("holdout_fraction must lie in (0,1)");
  }
  if (cfg.relevance_threshold < 1 || cfg.relevance_threshold > 5) {
    throw InvalidConfig("relevance_threshold must lie in [1,5]");
  }
  if (cfg.lambda_grid.empty()) throw InvalidConfig("lambda_grid is empty");
  for (const double l : cfg.lambda_grid) {
    if (!(l >= 0.0 && l <= 1.0)) {
      throw InvalidConfig("lambda_grid values must lie in [0,1]");
    }
  }
  if (cfg.n_grid.empty()) throw InvalidConfig("n_grid is empty");
  if (std::find(cfg.n_grid.begin(), cfg.n_grid.end(), cfg.sweep_n) ==
      cfg.n_grid.end()) {
    throw InvalidConfig("sweep_n must be one of the n_grid values");
  }
  if (!(cfg.alpha >= 0.0 && cfg.alpha <= 1.0)) throw InvalidAlpha(cfg.alpha);
  if (cfg.algorithms.empty()) throw InvalidConfig("algorithms is empty");
  for (const std::string& a : cfg.algorithms) {
    if (a != "mf" && a != "mmr" && a != "xquad" && a != "spad") {
      throw InvalidConfig("unknown algorithm \"" + a + "\"");
    }
    if (std::count(cfg.algorithms.begin(), cfg.algorithms.end(), a) != 1) {
      throw InvalidConfig("algorithm \"" + a + "\" listed twice");
    }
  }
  for (const auto& [alg, l] : cfg.sweep_lambda_overrides) {
    if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), alg) ==
        cfg.algorithms.end()) {
      throw InvalidConfig("sweep_lambda override for unknown algorithm \"" +
                          alg + "\"");
    }
    if (!(l >= 0.0 && l <= 1.0)) {
      throw InvalidConfig("sweep_lambda." + alg + " must lie in [0,1]");
    }
  }
  if (!(cfg.sweep_lambda >= 0.0 && cfg.sweep_lambda <= 1.0)) {
    throw InvalidConfig("sweep_lambda must lie in [0,1]");
  }
}

// Nearest grid value to a wanted lambda; ties go to the smaller grid value.
inline double nearest_grid_lambda(const ExperimentConfig& cfg, double want) {
  double best = cfg.lambda_grid.front();
  for (const double l : cfg.lambda_grid) {
    if (std::fabs(l - want) < std::fabs(best - want)) best = l;
  }
  return best;
}

// The lambda an algorithm uses in the N sweep charts: its override if any,
// the global sweep_lambda otherwise, snapped onto the grid.
inline double resolved_sweep_lambda(const ExperimentConfig& cfg,
                                    const std::string& algorithm) {
  double want = cfg.sweep_lambda;
  const auto it = cfg.sweep_lambda_overrides.find(algorithm);
  if (it != cfg.sweep_lambda_overrides.end()) want = it->second;
  return nearest_grid_lambda(cfg, want);
}

}  // namespace diverank
