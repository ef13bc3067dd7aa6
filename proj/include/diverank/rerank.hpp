#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "diverank/aspects.hpp"
#include "diverank/distance.hpp"
#include "diverank/errors.hpp"
#include "diverank/mf.hpp"

namespace diverank {

enum class DiversityKind {
  none,
  mmr,
  intent_aware_features,
  intent_aware_subprofiles,
};

inline const char* to_string(DiversityKind k) {
  switch (k) {
    case DiversityKind::none: return "none";
    case DiversityKind::mmr: return "mmr";
    case DiversityKind::intent_aware_features: return "intent_aware_features";
    case DiversityKind::intent_aware_subprofiles: return "intent_aware_subprofiles";
  }
  return "?";
}

struct GreedyConfig {
  double lambda = 0.5;
  std::size_t n = 10;
  DiversityKind kind = DiversityKind::none;
  // Min-max normalize baseline scores over RS before mixing; raw by default.
  bool normalize_scores = false;
};

struct RankedList {
  UserId user = 0;
  std::vector<ItemId> items;

  // 1-based position of `item`, 0 when absent.
  std::size_t rank(ItemId item) const {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (items[i] == item) return i + 1;
    }
    return 0;
  }
  std::size_t size() const { return items.size(); }
};

// (1 - lambda) * relevance + lambda * diversity.
inline double objective(double score, double diversity, double lambda) {
  return (1.0 - lambda) * score + lambda * diversity;
}

// Max distance from `item` to the list built so far. An empty list yields
// 1.0 so the first pick is relevance-driven for lambda < 1.
inline double mmr_div(ItemId item, const std::vector<ItemId>& rl,
                      const DistanceModel& distance) {
  if (rl.empty()) return 1.0;
  double best = 0.0;
  for (const ItemId j : rl) best = std::max(best, distance.distance(item, j));
  return best;
}

// Intent-aware novelty of `item` against the list built so far:
//   sum_a p(a|u) p(i|u,a) prod_{j in rl} (1 - p(j|u,a)).
inline double ia_div(ItemId item, const std::vector<ItemId>& rl,
                     const UserAspects& aspects) {
  double total = 0.0;
  for (const Aspect& a : aspects) {
    double v = a.weight * pick_prob(a, item);
    if (v == 0.0) continue;
    for (const ItemId j : rl) v *= 1.0 - pick_prob(a, j);
    total += v;
  }
  return total;
}

inline double ia_div(ItemId item, const std::vector<ItemId>& rl,
                     const AspectFamily& family, UserId user) {
  return ia_div(item, rl, family.for_user(user));
}

// Diversity policies for the greedy loop. `marginal` scores a candidate
// against the current list; `on_append` folds the chosen item in.
struct NoDiversity {
  double marginal(ItemId) const { return 0.0; }
  void on_append(ItemId) {}
};

class MmrDiversity {
 public:
  explicit MmrDiversity(const DistanceModel& distance) : distance_(&distance) {}
  double marginal(ItemId item) const { return mmr_div(item, selected_, *distance_); }
  void on_append(ItemId item) { selected_.push_back(item); }

 private:
  const DistanceModel* distance_;
  std::vector<ItemId> selected_;
};

// Keeps one running product per aspect so each marginal is O(|aspects|);
// matches the direct evaluation to within 1e-12.
class IaDiversity {
 public:
  explicit IaDiversity(const UserAspects& aspects)
      : aspects_(&aspects), remaining_(aspects.size(), 1.0) {}

  double marginal(ItemId item) const {
    double total = 0.0;
    for (std::size_t a = 0; a < aspects_->size(); ++a) {
      const Aspect& asp = (*aspects_)[a];
      total += asp.weight * pick_prob(asp, item) * remaining_[a];
    }
    return total;
  }
  void on_append(ItemId item) {
    for (std::size_t a = 0; a < aspects_->size(); ++a) {
      remaining_[a] *= 1.0 - pick_prob((*aspects_)[a], item);
    }
  }

 private:
  const UserAspects* aspects_;
  std::vector<double> remaining_;
};

namespace detail {

inline void validate(const GreedyConfig& cfg) {
  if (!(cfg.lambda >= 0.0 && cfg.lambda <= 1.0)) {
    throw InvalidConfig("lambda must lie in [0,1]");
  }
  if (cfg.n == 0) throw InvalidConfig("N must be positive");
}

// Scores as mixed into the objective: raw, or min-max normalized over RS.
// A constant score vector normalizes to all ones.
inline std::vector<double> mixing_scores(const ScoredCandidates& rs,
                                         const GreedyConfig& cfg) {
  std::vector<double> s;
  s.reserve(rs.entries.size());
  for (const auto& [item, score] : rs.entries) s.push_back(score);
  if (!cfg.normalize_scores) return s;
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double span = *hi - *lo;
  for (double& v : s) v = span > 0.0 ? (v - *lo) / span : 1.0;
  return s;
}

}  // namespace detail

// Greedy Eq.-style insertion: repeatedly append the remaining candidate with
// the best (1-λ)s + λ·div. RS arrives sorted by descending score with ties
// on ascending id, so a strict > scan breaks objective ties by higher score,
// then lower id.
template <class Diversity>
RankedList greedy_rerank(const ScoredCandidates& rs, const GreedyConfig& cfg,
                         Diversity&& diversity) {
  detail::validate(cfg);
  if (rs.entries.empty()) throw EmptyCandidates();

  RankedList out;
  out.user = rs.user;
  const std::size_t take = std::min(cfg.n, rs.entries.size());
  out.items.reserve(take);

  if (cfg.kind == DiversityKind::none) {
    for (std::size_t i = 0; i < take; ++i) out.items.push_back(rs.entries[i].first);
    return out;
  }

  const std::vector<double> scores = detail::mixing_scores(rs, cfg);
  std::vector<bool> used(rs.entries.size(), false);
  for (std::size_t step = 0; step < take; ++step) {
    std::size_t best = rs.entries.size();
    double best_value = 0.0;
    for (std::size_t c = 0; c < rs.entries.size(); ++c) {
      if (used[c]) continue;
      const double value = objective(
          scores[c], diversity.marginal(rs.entries[c].first), cfg.lambda);
      if (best == rs.entries.size() || value > best_value) {
        best = c;
        best_value = value;
      }
    }
    used[best] = true;
    out.items.push_back(rs.entries[best].first);
    diversity.on_append(rs.entries[best].first);
  }
  return out;
}

// Dispatch on the configured diversity kind. `distance` is required for MMR
// and `family` for the intent-aware kinds; a user without aspects degrades
// to relevance-only ordering.
inline RankedList rerank(const ScoredCandidates& rs, const GreedyConfig& cfg,
                         const DistanceModel* distance,
                         const AspectFamily* family) {
  switch (cfg.kind) {
    case DiversityKind::none:
      return greedy_rerank(rs, cfg, NoDiversity{});
    case DiversityKind::mmr:
      if (distance == nullptr) {
        throw PreconditionViolation("mmr re-ranking needs a distance model");
      }
      return greedy_rerank(rs, cfg, MmrDiversity(*distance));
    case DiversityKind::intent_aware_features:
    case DiversityKind::intent_aware_subprofiles:
      if (family == nullptr) {
        throw PreconditionViolation("intent-aware re-ranking needs aspects");
      }
      return greedy_rerank(rs, cfg, IaDiversity(family->for_user(rs.user)));
  }
  throw InvalidConfig("unknown diversity kind");
}

}  // namespace diverank
