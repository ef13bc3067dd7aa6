#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diverank/corpus.hpp"
#include "diverank/errors.hpp"
#include "diverank/rerank.hpp"

namespace diverank {

// Top-N lists of several algorithms over a shared user set, plus the
// judgments they compete on. Scores are comparative: they only mean
// anything relative to this exact roster.
struct RunSet {
  std::vector<std::string> algorithms;  // roster, order fixed
  std::vector<UserId> users;            // ascending
  std::size_t n = 0;
  // lists[user] is aligned with `algorithms`.
  std::map<UserId, std::vector<RankedList>> lists;
  RelevanceJudgments judgments;
};

inline void validate(const RunSet& rs) {
  if (rs.algorithms.empty()) throw InvalidConfig("run set has no algorithms");
  if (rs.n == 0) throw InvalidConfig("run set cutoff N must be positive");
  if (rs.users.empty()) throw EmptyUserSet();
  for (const UserId u : rs.users) {
    const auto it = rs.lists.find(u);
    if (it == rs.lists.end() || it->second.size() != rs.algorithms.size()) {
      throw DataError("user " + std::to_string(u) +
                      " is missing lists for some algorithms");
    }
    for (const RankedList& l : it->second) {
      if (l.items.size() > rs.n) {
        throw DataError("list for user " + std::to_string(u) +
                        " is longer than N");
      }
    }
  }
}

// 1-based position of the first relevant item within the top-n prefix;
// 0 when the prefix has no hit.
inline std::size_t first_hit(const RankedList& list,
                             const std::unordered_set<ItemId>& rel,
                             std::size_t n) {
  const std::size_t limit = std::min(n, list.items.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (rel.count(list.items[i]) > 0) return i + 1;
  }
  return 0;
}

// Prefix hit test: does any of the first `position` entries land in rel_u?
inline bool hit(std::size_t position, UserId user, std::size_t alg_index,
                const RunSet& rs) {
  if (position < 1 || position > rs.n) throw PositionOutOfRange(position, rs.n);
  const RankedList& list = rs.lists.at(user).at(alg_index);
  const std::unordered_set<ItemId>& rel = rs.judgments.for_user(user);
  const std::size_t f = first_hit(list, rel, rs.n);
  return f != 0 && f <= position;
}

struct SDReport {
  std::vector<std::string> algorithms;
  std::size_t n = 0;
  std::vector<double> scores;              // aligned with algorithms
  std::vector<UserId> users;
  std::vector<std::vector<int>> awards;    // [user index][algorithm index]
  std::vector<std::size_t> earliest_hit;   // per user; 0 = nobody hit
};

// One user's sudden-death round: every algorithm whose first hit comes at
// the overall earliest position gets the point; ties share. No hit within
// N anywhere, no points.
inline std::vector<int> sd_user(UserId user, const RunSet& rs) {
  const std::unordered_set<ItemId>& rel = rs.judgments.for_user(user);
  std::vector<std::size_t> firsts(rs.algorithms.size(), 0);
  std::size_t best = 0;
  const std::vector<RankedList>& lists = rs.lists.at(user);
  for (std::size_t a = 0; a < lists.size(); ++a) {
    firsts[a] = first_hit(lists[a], rel, rs.n);
    if (firsts[a] != 0 && (best == 0 || firsts[a] < best)) best = firsts[a];
  }
  std::vector<int> awards(rs.algorithms.size(), 0);
  if (best != 0) {
    for (std::size_t a = 0; a < awards.size(); ++a) {
      awards[a] = firsts[a] == best ? 1 : 0;
    }
  }
  return awards;
}

inline SDReport sd_scores(const RunSet& rs) {
  validate(rs);
  SDReport report;
  report.algorithms = rs.algorithms;
  report.n = rs.n;
  report.users = rs.users;
  report.awards.resize(rs.users.size());
  report.earliest_hit.resize(rs.users.size(), 0);
  report.scores.assign(rs.algorithms.size(), 0.0);

  for (std::size_t ui = 0; ui < rs.users.size(); ++ui) {
    const UserId user = rs.users[ui];
    report.awards[ui] = sd_user(user, rs);
    const std::unordered_set<ItemId>& rel = rs.judgments.for_user(user);
    std::size_t best = 0;
    for (const RankedList& l : rs.lists.at(user)) {
      const std::size_t f = first_hit(l, rel, rs.n);
      if (f != 0 && (best == 0 || f < best)) best = f;
    }
    report.earliest_hit[ui] = best;
    for (std::size_t a = 0; a < report.scores.size(); ++a) {
      report.scores[a] += report.awards[ui][a];
    }
  }
  for (double& s : report.scores) s /= static_cast<double>(rs.users.size());
  return report;
}

}  // namespace diverank
