#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "diverank/aspects.hpp"
#include "diverank/distance.hpp"
#include "diverank/errors.hpp"
#include "diverank/rerank.hpp"

namespace diverank {

struct MetricValue {
  std::string name;
  std::size_t n = 0;
  double value = 0.0;
};

// Mean pairwise distance over the list; singleton lists score 0.
inline double ild(const RankedList& list, const DistanceModel& distance) {
  if (list.items.empty()) throw EmptyList();
  const std::size_t n = list.items.size();
  if (n == 1) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      sum += distance.distance(list.items[i], list.items[j]);
    }
  }
  return 2.0 * sum / (static_cast<double>(n) * static_cast<double>(n - 1));
}

inline double precision(const RankedList& list,
                        const std::unordered_set<ItemId>& rel) {
  if (list.items.empty()) return 0.0;
  std::size_t hits = 0;
  for (const ItemId i : list.items) hits += rel.count(i);
  return static_cast<double>(hits) / static_cast<double>(list.items.size());
}

// Reciprocal rank of the first relevant item, cutoff-limited to the list.
inline double mrr(const RankedList& list, const std::unordered_set<ItemId>& rel) {
  for (std::size_t i = 0; i < list.items.size(); ++i) {
    if (rel.count(list.items[i]) > 0) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

inline int one_call(const RankedList& list,
                    const std::unordered_set<ItemId>& rel) {
  for (const ItemId i : list.items) {
    if (rel.count(i) > 0) return 1;
  }
  return 0;
}

namespace detail {

// Gain of an ordering under aspect coverage with redundancy decay alpha:
// each position adds, per still-fresh aspect the item is relevant for,
// 1/log2(rank+1); covering an aspect decays it by (1 - alpha).
// `relevant(k, a)` says whether item k of `order` is relevant for aspect a.
template <class RelFn>
double coverage_gain(std::size_t length, std::size_t aspect_count, double alpha,
                     RelFn&& relevant) {
  std::vector<double> fresh(aspect_count, 1.0);
  double gain = 0.0;
  for (std::size_t k = 0; k < length; ++k) {
    double g = 0.0;
    for (std::size_t a = 0; a < aspect_count; ++a) {
      if (relevant(k, a)) g += fresh[a];
    }
    gain += g / std::log2(static_cast<double>(k) + 2.0);
    for (std::size_t a = 0; a < aspect_count; ++a) {
      if (relevant(k, a)) fresh[a] *= 1.0 - alpha;
    }
  }
  return gain;
}

}  // namespace detail

// Aspect-aware nDCG of the list: coverage gain normalized by the gain of a
// greedily built ideal ordering of the user's relevant items (padded with
// the list's own items when there are fewer relevant items than positions).
// A user without aspects scores 0. The greedy ideal can occasionally be
// beaten, so the ratio is clamped to 1.
inline double alpha_ndcg(const RankedList& list, UserId user,
                         const AspectFamily& family,
                         const std::unordered_set<ItemId>& rel, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidAlpha(alpha);
  if (list.items.empty()) throw EmptyList();
  const UserAspects& aspects = family.for_user(user);
  if (aspects.empty()) return 0.0;

  // Ideal pool: the relevant items, padded (in list order) up to the list
  // length. Membership lookups are shared between the two gain passes.
  std::vector<ItemId> pool(rel.begin(), rel.end());
  std::sort(pool.begin(), pool.end());
  for (const ItemId i : list.items) {
    if (pool.size() >= list.items.size()) break;
    if (rel.count(i) == 0) pool.push_back(i);
  }

  std::unordered_map<ItemId, std::vector<char>> rel_aspects;
  const auto aspect_rel = [&](ItemId item) -> const std::vector<char>& {
    auto it = rel_aspects.find(item);
    if (it == rel_aspects.end()) {
      std::vector<char> row(aspects.size(), 0);
      if (rel.count(item) > 0) {
        for (std::size_t a = 0; a < aspects.size(); ++a) {
          row[a] = family.contains(aspects[a], item) ? 1 : 0;
        }
      }
      it = rel_aspects.emplace(item, std::move(row)).first;
    }
    return it->second;
  };

  const double gain = detail::coverage_gain(
      list.items.size(), aspects.size(), alpha,
      [&](std::size_t k, std::size_t a) { return aspect_rel(list.items[k])[a] != 0; });

  // Greedy ideal: at each position take the pooled item with the largest
  // still-fresh coverage, ties to the lower id.
  std::vector<double> fresh(aspects.size(), 1.0);
  std::vector<ItemId> ideal;
  std::vector<bool> used(pool.size(), false);
  const std::size_t length = std::min(list.items.size(), pool.size());
  for (std::size_t k = 0; k < length; ++k) {
    std::size_t best = pool.size();
    double best_cover = -1.0;
    for (std::size_t c = 0; c < pool.size(); ++c) {
      if (used[c]) continue;
      const std::vector<char>& row = aspect_rel(pool[c]);
      double cover = 0.0;
      for (std::size_t a = 0; a < aspects.size(); ++a) {
        if (row[a]) cover += fresh[a];
      }
      if (cover > best_cover) {
        best = c;
        best_cover = cover;
      }
    }
    used[best] = true;
    ideal.push_back(pool[best]);
    const std::vector<char>& row = aspect_rel(pool[best]);
    for (std::size_t a = 0; a < aspects.size(); ++a) {
      if (row[a]) fresh[a] *= 1.0 - alpha;
    }
  }

  const double idcg = detail::coverage_gain(
      ideal.size(), aspects.size(), alpha,
      [&](std::size_t k, std::size_t a) { return aspect_rel(ideal[k])[a] != 0; });
  if (idcg <= 0.0) return 0.0;
  return std::min(1.0, gain / idcg);
}

}  // namespace diverank
