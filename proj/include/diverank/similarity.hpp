#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <unordered_map>
#include <vector>

#include "diverank/corpus.hpp"
#include "diverank/errors.hpp"

namespace diverank {

// Item-item cosine over binary rating vectors:
//   sim(i,j) = |U_i & U_j| / sqrt(|U_i| * |U_j|)
// where U_i is the set of users who rated i in train. Pairwise queries are
// exact; neighbor lists are precomputed up to `neighbor_cap` entries per item
// for the top-k lookups.
class ItemSimilarity {
 public:
  ItemSimilarity() = default;

  ItemSimilarity(const std::vector<Rating>& train, std::size_t neighbor_cap)
      : cap_(neighbor_cap) {
    if (cap_ == 0) throw InvalidConfig("neighbor cap must be positive");

    std::map<UserId, std::vector<ItemId>> by_user;
    for (const Rating& r : train) {
      by_user[r.user].push_back(r.item);
      raters_[r.item];
    }
    for (auto& [user, items] : by_user) {
      std::sort(items.begin(), items.end());
      items.erase(std::unique(items.begin(), items.end()), items.end());
      for (const ItemId item : items) raters_[item].push_back(user);
    }
    for (auto& [item, users] : raters_) std::sort(users.begin(), users.end());

    // Co-rating counts accumulated per user; only pairs that actually
    // co-occur materialize, which keeps this sparse.
    std::unordered_map<ItemId, std::unordered_map<ItemId, std::size_t>> co;
    for (const auto& [user, items] : by_user) {
      for (std::size_t a = 0; a < items.size(); ++a) {
        for (std::size_t b = a + 1; b < items.size(); ++b) {
          co[items[a]][items[b]] += 1;
        }
      }
    }

    for (const auto& [item, users] : raters_) neighbors_[item] = {};
    for (const auto& [a, row] : co) {
      for (const auto& [b, shared] : row) {
        const double sim =
            static_cast<double>(shared) /
            std::sqrt(static_cast<double>(raters_[a].size()) *
                      static_cast<double>(raters_[b].size()));
        neighbors_[a].emplace_back(b, sim);
        neighbors_[b].emplace_back(a, sim);
      }
    }
    for (auto& [item, list] : neighbors_) {
      std::sort(list.begin(), list.end(), [](const auto& x, const auto& y) {
        if (x.second != y.second) return x.second > y.second;
        return x.first < y.first;
      });
      if (list.size() > cap_) list.resize(cap_);
    }
  }

  bool knows(ItemId item) const { return raters_.count(item) > 0; }

  double similarity(ItemId a, ItemId b) const {
    const auto ia = raters_.find(a);
    const auto ib = raters_.find(b);
    if (ia == raters_.end() || ib == raters_.end()) return 0.0;
    if (a == b) return 1.0;
    const std::vector<UserId>& ua = ia->second;
    const std::vector<UserId>& ub = ib->second;
    std::size_t shared = 0;
    auto x = ua.begin();
    auto y = ub.begin();
    while (x != ua.end() && y != ub.end()) {
      if (*x < *y) {
        ++x;
      } else if (*y < *x) {
        ++y;
      } else {
        ++shared;
        ++x;
        ++y;
      }
    }
    if (shared == 0) return 0.0;
    return static_cast<double>(shared) /
           std::sqrt(static_cast<double>(ua.size()) *
                     static_cast<double>(ub.size()));
  }

  // Top-k co-rated neighbors of `item`, positive similarities only,
  // descending (ties by ascending id). Requires k <= neighbor cap.
  std::vector<std::pair<ItemId, double>> top_neighbors(ItemId item,
                                                       std::size_t k) const {
    if (k > cap_) {
      throw InvalidConfig("requested more neighbors than the precomputed cap");
    }
    const auto it = neighbors_.find(item);
    if (it == neighbors_.end()) return {};
    const std::size_t take = std::min(k, it->second.size());
    return std::vector<std::pair<ItemId, double>>(
        it->second.begin(),
        it->second.begin() + static_cast<std::ptrdiff_t>(take));
  }

  // Strongest tie from `item` into a member set; 0 when disjoint from all.
  double max_similarity(ItemId item, const std::vector<ItemId>& members) const {
    double best = 0.0;
    for (const ItemId m : members) best = std::max(best, similarity(item, m));
    return best;
  }

  // Whether `item` is linked to a sorted member set: a member itself, or
  // some member sits in its capped neighbor list. This is deliberately
  // stricter than sim > 0, which saturates once co-rating is dense.
  bool linked(ItemId item, const std::vector<ItemId>& members) const {
    if (std::binary_search(members.begin(), members.end(), item)) return true;
    const auto it = neighbors_.find(item);
    if (it == neighbors_.end()) return false;
    for (const auto& [neighbor, s] : it->second) {
      if (std::binary_search(members.begin(), members.end(), neighbor)) {
        return true;
      }
    }
    return false;
  }

  std::size_t rater_count(ItemId item) const {
    const auto it = raters_.find(item);
    return it == raters_.end() ? 0 : it->second.size();
  }

 private:
  std::size_t cap_ = 0;
  std::unordered_map<ItemId, std::vector<UserId>> raters_;  // sorted users
  std::unordered_map<ItemId, std::vector<std::pair<ItemId, double>>> neighbors_;
};

}  // namespace diverank
