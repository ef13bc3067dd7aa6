#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "diverank/corpus.hpp"
#include "diverank/distance.hpp"
#include "diverank/errors.hpp"
#include "diverank/mf.hpp"
#include "diverank/similarity.hpp"

namespace diverank {

// One subprofile: a cluster of a user's liked train items.
struct Subprofile {
  UserId owner = 0;
  std::vector<ItemId> members;  // sorted, non-empty
};

// One aspect of a user, either a feature label (feature >= 0) or a
// subprofile (members non-empty). `weight` is p(a|u); `pick_prob` holds the
// positive p(i|u,a) entries over the candidate set RS; `assoc` caches items
// known to belong to a subprofile aspect.
struct Aspect {
  double weight = 0.0;
  std::unordered_map<ItemId, double> pick_prob;
  int feature = -1;
  std::vector<ItemId> members;
  std::unordered_set<ItemId> assoc;
};

using UserAspects = std::vector<Aspect>;

inline double pick_prob(const Aspect& a, ItemId item) {
  const auto it = a.pick_prob.find(item);
  return it == a.pick_prob.end() ? 0.0 : it->second;
}

// Per-user aspect sets of one family, plus the membership predicate shared
// by the re-ranker and the coverage metric.
class AspectFamily {
 public:
  AspectFamily() = default;
  AspectFamily(const DistanceModel* distance, const ItemSimilarity* similarity)
      : distance_(distance), similarity_(similarity) {}

  static AspectFamily from_user_aspects(std::map<UserId, UserAspects> aspects) {
    AspectFamily f;
    f.by_user_ = std::move(aspects);
    return f;
  }

  void set_user(UserId user, UserAspects aspects) {
    by_user_[user] = std::move(aspects);
  }

  const UserAspects& for_user(UserId user) const {
    static const UserAspects empty;
    const auto it = by_user_.find(user);
    return it == by_user_.end() ? empty : it->second;
  }

  bool has_aspects(UserId user) const { return !for_user(user).empty(); }

  // Whether `item` has aspect `a`: carries the feature, or (for subprofile
  // aspects) is a member or holds a member in its capped neighbor list.
  bool contains(const Aspect& a, ItemId item) const {
    if (a.feature >= 0 && distance_ != nullptr) {
      return distance_->has_feature(item, a.feature);
    }
    if (a.assoc.count(item) > 0) return true;
    if (similarity_ != nullptr && !a.members.empty()) {
      return similarity_->linked(item, a.members);
    }
    return false;
  }

  const std::map<UserId, UserAspects>& all() const { return by_user_; }

 private:
  const DistanceModel* distance_ = nullptr;
  const ItemSimilarity* similarity_ = nullptr;
  std::map<UserId, UserAspects> by_user_;
};

// Candidate subprofile around each liked item: the item plus the liked items
// among its top-knn_k most similar neighbors. Only set-maximal candidates
// survive; equal sets collapse to one.
inline std::vector<Subprofile> mine_subprofiles(UserId user,
                                                const std::vector<ItemId>& liked,
                                                const ItemSimilarity& sim,
                                                std::size_t knn_k) {
  if (knn_k == 0) throw InvalidConfig("knn_k must be positive");
  std::vector<ItemId> profile(liked);
  std::sort(profile.begin(), profile.end());
  profile.erase(std::unique(profile.begin(), profile.end()), profile.end());
  if (profile.empty()) return {};

  std::set<std::vector<ItemId>> candidates;
  for (const ItemId seed : profile) {
    std::vector<ItemId> members{seed};
    for (const auto& [neighbor, s] : sim.top_neighbors(seed, knn_k)) {
      if (std::binary_search(profile.begin(), profile.end(), neighbor)) {
        members.push_back(neighbor);
      }
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    candidates.insert(std::move(members));
  }

  std::vector<Subprofile> out;
  for (const std::vector<ItemId>& c : candidates) {
    bool maximal = true;
    for (const std::vector<ItemId>& other : candidates) {
      if (other.size() > c.size() &&
          std::includes(other.begin(), other.end(), c.begin(), c.end())) {
        maximal = false;
        break;
      }
    }
    if (maximal) out.push_back(Subprofile{user, c});
  }
  return out;
}

namespace detail {

// Shared normalization step: p(i|u,a) proportional to the per-item weights,
// normalized over RS. Negative baseline scores clamp to 0 beforehand, so an
// all-nonpositive aspect gets no picks at all.
inline void normalize_pick_probs(Aspect& a,
                                 const std::vector<std::pair<ItemId, double>>& w) {
  double z = 0.0;
  for (const auto& [item, v] : w) z += v;
  if (z <= 0.0) return;
  for (const auto& [item, v] : w) {
    if (v > 0.0) a.pick_prob[item] = v / z;
  }
}

}  // namespace detail

// Feature-aspect model for one user: aspects are the features of the liked
// profile, weighted by liked-item counts; picks are score-proportional over
// the members of RS that carry the feature.
inline UserAspects feature_aspects(const DistanceModel& distance,
                                   const std::vector<ItemId>& liked,
                                   const ScoredCandidates& rs) {
  std::map<int, std::size_t> counts;
  for (const ItemId item : liked) {
    for (const int f : distance.features(item)) counts[f] += 1;
  }
  std::size_t total = 0;
  for (const auto& [f, c] : counts) total += c;
  if (total == 0) return {};

  UserAspects aspects;
  aspects.reserve(counts.size());
  for (const auto& [f, c] : counts) {
    Aspect a;
    a.feature = f;
    a.weight = static_cast<double>(c) / static_cast<double>(total);
    std::vector<std::pair<ItemId, double>> w;
    for (const auto& [item, score] : rs.entries) {
      if (distance.has_feature(item, f)) {
        w.emplace_back(item, std::max(score, 0.0));
      }
    }
    detail::normalize_pick_probs(a, w);
    aspects.push_back(std::move(a));
  }
  return aspects;
}

// Subprofile-aspect model for one user: weights proportional to subprofile
// size; picks proportional to score times the strongest member similarity,
// restricted to items linked to the subprofile through their capped
// neighbor lists. `membership_domain` lists the items whose membership is
// needed later (the candidate set plus the user's relevant test items);
// links are cached in `assoc`.
inline UserAspects subprofile_aspects(const ItemSimilarity& sim,
                                      const std::vector<Subprofile>& subprofiles,
                                      const ScoredCandidates& rs,
                                      const std::vector<ItemId>& membership_domain) {
  if (subprofiles.empty()) return {};
  std::size_t total = 0;
  for (const Subprofile& s : subprofiles) total += s.members.size();

  // Similarity of every domain item to every member, deduplicated across
  // subprofiles (members overlap heavily).
  std::vector<ItemId> member_union;
  for (const Subprofile& s : subprofiles) {
    member_union.insert(member_union.end(), s.members.begin(), s.members.end());
  }
  std::sort(member_union.begin(), member_union.end());
  member_union.erase(std::unique(member_union.begin(), member_union.end()),
                     member_union.end());
  std::vector<ItemId> domain(membership_domain);
  for (const auto& [item, score] : rs.entries) domain.push_back(item);
  std::sort(domain.begin(), domain.end());
  domain.erase(std::unique(domain.begin(), domain.end()), domain.end());

  // Pick weights need the actual similarity magnitudes, but only over RS.
  std::unordered_map<ItemId, std::unordered_map<ItemId, double>> pair_sim;
  for (const auto& [item, score] : rs.entries) {
    auto& row = pair_sim[item];
    for (const ItemId m : member_union) {
      const double s = sim.similarity(item, m);
      if (s > 0.0) row[m] = s;
    }
  }
  const auto max_sim = [&](ItemId d, const std::vector<ItemId>& members) {
    const auto it = pair_sim.find(d);
    if (it == pair_sim.end()) return 0.0;
    double best = 0.0;
    for (const ItemId m : members) {
      const auto jt = it->second.find(m);
      if (jt != it->second.end()) best = std::max(best, jt->second);
    }
    return best;
  };

  UserAspects aspects;
  aspects.reserve(subprofiles.size());
  for (const Subprofile& s : subprofiles) {
    Aspect a;
    a.members = s.members;
    a.weight = static_cast<double>(s.members.size()) / static_cast<double>(total);
    for (const ItemId d : domain) {
      if (sim.linked(d, s.members)) a.assoc.insert(d);
    }
    std::vector<std::pair<ItemId, double>> w;
    for (const auto& [item, score] : rs.entries) {
      const bool member = a.assoc.count(item) > 0;
      w.emplace_back(item,
                     member ? std::max(score, 0.0) * max_sim(item, s.members)
                            : 0.0);
    }
    detail::normalize_pick_probs(a, w);
    aspects.push_back(std::move(a));
  }
  return aspects;
}

}  // namespace diverank
