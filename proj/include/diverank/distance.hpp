#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "diverank/corpus.hpp"

namespace diverank {

// Pairwise item distance over binary feature vectors:
//   dist(i,j) = 1 - |F_i & F_j| / sqrt(|F_i| * |F_j|).
// Items with no features (or unknown items) are maximally distant from
// everything except themselves; dist(i,i) is 0 for every item.
class DistanceModel {
 public:
  DistanceModel() = default;

  explicit DistanceModel(const std::vector<ItemFeatures>& items) {
    std::unordered_map<std::string, int> ids;
    for (const ItemFeatures& it : items) {
      std::vector<int> fs;
      fs.reserve(it.features.size());
      for (const std::string& name : it.features) {
        const auto ins = ids.emplace(name, static_cast<int>(ids.size()));
        fs.push_back(ins.first->second);
      }
      std::sort(fs.begin(), fs.end());
      features_[it.item] = std::move(fs);
    }
    feature_names_.resize(ids.size());
    for (const auto& [name, id] : ids) feature_names_[id] = name;
  }

  double distance(ItemId a, ItemId b) const {
    if (a == b) return 0.0;
    const std::vector<int>* fa = features_of(a);
    const std::vector<int>* fb = features_of(b);
    if (fa == nullptr || fb == nullptr || fa->empty() || fb->empty()) return 1.0;
    std::size_t shared = 0;
    auto ia = fa->begin();
    auto ib = fb->begin();
    while (ia != fa->end() && ib != fb->end()) {
      if (*ia < *ib) {
        ++ia;
      } else if (*ib < *ia) {
        ++ib;
      } else {
        ++shared;
        ++ia;
        ++ib;
      }
    }
    const double denom = std::sqrt(static_cast<double>(fa->size()) *
                                   static_cast<double>(fb->size()));
    return 1.0 - static_cast<double>(shared) / denom;
  }

  bool has_feature(ItemId item, int feature) const {
    const std::vector<int>* fs = features_of(item);
    return fs != nullptr &&
           std::binary_search(fs->begin(), fs->end(), feature);
  }

  // Sorted internal feature ids of an item; empty if unknown/featureless.
  const std::vector<int>& features(ItemId item) const {
    static const std::vector<int> empty;
    const std::vector<int>* fs = features_of(item);
    return fs == nullptr ? empty : *fs;
  }

  std::size_t feature_count() const { return feature_names_.size(); }
  const std::string& feature_name(int id) const { return feature_names_.at(id); }

 private:
  const std::vector<int>* features_of(ItemId item) const {
    const auto it = features_.find(item);
    return it == features_.end() ? nullptr : &it->second;
  }

  std::unordered_map<ItemId, std::vector<int>> features_;
  std::vector<std::string> feature_names_;  // internal id -> label
};

}  // namespace diverank
