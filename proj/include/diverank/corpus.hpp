#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "diverank/errors.hpp"
#include "diverank/rng.hpp"

namespace diverank {

using UserId = std::uint32_t;
using ItemId = std::uint32_t;

// One (user, item, rating, timestamp) interaction on the 1..5 scale.
struct Rating {
  UserId user = 0;
  ItemId item = 0;
  int value = 0;
  std::int64_t timestamp = 0;

  friend bool operator==(const Rating&, const Rating&) = default;
};

struct ItemFeatures {
  ItemId item = 0;
  std::string title;                  // kept for reporting only
  std::vector<std::string> features;  // sorted, unique, non-empty labels
};

struct SplitCorpus {
  std::vector<Rating> train;
  std::vector<Rating> test;
  std::vector<UserId> users;  // ascending, unique, over train+test
  std::vector<ItemId> items;  // ascending, unique, over train+test
};

struct RelevanceJudgments {
  int threshold = 4;
  std::map<UserId, std::unordered_set<ItemId>> relevant;  // only non-empty sets

  bool is_relevant(UserId user, ItemId item) const {
    const auto it = relevant.find(user);
    return it != relevant.end() && it->second.count(item) > 0;
  }

  const std::unordered_set<ItemId>& for_user(UserId user) const {
    static const std::unordered_set<ItemId> empty;
    const auto it = relevant.find(user);
    return it == relevant.end() ? empty : it->second;
  }
};

namespace detail {

inline std::vector<std::string_view> split_on(std::string_view line,
                                              std::string_view delim) {
  std::vector<std::string_view> parts;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t next = line.find(delim, pos);
    if (next == std::string_view::npos) {
      parts.push_back(line.substr(pos));
      return parts;
    }
    parts.push_back(line.substr(pos, next - pos));
    pos = next + delim.size();
  }
}

template <class Int>
Int parse_int(std::string_view text, std::size_t line_no, const char* what) {
  Int value{};
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw MalformedLine(line_no, std::string("non-numeric ") + what + " '" +
                                     std::string(text) + "'");
  }
  return value;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace detail

// Ratings file: one "user::item::rating::timestamp" record per line.
// Aborts with MalformedLine (1-based) on the first bad record.
inline std::vector<Rating> parse_ratings(std::istream& in) {
  std::vector<Rating> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_on(line, "::");
    if (fields.size() != 4) {
      throw MalformedLine(line_no, "expected user::item::rating::timestamp");
    }
    Rating r;
    r.user = detail::parse_int<UserId>(fields[0], line_no, "user id");
    r.item = detail::parse_int<ItemId>(fields[1], line_no, "item id");
    r.value = detail::parse_int<int>(fields[2], line_no, "rating");
    r.timestamp =
        detail::parse_int<std::int64_t>(fields[3], line_no, "timestamp");
    if (r.user == 0 || r.item == 0) {
      throw MalformedLine(line_no, "ids must be positive");
    }
    if (r.value < 1 || r.value > 5) {
      throw MalformedLine(line_no, "rating outside 1..5");
    }
    if (r.timestamp < 0) {
      throw MalformedLine(line_no, "negative timestamp");
    }
    out.push_back(r);
  }
  return out;
}

// Item file: "item::title::Feature1|Feature2|..." per line. Titles are kept
// as raw bytes (the MovieLens distribution is Latin-1, not UTF-8).
inline std::vector<ItemFeatures> parse_item_features(std::istream& in) {
  std::vector<ItemFeatures> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_on(line, "::");
    if (fields.size() != 3) {
      throw MalformedLine(line_no, "expected item::title::features");
    }
    ItemFeatures f;
    f.item = detail::parse_int<ItemId>(fields[0], line_no, "item id");
    if (f.item == 0) throw MalformedLine(line_no, "ids must be positive");
    f.title = std::string(fields[1]);
    for (const auto label : detail::split_on(fields[2], "|")) {
      if (!label.empty()) f.features.emplace_back(label);
    }
    std::sort(f.features.begin(), f.features.end());
    f.features.erase(std::unique(f.features.begin(), f.features.end()),
                     f.features.end());
    out.push_back(std::move(f));
  }
  return out;
}

// Canonical writer for the ratings format above; parse_ratings(write(r)) == r.
inline void write_ratings(std::ostream& out,
                          const std::vector<Rating>& ratings) {
  for (const Rating& r : ratings) {
    out << r.user << "::" << r.item << "::" << r.value << "::" << r.timestamp
        << "\n";
  }
}

// Per-user random holdout: floor(holdout_fraction * |ratings_u|) ratings go
// to test, the rest stay in train. Users with fewer than 2 ratings are never
// split. Deterministic for a fixed seed regardless of user processing order.
inline SplitCorpus split(const std::vector<Rating>& ratings,
                         double holdout_fraction, std::uint64_t seed) {
  if (ratings.empty()) throw EmptyCorpus();
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw InvalidConfig("holdout_fraction must lie in (0,1)");
  }

  std::map<UserId, std::vector<std::size_t>> per_user;  // indices in file order
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    per_user[ratings[i].user].push_back(i);
  }

  std::vector<char> to_test(ratings.size(), 0);
  for (const auto& [user, indices] : per_user) {
    if (indices.size() < 2) continue;
    auto n_test = static_cast<std::size_t>(
        holdout_fraction * static_cast<double>(indices.size()));
    n_test = std::min(n_test, indices.size() - 1);  // test users keep a profile
    if (n_test == 0) continue;
    std::vector<std::size_t> shuffled = indices;
    Rng rng(mix_seed(seed, user));
    rng.shuffle(shuffled);
    for (std::size_t k = 0; k < n_test; ++k) to_test[shuffled[k]] = 1;
  }

  SplitCorpus out;
  std::set<UserId> users;
  std::set<ItemId> items;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    (to_test[i] ? out.test : out.train).push_back(ratings[i]);
    users.insert(ratings[i].user);
    items.insert(ratings[i].item);
  }
  out.users.assign(users.begin(), users.end());
  out.items.assign(items.begin(), items.end());
  return out;
}

// rel_u = test items the user rated at or above the threshold.
inline RelevanceJudgments judgments(const SplitCorpus& corpus,
                                    int threshold = 4) {
  if (threshold < 1 || threshold > 5) {
    throw InvalidConfig("relevance threshold must lie in 1..5");
  }
  RelevanceJudgments out;
  out.threshold = threshold;
  for (const Rating& r : corpus.test) {
    if (r.value >= threshold) out.relevant[r.user].insert(r.item);
  }
  return out;
}

}  // namespace diverank
