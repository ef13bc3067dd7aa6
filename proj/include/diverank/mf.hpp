#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "diverank/corpus.hpp"
#include "diverank/errors.hpp"
#include "diverank/rng.hpp"

namespace diverank {

struct MFConfig {
  int d = 32;
  double learning_rate = 0.01;
  double regularization = 0.05;
  int epochs = 30;
  std::uint64_t seed = 1;
};

// Per-user candidate set RS with baseline scores, descending by score and
// ties broken by ascending item id.
struct ScoredCandidates {
  UserId user = 0;
  std::vector<std::pair<ItemId, double>> entries;
};

inline void validate(const MFConfig& cfg) {
  if (cfg.d < 1) throw InvalidConfig("mf.d must be >= 1");
  if (!(cfg.learning_rate > 0.0)) {
    throw InvalidConfig("mf.learning_rate must be > 0");
  }
  if (cfg.regularization < 0.0) {
    throw InvalidConfig("mf.regularization must be >= 0");
  }
  if (cfg.epochs < 0) throw InvalidConfig("mf.epochs must be >= 0");
}

// Biased matrix factorization: s(u,i) = mu + b_u + b_i + p_u . q_i.
// Unknown users/items fall back to whatever bias terms are known.
class MFModel {
 public:
  MFModel() = default;

  double score(UserId user, ItemId item) const {
    const auto ui = user_index_.find(user);
    const auto ii = item_index_.find(item);
    double s = mean_;
    if (ui != user_index_.end()) s += user_bias_[ui->second];
    if (ii != item_index_.end()) s += item_bias_[ii->second];
    if (ui != user_index_.end() && ii != item_index_.end()) {
      const double* p = &user_factors_[ui->second * d_];
      const double* q = &item_factors_[ii->second * d_];
      for (int f = 0; f < d_; ++f) s += p[f] * q[f];
    }
    return s;
  }

  // Top-k pool items by score. The pool must not contain items the user
  // rated in train; that caller contract is re-checked here.
  ScoredCandidates candidates(UserId user, const std::vector<ItemId>& pool,
                              std::size_t k) const {
    if (k == 0) throw InvalidConfig("candidate size k must be positive");
    if (pool.empty()) throw EmptyPool();
    const auto* rated = rated_items_ptr(user);
    if (rated != nullptr) {
      for (const ItemId item : pool) {
        if (std::binary_search(rated->begin(), rated->end(), item)) {
          throw PreconditionViolation(
              "candidate pool contains item " + std::to_string(item) +
              " rated by user " + std::to_string(user) + " in train");
        }
      }
    }
    ScoredCandidates out;
    out.user = user;
    out.entries.reserve(pool.size());
    for (const ItemId item : pool) out.entries.emplace_back(item, score(user, item));
    std::sort(out.entries.begin(), out.entries.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
    if (out.entries.size() > k) out.entries.resize(k);
    return out;
  }

  int dimension() const { return d_; }
  double global_mean() const { return mean_; }
  std::size_t user_count() const { return users_.size(); }
  std::size_t item_count() const { return items_.size(); }
  const std::vector<UserId>& users() const { return users_; }
  const std::vector<ItemId>& items() const { return items_; }
  bool knows_user(UserId u) const { return user_index_.count(u) > 0; }
  bool knows_item(ItemId i) const { return item_index_.count(i) > 0; }

  double user_bias(UserId u) const {
    const auto it = user_index_.find(u);
    return it == user_index_.end() ? 0.0 : user_bias_[it->second];
  }
  double item_bias(ItemId i) const {
    const auto it = item_index_.find(i);
    return it == item_index_.end() ? 0.0 : item_bias_[it->second];
  }
  std::vector<double> user_factors(UserId u) const {
    const auto it = user_index_.find(u);
    if (it == user_index_.end()) return {};
    const auto* p = &user_factors_[it->second * d_];
    return std::vector<double>(p, p + d_);
  }
  std::vector<double> item_factors(ItemId i) const {
    const auto it = item_index_.find(i);
    if (it == item_index_.end()) return {};
    const auto* q = &item_factors_[it->second * d_];
    return std::vector<double>(q, q + d_);
  }
  // Items the user rated in train (sorted); empty for unknown users.
  const std::vector<ItemId>& rated_items(UserId u) const {
    static const std::vector<ItemId> empty;
    const auto* r = rated_items_ptr(u);
    return r == nullptr ? empty : *r;
  }

  // Flat text checkpoint, version-tagged. %.17g columns round-trip doubles
  // exactly; format documented in the README.
  void save(std::ostream& out) const {
    out << "diverank-mf-checkpoint v1\n";
    out << "dimension " << d_ << "\n";
    out << "global_mean " << detail_fmt(mean_) << "\n";
    out << "users " << users_.size() << "\n";
    for (std::size_t u = 0; u < users_.size(); ++u) {
      out << users_[u] << " " << detail_fmt(user_bias_[u]);
      for (int f = 0; f < d_; ++f) {
        out << " " << detail_fmt(user_factors_[u * d_ + f]);
      }
      out << "\n";
    }
    out << "items " << items_.size() << "\n";
    for (std::size_t i = 0; i < items_.size(); ++i) {
      out << items_[i] << " " << detail_fmt(item_bias_[i]);
      for (int f = 0; f < d_; ++f) {
        out << " " << detail_fmt(item_factors_[i * d_ + f]);
      }
      out << "\n";
    }
    out << "rated " << rated_.size() << "\n";
    for (std::size_t u = 0; u < users_.size(); ++u) {
      out << users_[u] << " " << rated_[u].size();
      for (const ItemId item : rated_[u]) out << " " << item;
      out << "\n";
    }
    out << "end\n";
  }

  static MFModel load(std::istream& in) {
    MFModel m;
    std::string line;
    if (!std::getline(in, line) || trimmed(line) != "diverank-mf-checkpoint v1") {
      throw DataError("model checkpoint: unrecognized header");
    }
    std::string word;
    in >> word;
    if (word != "dimension" || !(in >> m.d_) || m.d_ < 1) {
      throw DataError("model checkpoint: bad dimension");
    }
    in >> word;
    if (word != "global_mean" || !(in >> m.mean_)) {
      throw DataError("model checkpoint: bad global_mean");
    }
    std::size_t n = 0;
    in >> word >> n;
    if (word != "users") throw DataError("model checkpoint: missing users");
    m.users_.resize(n);
    m.user_bias_.resize(n);
    m.user_factors_.resize(n * m.d_);
    for (std::size_t u = 0; u < n; ++u) {
      if (!(in >> m.users_[u] >> m.user_bias_[u])) {
        throw DataError("model checkpoint: truncated user row");
      }
      for (int f = 0; f < m.d_; ++f) {
        if (!(in >> m.user_factors_[u * m.d_ + f])) {
          throw DataError("model checkpoint: truncated user row");
        }
      }
      m.user_index_[m.users_[u]] = u;
    }
    std::size_t c = 0;
    in >> word >> c;
    if (word != "items") throw DataError("model checkpoint: missing items");
    m.items_.resize(c);
    m.item_bias_.resize(c);
    m.item_factors_.resize(c * m.d_);
    for (std::size_t i = 0; i < c; ++i) {
      if (!(in >> m.items_[i] >> m.item_bias_[i])) {
        throw DataError("model checkpoint: truncated item row");
      }
      for (int f = 0; f < m.d_; ++f) {
        if (!(in >> m.item_factors_[i * m.d_ + f])) {
          throw DataError("model checkpoint: truncated item row");
        }
      }
      m.item_index_[m.items_[i]] = i;
    }
    std::size_t r = 0;
    in >> word >> r;
    if (word != "rated" || r != n) {
      throw DataError("model checkpoint: missing rated section");
    }
    m.rated_.resize(n);
    for (std::size_t u = 0; u < n; ++u) {
      UserId id = 0;
      std::size_t count = 0;
      if (!(in >> id >> count) || m.user_index_.find(id) == m.user_index_.end()) {
        throw DataError("model checkpoint: bad rated row");
      }
      auto& rated = m.rated_[m.user_index_[id]];
      rated.resize(count);
      for (std::size_t k = 0; k < count; ++k) {
        if (!(in >> rated[k])) {
          throw DataError("model checkpoint: truncated rated row");
        }
      }
    }
    in >> word;
    if (word != "end") throw DataError("model checkpoint: missing end marker");
    return m;
  }

 private:
  friend MFModel train(const std::vector<Rating>&, const MFConfig&);

  static std::string detail_fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  static std::string trimmed(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  }
  const std::vector<ItemId>* rated_items_ptr(UserId u) const {
    const auto it = user_index_.find(u);
    return it == user_index_.end() ? nullptr : &rated_[it->second];
  }

  int d_ = 0;
  double mean_ = 0.0;
  std::vector<UserId> users_;  // index -> id, ascending
  std::vector<ItemId> items_;
  std::unordered_map<UserId, std::size_t> user_index_;
  std::unordered_map<ItemId, std::size_t> item_index_;
  std::vector<double> user_factors_;  // row-major [index * d_]
  std::vector<double> item_factors_;
  std::vector<double> user_bias_;
  std::vector<double> item_bias_;
  std::vector<std::vector<ItemId>> rated_;  // per user index, sorted
};

// Sequential SGD on squared error with L2 regularization. Iteration order is
// the order of `train_ratings`; factor init is seeded Gaussian with std 0.1,
// so a fixed seed gives bitwise-identical models.
inline MFModel train(const std::vector<Rating>& train_ratings,
                     const MFConfig& cfg) {
  validate(cfg);
  if (train_ratings.empty()) throw EmptyCorpus();

  MFModel m;
  m.d_ = cfg.d;

  std::set<UserId> users;
  std::set<ItemId> items;
  double sum = 0.0;
  for (const Rating& r : train_ratings) {
    users.insert(r.user);
    items.insert(r.item);
    sum += r.value;
  }
  m.mean_ = sum / static_cast<double>(train_ratings.size());
  m.users_.assign(users.begin(), users.end());
  m.items_.assign(items.begin(), items.end());
  for (std::size_t u = 0; u < m.users_.size(); ++u) m.user_index_[m.users_[u]] = u;
  for (std::size_t i = 0; i < m.items_.size(); ++i) m.item_index_[m.items_[i]] = i;

  Rng rng(cfg.seed);
  m.user_factors_.resize(m.users_.size() * cfg.d);
  m.item_factors_.resize(m.items_.size() * cfg.d);
  for (double& v : m.user_factors_) v = 0.1 * rng.next_gaussian();
  for (double& v : m.item_factors_) v = 0.1 * rng.next_gaussian();
  m.user_bias_.assign(m.users_.size(), 0.0);
  m.item_bias_.assign(m.items_.size(), 0.0);

  const double lr = cfg.learning_rate;
  const double reg = cfg.regularization;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (const Rating& r : train_ratings) {
      const std::size_t ui = m.user_index_[r.user];
      const std::size_t ii = m.item_index_[r.item];
      double* p = &m.user_factors_[ui * cfg.d];
      double* q = &m.item_factors_[ii * cfg.d];
      double pred = m.mean_ + m.user_bias_[ui] + m.item_bias_[ii];
      for (int f = 0; f < cfg.d; ++f) pred += p[f] * q[f];
      const double err = r.value - pred;
      m.user_bias_[ui] += lr * (err - reg * m.user_bias_[ui]);
      m.item_bias_[ii] += lr * (err - reg * m.item_bias_[ii]);
      for (int f = 0; f < cfg.d; ++f) {
        const double pf = p[f];
        const double qf = q[f];
        p[f] += lr * (err * qf - reg * pf);
        q[f] += lr * (err * pf - reg * qf);
      }
    }
  }

  m.rated_.resize(m.users_.size());
  for (const Rating& r : train_ratings) {
    m.rated_[m.user_index_[r.user]].push_back(r.item);
  }
  for (auto& v : m.rated_) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  }
  return m;
}

}  // namespace diverank
