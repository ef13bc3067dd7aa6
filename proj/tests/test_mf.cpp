#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <sstream>

#include "diverank/mf.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace diverank;

namespace {

MFConfig small_config() {
  MFConfig cfg;
  cfg.d = 4;
  cfg.epochs = 5;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("training rejects bad hyperparameters") {
  const std::vector<Rating> r = {{1, 1, 3, 0}};
  MFConfig cfg;
  cfg.d = 0;
  CHECK_THROWS_AS(train(r, cfg), InvalidConfig);
  cfg = MFConfig{};
  cfg.learning_rate = 0.0;
  CHECK_THROWS_AS(train(r, cfg), InvalidConfig);
  cfg = MFConfig{};
  cfg.regularization = -0.1;
  CHECK_THROWS_AS(train(r, cfg), InvalidConfig);
  cfg = MFConfig{};
  cfg.epochs = -1;
  CHECK_THROWS_AS(train(r, cfg), InvalidConfig);
  CHECK_THROWS_AS(train({}, MFConfig{}), EmptyCorpus);
}

TEST_CASE("an untrained model scores from the global mean and factors only") {
  const std::vector<Rating> r = {{1, 1, 5, 0}, {1, 2, 1, 0}, {2, 1, 3, 0}};
  MFConfig cfg = small_config();
  cfg.epochs = 0;
  const MFModel m = train(r, cfg);
  CHECK(m.global_mean() == 3.0);
  CHECK(m.user_bias(1) == 0.0);
  CHECK(m.item_bias(2) == 0.0);

  const auto p = m.user_factors(1);
  const auto q = m.item_factors(2);
  double dot = 0.0;
  for (int f = 0; f < cfg.d; ++f) dot += p[f] * q[f];
  CHECK(m.score(1, 2) == 3.0 + dot);
}

TEST_CASE("scores fall back to known bias terms for unseen ids") {
  const std::vector<Rating> r = {{1, 1, 5, 0}, {1, 2, 1, 0}, {2, 1, 3, 0}};
  const MFModel m = train(r, small_config());
  CHECK(m.score(999, 1) == m.global_mean() + m.item_bias(1));
  CHECK(m.score(1, 999) == m.global_mean() + m.user_bias(1));
  CHECK(m.score(999, 999) == m.global_mean());
}

TEST_CASE("training is reproducible per seed") {
  const auto corpus = synthetic::genre_corpus({});
  const MFModel a = train(corpus.ratings, small_config());
  const MFModel b = train(corpus.ratings, small_config());
  MFConfig other = small_config();
  other.seed = 12;
  const MFModel c = train(corpus.ratings, other);

  bool all_equal = true, any_differs = false;
  for (const UserId u : a.users()) {
    for (ItemId i = 1; i <= 20; ++i) {
      all_equal &= a.score(u, i) == b.score(u, i);
      any_differs |= a.score(u, i) != c.score(u, i);
    }
  }
  CHECK(all_equal);
  CHECK(any_differs);
}

TEST_CASE("one SGD pass steps along the negative loss gradient") {
  // Single rating, so one epoch is exactly one update. The step divided by
  // the learning rate must match central finite differences of
  //   L = (err^2 + reg * (|p|^2 + |q|^2 + bu^2 + bi^2)) / 2.
  const std::vector<Rating> r = {{1, 1, 5, 0}};
  MFConfig cfg;
  cfg.d = 3;
  cfg.learning_rate = 0.01;
  cfg.regularization = 0.07;
  cfg.seed = 3;
  cfg.epochs = 0;
  const MFModel before = train(r, cfg);
  cfg.epochs = 1;
  const MFModel after = train(r, cfg);

  const double mean = before.global_mean();
  const auto p0 = before.user_factors(1);
  const auto q0 = before.item_factors(1);
  const auto loss = [&](const std::vector<double>& p,
                        const std::vector<double>& q, double bu, double bi) {
    double dot = 0.0, norm = bu * bu + bi * bi;
    for (int f = 0; f < cfg.d; ++f) {
      dot += p[f] * q[f];
      norm += p[f] * p[f] + q[f] * q[f];
    }
    const double err = 5.0 - (mean + bu + bi + dot);
    return 0.5 * (err * err + cfg.regularization * norm);
  };

  const double h = 1e-6;
  const auto check_step = [&](double stepped, double base,
                              const std::function<double(double)>& loss_at) {
    const double grad = (loss_at(base + h) - loss_at(base - h)) / (2.0 * h);
    const double step = (stepped - base) / cfg.learning_rate;
    CHECK(step == Catch::Approx(-grad).epsilon(1e-4));
  };

  check_step(after.user_bias(1), 0.0,
             [&](double b) { return loss(p0, q0, b, 0.0); });
  check_step(after.item_bias(1), 0.0,
             [&](double b) { return loss(p0, q0, 0.0, b); });
  for (int f = 0; f < cfg.d; ++f) {
    check_step(after.user_factors(1)[f], p0[f], [&](double v) {
      auto p = p0;
      p[f] = v;
      return loss(p, q0, 0.0, 0.0);
    });
    check_step(after.item_factors(1)[f], q0[f], [&](double v) {
      auto q = q0;
      q[f] = v;
      return loss(p0, q, 0.0, 0.0);
    });
  }
}

TEST_CASE("training drives fit error down") {
  const auto corpus = synthetic::genre_corpus({});
  MFConfig cfg;
  cfg.d = 8;
  cfg.seed = 5;
  cfg.epochs = 0;
  const MFModel untrained = train(corpus.ratings, cfg);
  cfg.epochs = 30;
  const MFModel trained = train(corpus.ratings, cfg);
  CHECK(oracle::rmse(trained, corpus.ratings) <
        oracle::rmse(untrained, corpus.ratings) * 0.8);
}

TEST_CASE("candidates are sorted by score with id tie-breaks and truncated") {
  const auto corpus = synthetic::genre_corpus({});
  const MFModel m = train(corpus.ratings, small_config());
  const UserId u = m.users().front();
  std::vector<ItemId> pool;
  for (const ItemId i : m.items()) {
    if (!std::binary_search(m.rated_items(u).begin(), m.rated_items(u).end(), i)) {
      pool.push_back(i);
    }
  }

  const ScoredCandidates rs = m.candidates(u, pool, 25);
  REQUIRE(rs.entries.size() == 25);
  CHECK(rs.user == u);
  for (std::size_t i = 1; i < rs.entries.size(); ++i) {
    const bool ordered =
        rs.entries[i - 1].second > rs.entries[i].second ||
        (rs.entries[i - 1].second == rs.entries[i].second &&
         rs.entries[i - 1].first < rs.entries[i].first);
    CHECK(ordered);
  }
  for (const auto& [item, score] : rs.entries) {
    CHECK(score == m.score(u, item));
  }
}

TEST_CASE("candidate requests are validated") {
  const std::vector<Rating> r = {{1, 1, 5, 0}, {1, 2, 1, 0}, {2, 3, 3, 0}};
  const MFModel m = train(r, small_config());
  CHECK_THROWS_AS(m.candidates(1, {3}, 0), InvalidConfig);
  CHECK_THROWS_AS(m.candidates(1, {}, 5), EmptyPool);
  // Item 1 is in user 1's training profile; the pool contract forbids it.
  CHECK_THROWS_AS(m.candidates(1, {1, 3}, 5), PreconditionViolation);
}

TEST_CASE("checkpoints restore the exact model") {
  const auto corpus = synthetic::genre_corpus({});
  const MFModel m = train(corpus.ratings, small_config());

  std::stringstream buffer;
  m.save(buffer);
  const MFModel loaded = MFModel::load(buffer);

  CHECK(loaded.dimension() == m.dimension());
  CHECK(loaded.global_mean() == m.global_mean());
  CHECK(loaded.users() == m.users());
  CHECK(loaded.items() == m.items());
  for (const UserId u : m.users()) {
    CHECK(loaded.rated_items(u) == m.rated_items(u));
    for (const ItemId i : m.items()) {
      CHECK(loaded.score(u, i) == m.score(u, i));
    }
  }
}

TEST_CASE("checkpoint loading rejects foreign input") {
  std::istringstream junk("not a checkpoint\n");
  CHECK_THROWS_AS(MFModel::load(junk), DataError);
  std::istringstream truncated("diverank-mf-checkpoint v1\ndimension 4\n");
  CHECK_THROWS_AS(MFModel::load(truncated), DataError);
}
