#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "diverank/metrics.hpp"
#include "diverank/sudden_death.hpp"

using namespace diverank;

namespace {

RankedList list_for(UserId user, std::vector<ItemId> items) {
  RankedList l;
  l.user = user;
  l.items = std::move(items);
  return l;
}

RunSet two_alg_runs() {
  // User 1: A hits at 2, B at 3. User 2: both hit at 1.
  RunSet rs;
  rs.algorithms = {"A", "B"};
  rs.users = {1, 2};
  rs.n = 3;
  rs.lists[1] = {list_for(1, {10, 11, 12}), list_for(1, {13, 10, 11})};
  rs.lists[2] = {list_for(2, {20, 21, 22}), list_for(2, {20, 22, 21})};
  rs.judgments.relevant[1] = {11};
  rs.judgments.relevant[2] = {20};
  return rs;
}

// Random roster of lists over `item_count` items, judged independently.
RunSet random_runs(Rng& rng, std::size_t n_algs, std::size_t n_users,
                   std::size_t n, std::size_t item_count, double rel_p) {
  RunSet rs;
  for (std::size_t a = 0; a < n_algs; ++a) {
    rs.algorithms.push_back("alg" + std::to_string(a));
  }
  rs.n = n;
  std::vector<ItemId> universe;
  for (ItemId i = 1; i <= item_count; ++i) universe.push_back(i);
  for (UserId u = 1; u <= n_users; ++u) {
    rs.users.push_back(u);
    std::vector<RankedList>& lists = rs.lists[u];
    for (std::size_t a = 0; a < n_algs; ++a) {
      std::vector<ItemId> order = universe;
      rng.shuffle(order);
      order.resize(n);
      lists.push_back(list_for(u, std::move(order)));
    }
    std::unordered_set<ItemId> rel;
    for (const ItemId i : universe) {
      if (rng.next_double() < rel_p) rel.insert(i);
    }
    if (!rel.empty()) rs.judgments.relevant[u] = std::move(rel);
  }
  return rs;
}

}  // namespace

TEST_CASE("prefix hits report the first relevant position") {
  const RunSet rs = two_alg_runs();
  CHECK(first_hit(rs.lists.at(1)[0], rs.judgments.for_user(1), 3) == 2);
  CHECK(first_hit(rs.lists.at(1)[0], rs.judgments.for_user(1), 1) == 0);
  CHECK(first_hit(rs.lists.at(1)[0], {}, 3) == 0);

  CHECK_FALSE(hit(1, 1, 0, rs));
  CHECK(hit(2, 1, 0, rs));
  CHECK(hit(3, 1, 0, rs));
  CHECK_FALSE(hit(2, 1, 1, rs));
  CHECK(hit(3, 1, 1, rs));
  CHECK_THROWS_AS(hit(0, 1, 0, rs), PositionOutOfRange);
  CHECK_THROWS_AS(hit(4, 1, 0, rs), PositionOutOfRange);
}

TEST_CASE("each round awards the earliest hit, ties share") {
  RunSet rs = two_alg_runs();
  CHECK(sd_user(1, rs) == std::vector<int>{1, 0});
  CHECK(sd_user(2, rs) == std::vector<int>{1, 1});

  // Nobody hits: no award.
  rs.judgments.relevant[1] = {999};
  CHECK(sd_user(1, rs) == std::vector<int>{0, 0});
}

TEST_CASE("a hit exactly at the cutoff still counts") {
  RunSet rs;
  rs.algorithms = {"A", "B"};
  rs.users = {1};
  rs.n = 3;
  rs.lists[1] = {list_for(1, {10, 11, 12}), list_for(1, {13, 14, 15})};
  rs.judgments.relevant[1] = {12};
  CHECK(sd_user(1, rs) == std::vector<int>{1, 0});

  // One position tighter and the hit vanishes.
  rs.n = 2;
  rs.lists[1][0].items.resize(2);
  rs.lists[1][1].items.resize(2);
  CHECK(sd_user(1, rs) == std::vector<int>{0, 0});
}

TEST_CASE("scores average the per-user awards") {
  const RunSet rs = two_alg_runs();
  const SDReport report = sd_scores(rs);
  CHECK(report.algorithms == rs.algorithms);
  CHECK(report.n == 3);
  CHECK(report.scores == std::vector<double>{1.0, 0.5});
  CHECK(report.awards[0] == std::vector<int>{1, 0});
  CHECK(report.awards[1] == std::vector<int>{1, 1});
  CHECK(report.earliest_hit == std::vector<std::size_t>{2, 1});
}

TEST_CASE("run sets are validated before scoring") {
  RunSet rs = two_alg_runs();
  rs.algorithms.clear();
  CHECK_THROWS_AS(sd_scores(rs), InvalidConfig);

  rs = two_alg_runs();
  rs.n = 0;
  CHECK_THROWS_AS(sd_scores(rs), InvalidConfig);

  rs = two_alg_runs();
  rs.users.clear();
  CHECK_THROWS_AS(sd_scores(rs), EmptyUserSet);

  rs = two_alg_runs();
  rs.lists.erase(1);
  CHECK_THROWS_AS(sd_scores(rs), DataError);

  rs = two_alg_runs();
  rs.lists[1].pop_back();
  CHECK_THROWS_AS(sd_scores(rs), DataError);

  rs = two_alg_runs();
  rs.lists[1][0].items.push_back(99);  // now longer than n
  CHECK_THROWS_AS(sd_scores(rs), DataError);
}

TEST_CASE("a single-algorithm roster scores its hit rate") {
  Rng rng(3);
  const RunSet rs = random_runs(rng, 1, 400, 10, 40, 0.1);
  const SDReport report = sd_scores(rs);
  double calls = 0.0;
  for (const UserId u : rs.users) {
    calls += one_call(rs.lists.at(u)[0], rs.judgments.for_user(u));
  }
  CHECK(std::fabs(report.scores[0] - calls / 400.0) <= 1e-12);
}

TEST_CASE("scores stay within the hit-rate envelope") {
  Rng rng(17);
  const RunSet rs = random_runs(rng, 4, 200, 8, 30, 0.12);
  const SDReport report = sd_scores(rs);
  for (std::size_t a = 0; a < rs.algorithms.size(); ++a) {
    double calls = 0.0;
    for (const UserId u : rs.users) {
      calls += one_call(rs.lists.at(u)[a], rs.judgments.for_user(u));
    }
    CHECK(report.scores[a] >= 0.0);
    CHECK(report.scores[a] <= calls / 200.0 + 1e-12);
  }
}

TEST_CASE("adding a rival never raises an incumbent's score") {
  Rng rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const RunSet full = random_runs(rng, 5, 60, 6, 25, 0.15);
    std::vector<double> previous;
    for (std::size_t roster = 1; roster <= 5; ++roster) {
      RunSet part;
      part.n = full.n;
      part.users = full.users;
      part.judgments = full.judgments;
      part.algorithms.assign(full.algorithms.begin(),
                             full.algorithms.begin() + roster);
      for (const UserId u : part.users) {
        part.lists[u].assign(full.lists.at(u).begin(),
                             full.lists.at(u).begin() + roster);
      }
      const SDReport report = sd_scores(part);
      for (std::size_t a = 0; a + 1 < roster; ++a) {
        CHECK(report.scores[a] <= previous[a] + 1e-12);
      }
      previous = report.scores;
    }
  }
}

TEST_CASE("per-user awards are consistent with the prefix-hit predicate") {
  Rng rng(31);
  const RunSet rs = random_runs(rng, 3, 50, 5, 20, 0.2);
  const SDReport report = sd_scores(rs);
  for (std::size_t ui = 0; ui < rs.users.size(); ++ui) {
    const UserId u = rs.users[ui];
    const std::size_t earliest = report.earliest_hit[ui];
    for (std::size_t a = 0; a < rs.algorithms.size(); ++a) {
      if (report.awards[ui][a] == 1) {
        REQUIRE(earliest >= 1);
        CHECK(hit(earliest, u, a, rs));
        if (earliest > 1) CHECK_FALSE(hit(earliest - 1, u, a, rs));
      } else if (earliest >= 1) {
        CHECK_FALSE(hit(earliest, u, a, rs));
      }
    }
  }
}
