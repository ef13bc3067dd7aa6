#pragma once

#include <istream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "diverank/corpus.hpp"
#include "diverank/errors.hpp"
#include "diverank/sudden_death.hpp"

namespace diverank {

// Run file for externally produced recommendations, one row per entry:
//   algorithm,user,rank,item
// Ranks above n are dropped; what remains must form a contiguous 1..m run
// per (algorithm, user) with no repeated items. Roster order is first
// appearance. Judgments arrive separately, schema user,item.
inline RunSet parse_runs_csv(std::istream& in, std::size_t n) {
  if (n == 0) throw InvalidConfig("cutoff n must be positive");
  std::string line;
  std::size_t line_number = 1;
  if (!std::getline(in, line)) {
    throw DataError("runs file: expected header algorithm,user,rank,item");
  }
  detail::strip_cr(line);
  if (line != "algorithm,user,rank,item") {
    throw DataError("runs file: expected header algorithm,user,rank,item");
  }

  RunSet rs;
  rs.n = n;
  std::map<std::string, std::map<UserId, std::map<std::size_t, ItemId>>> runs;
  while (std::getline(in, line)) {
    ++line_number;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_on(line, ",");
    if (fields.size() != 4) {
      throw MalformedLine(line_number, "expected 4 comma-separated fields");
    }
    const std::string alg(fields[0]);
    if (alg.empty()) throw MalformedLine(line_number, "empty algorithm name");
    if (alg.find('|') != std::string::npos) {
      throw MalformedLine(line_number, "algorithm names may not contain '|'");
    }
    const UserId user = detail::parse_int<UserId>(fields[1], line_number, "user");
    const std::size_t rank =
        detail::parse_int<std::size_t>(fields[2], line_number, "rank");
    const ItemId item = detail::parse_int<ItemId>(fields[3], line_number, "item");
    if (user == 0) throw MalformedLine(line_number, "user ids start at 1");
    if (rank == 0) throw MalformedLine(line_number, "ranks start at 1");
    if (item == 0) throw MalformedLine(line_number, "item ids start at 1");
    if (runs.find(alg) == runs.end()) rs.algorithms.push_back(alg);
    auto& by_rank = runs[alg][user];
    if (rank > n) continue;  // past the cutoff; the pair still counts
    if (!by_rank.emplace(rank, item).second) {
      throw DataError("runs file: duplicate rank " + std::to_string(rank) +
                      " for algorithm " + alg + ", user " + std::to_string(user));
    }
  }

  std::set<UserId> seen_users;
  for (const auto& [alg, by_user] : runs) {
    for (const auto& [user, by_rank] : by_user) seen_users.insert(user);
  }
  rs.users.assign(seen_users.begin(), seen_users.end());
  if (rs.users.empty()) throw EmptyUserSet();

  for (const UserId user : rs.users) {
    std::vector<RankedList>& per_alg = rs.lists[user];
    for (const std::string& alg : rs.algorithms) {
      const auto au = runs.find(alg);
      const auto uu = au->second.find(user);
      if (uu == au->second.end()) {
        throw DataError("runs file: no entries for algorithm " + alg +
                        ", user " + std::to_string(user));
      }
      RankedList list;
      list.user = user;
      std::size_t expected = 1;
      for (const auto& [rank, item] : uu->second) {
        if (rank != expected) {
          throw DataError("runs file: ranks for algorithm " + alg + ", user " +
                          std::to_string(user) + " are not contiguous from 1");
        }
        if (list.rank(item) != 0) {
          throw DataError("runs file: item " + std::to_string(item) +
                          " listed twice for algorithm " + alg + ", user " +
                          std::to_string(user));
        }
        list.items.push_back(item);
        ++expected;
      }
      per_alg.push_back(std::move(list));
    }
  }
  return rs;
}

// Judged relevant items, schema user,item; one row per judged-relevant pair.
inline RelevanceJudgments parse_judgments_csv(std::istream& in) {
  std::string line;
  std::size_t line_number = 1;
  if (!std::getline(in, line)) {
    throw DataError("judgments file: expected header user,item");
  }
  detail::strip_cr(line);
  if (line != "user,item") {
    throw DataError("judgments file: expected header user,item");
  }
  RelevanceJudgments out;
  while (std::getline(in, line)) {
    ++line_number;
    detail::strip_cr(line);
    if (line.empty()) continue;
    const auto fields = detail::split_on(line, ",");
    if (fields.size() != 2) {
      throw MalformedLine(line_number, "expected 2 comma-separated fields");
    }
    const UserId user = detail::parse_int<UserId>(fields[0], line_number, "user");
    const ItemId item = detail::parse_int<ItemId>(fields[1], line_number, "item");
    if (user == 0) throw MalformedLine(line_number, "user ids start at 1");
    if (item == 0) throw MalformedLine(line_number, "item ids start at 1");
    out.relevant[user].insert(item);
  }
  return out;
}

}  // namespace diverank
