#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "pmrank/ingest.hpp"
#include "pmrank/types.hpp"

namespace pmrank::test {

inline std::vector<PlayerRef> lineup(const std::string& prefix) {
  std::vector<PlayerRef> players;
  for (int i = 1; i <= 11; ++i) players.push_back({prefix + std::to_string(i), ""});
  return players;
}

inline EventRecord goal(double minute, Side side, const std::string& player) {
  return {minute, side, EventKind::Goal, {player, ""}, std::nullopt};
}

inline EventRecord sub(double minute, Side side, const std::string& off,
                       const std::string& on) {
  return {minute, side, EventKind::Substitution, {off, ""}, PlayerRef{on, ""}};
}

inline EventRecord red(double minute, Side side, const std::string& player) {
  return {minute, side, EventKind::RedCard, {player, ""}, std::nullopt};
}

inline MatchRecord makeMatch(const std::string& id, const std::string& date,
                             std::vector<EventRecord> events,
                             const std::string& league = "L1",
                             const std::string& season = "2016/17",
                             double terminalMinute = 90.0,
                             const std::string& homePrefix = "h",
                             const std::string& awayPrefix = "a") {
  MatchRecord m;
  m.matchId = id;
  m.date = Date::parse(date);
  m.competitionId = league;
  m.season = season;
  m.homeTeam = homePrefix + "_team";
  m.awayTeam = awayPrefix + "_team";
  m.homeLineup = lineup(homePrefix);
  m.awayLineup = lineup(awayPrefix);
  m.events = std::move(events);
  m.terminalMinute = terminalMinute;
  return m;
}

inline ParseResult<MatchRecord> parseMatchesText(const std::string& text,
                                                 const ParseOptions& opts = {}) {
  std::istringstream in(text);
  return parseMatches(in, opts);
}

inline ParseResult<ShotRecord> parseShotsText(const std::string& text,
                                              const std::vector<MatchRecord>& matches,
                                              const ParseOptions& opts = {}) {
  std::istringstream in(text);
  return parseShots(in, matches, opts);
}

}  // namespace pmrank::test
