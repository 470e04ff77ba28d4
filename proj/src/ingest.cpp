#include "pmrank/ingest.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

namespace pmrank {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void checkKnownFields(const json& obj, std::size_t lineNo,
                      const std::set<std::string>& known,
                      std::vector<ParseIssue>& warnings) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) {
      warnings.push_back({lineNo, "ignoring unknown field '" + key + "'"});
    }
  }
}

// `key` is the JSON member name; `label`, when given, is the dotted path
// used in error messages for nested objects.
const json& field(const json& obj, std::size_t lineNo, const char* key,
                  const std::string& label = {}) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw SchemaViolation(lineNo, label.empty() ? key : label, "missing");
  }
  return *it;
}

std::string stringField(const json& obj, std::size_t lineNo, const char* key,
                        const std::string& label = {}) {
  const json& v = field(obj, lineNo, key, label);
  if (!v.is_string()) {
    throw SchemaViolation(lineNo, label.empty() ? key : label, "expected string");
  }
  return v.get<std::string>();
}

double numberField(const json& obj, std::size_t lineNo, const char* key,
                   const std::string& label = {}) {
  const json& v = field(obj, lineNo, key, label);
  if (!v.is_number()) {
    throw SchemaViolation(lineNo, label.empty() ? key : label, "expected number");
  }
  return v.get<double>();
}

Side sideField(const json& obj, std::size_t lineNo, const char* key,
               const std::string& label = {}) {
  const std::string s = stringField(obj, lineNo, key, label);
  if (s == "home") return Side::Home;
  if (s == "away") return Side::Away;
  throw SchemaViolation(lineNo, label.empty() ? key : label,
                        "expected 'home' or 'away', got '" + s + "'");
}

PlayerRef playerFromJson(const json& v, std::size_t lineNo, const std::string& field) {
  PlayerRef p;
  if (v.is_string()) {
    p.playerId = v.get<std::string>();
  } else if (v.is_object()) {
    auto id = v.find("id");
    if (id == v.end() || !id->is_string()) {
      throw SchemaViolation(lineNo, field, "player object requires string 'id'");
    }
    p.playerId = id->get<std::string>();
    if (auto name = v.find("name"); name != v.end() && name->is_string()) {
      p.displayName = name->get<std::string>();
    }
  } else {
    throw SchemaViolation(lineNo, field, "expected player id or {id, name}");
  }
  if (p.playerId.empty()) throw SchemaViolation(lineNo, field, "empty playerId");
  return p;
}

ordered_json playerToJson(const PlayerRef& p) {
  if (p.displayName.empty()) return p.playerId;
  return ordered_json{{"id", p.playerId}, {"name", p.displayName}};
}

std::vector<PlayerRef> lineupField(const json& obj, std::size_t lineNo, const char* name) {
  const json& v = field(obj, lineNo, name);
  if (!v.is_array() || v.size() != 11) {
    throw SchemaViolation(lineNo, name, "expected array of 11 players");
  }
  std::vector<PlayerRef> out;
  out.reserve(11);
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(playerFromJson(v[i], lineNo, std::string(name) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

MatchRecord matchFromJson(const json& obj, std::size_t lineNo,
                          std::vector<ParseIssue>& warnings) {
  static const std::set<std::string> known = {
      "matchId", "date",       "competitionId", "season", "homeTeam",
      "awayTeam", "homeLineup", "awayLineup",    "events", "terminalMinute"};
  checkKnownFields(obj, lineNo, known, warnings);

  MatchRecord m;
  m.matchId = stringField(obj, lineNo, "matchId");
  if (m.matchId.empty()) throw SchemaViolation(lineNo, "matchId", "empty");
  try {
    m.date = Date::parse(stringField(obj, lineNo, "date"));
  } catch (const SchemaViolation&) {
    throw;
  } catch (const Error& e) {
    throw SchemaViolation(lineNo, "date", e.what());
  }
  m.competitionId = stringField(obj, lineNo, "competitionId");
  m.season = stringField(obj, lineNo, "season");
  m.homeTeam = stringField(obj, lineNo, "homeTeam");
  m.awayTeam = stringField(obj, lineNo, "awayTeam");
  m.homeLineup = lineupField(obj, lineNo, "homeLineup");
  m.awayLineup = lineupField(obj, lineNo, "awayLineup");
  m.terminalMinute = numberField(obj, lineNo, "terminalMinute");
  if (!(m.terminalMinute >= 90.0)) {
    throw SchemaViolation(lineNo, "terminalMinute", "must be >= 90");
  }

  const json& events = field(obj, lineNo, "events");
  if (!events.is_array()) throw SchemaViolation(lineNo, "events", "expected array");
  static const std::set<std::string> knownEvent = {"minute", "side", "kind", "player",
                                                   "playerOn"};
  for (std::size_t i = 0; i < events.size(); ++i) {
    const json& ev = events[i];
    const std::string where = "events[" + std::to_string(i) + "]";
    if (!ev.is_object()) throw SchemaViolation(lineNo, where, "expected object");
    checkKnownFields(ev, lineNo, knownEvent, warnings);

    EventRecord e;
    e.minute = numberField(ev, lineNo, "minute", where + ".minute");
    if (e.minute < 0.0 || e.minute > m.terminalMinute) {
      throw SchemaViolation(lineNo, where + ".minute", "outside [0, terminalMinute]");
    }
    e.side = sideField(ev, lineNo, "side", where + ".side");
    const std::string kind = stringField(ev, lineNo, "kind", where + ".kind");
    if (kind == "goal") {
      e.kind = EventKind::Goal;
    } else if (kind == "substitution") {
      e.kind = EventKind::Substitution;
    } else if (kind == "redCard") {
      e.kind = EventKind::RedCard;
    } else {
      throw SchemaViolation(lineNo, where + ".kind", "unknown kind '" + kind + "'");
    }
    e.player = playerFromJson(field(ev, lineNo, "player", where + ".player"), lineNo,
                              where + ".player");
    const bool hasOn = ev.contains("playerOn");
    if (e.kind == EventKind::Substitution) {
      if (!hasOn) throw SchemaViolation(lineNo, where + ".playerOn", "required for substitution");
      e.playerOn = playerFromJson(ev["playerOn"], lineNo, where + ".playerOn");
    } else if (hasOn) {
      throw SchemaViolation(lineNo, where + ".playerOn", "only valid for substitution");
    }
    m.events.push_back(std::move(e));
  }
  // Canonical event order: by minute, feed order preserved on ties.
  std::stable_sort(m.events.begin(), m.events.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.minute < b.minute; });
  return m;
}

// Replays events against the starting lineups: substituted-off and red-carded
// players must be on the pitch, incoming players must not already be on it.
void validateLineupConsistency(const MatchRecord& m, std::size_t lineNo) {
  auto distinct = [&](const std::vector<PlayerRef>& lineup, const char* side) {
    std::set<std::string> ids;
    for (const auto& p : lineup) {
      if (!ids.insert(p.playerId).second) {
        throw InconsistentLineup(lineNo, m.matchId,
                                 std::string(side) + " lineup repeats player '" + p.playerId + "'");
      }
    }
    return ids;
  };
  std::set<std::string> home = distinct(m.homeLineup, "home");
  std::set<std::string> away = distinct(m.awayLineup, "away");
  for (const auto& id : home) {
    if (away.contains(id)) {
      throw InconsistentLineup(lineNo, m.matchId, "player '" + id + "' appears on both teams");
    }
  }

  for (const auto& e : m.events) {
    std::set<std::string>& pitch = (e.side == Side::Home) ? home : away;
    switch (e.kind) {
      case EventKind::Goal:
        break;
      case EventKind::Substitution: {
        if (!pitch.contains(e.player.playerId)) {
          throw InconsistentLineup(lineNo, m.matchId,
                                   "substituted-off player '" + e.player.playerId +
                                       "' is not on the pitch at minute " +
                                       std::to_string(e.minute));
        }
        if (pitch.contains(e.playerOn->playerId)) {
          throw InconsistentLineup(lineNo, m.matchId,
                                   "incoming player '" + e.playerOn->playerId +
                                       "' is already on the pitch");
        }
        pitch.erase(e.player.playerId);
        pitch.insert(e.playerOn->playerId);
        break;
      }
      case EventKind::RedCard: {
        if (!pitch.contains(e.player.playerId)) {
          throw InconsistentLineup(lineNo, m.matchId,
                                   "red-carded player '" + e.player.playerId +
                                       "' is not on the pitch at minute " +
                                       std::to_string(e.minute));
        }
        pitch.erase(e.player.playerId);
        break;
      }
    }
  }
}

ShotRecord shotFromJson(const json& obj, std::size_t lineNo,
                        const std::map<std::string, double>& terminalByMatch,
                        std::vector<ParseIssue>& warnings) {
  static const std::set<std::string> known = {"matchId", "minute",  "side",
                                              "shooter", "x",       "y",
                                              "shotType", "bigChance", "gkSkills",
                                              "outcome"};
  checkKnownFields(obj, lineNo, known, warnings);

  ShotRecord s;
  s.matchId = stringField(obj, lineNo, "matchId");
  auto term = terminalByMatch.find(s.matchId);
  if (term == terminalByMatch.end()) throw UnknownMatch(lineNo, s.matchId);
  s.minute = numberField(obj, lineNo, "minute");
  if (s.minute < 0.0 || s.minute > term->second) {
    throw SchemaViolation(lineNo, "minute", "outside [0, terminalMinute]");
  }
  s.side = sideField(obj, lineNo, "side");
  s.shooter = playerFromJson(field(obj, lineNo, "shooter"), lineNo, "shooter");
  s.x = numberField(obj, lineNo, "x");
  if (s.x < 0.0 || s.x > 1.0) throw OutOfRangeCoordinate(lineNo, "x", s.x);
  s.y = numberField(obj, lineNo, "y");
  if (s.y < 0.0 || s.y > 1.0) throw OutOfRangeCoordinate(lineNo, "y", s.y);

  const std::string type = stringField(obj, lineNo, "shotType");
  if (type == "penalty") {
    s.shotType = ShotType::Penalty;
  } else if (type == "freekick") {
    s.shotType = ShotType::Freekick;
  } else if (type == "header") {
    s.shotType = ShotType::Header;
  } else if (type == "openplay") {
    s.shotType = ShotType::Openplay;
  } else {
    throw SchemaViolation(lineNo, "shotType", "unknown type '" + type + "'");
  }

  const json& big = field(obj, lineNo, "bigChance");
  if (!big.is_boolean()) throw SchemaViolation(lineNo, "bigChance", "expected boolean");
  s.bigChance = big.get<bool>();

  if (auto it = obj.find("gkSkills"); it != obj.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 5) {
      throw SchemaViolation(lineNo, "gkSkills", "expected array of 5 numbers");
    }
    GkSkills g;
    for (int i = 0; i < 5; ++i) {
      const json& v = (*it)[i];
      if (!v.is_number()) throw SchemaViolation(lineNo, "gkSkills", "expected number");
      g[i] = v.get<double>();
      if (g[i] < 0.0 || g[i] > 1.0) {
        throw OutOfRangeCoordinate(lineNo, "gkSkills[" + std::to_string(i) + "]", g[i]);
      }
    }
    s.gkSkills = g;
  }

  const std::string outcome = stringField(obj, lineNo, "outcome");
  if (outcome == "goal") {
    s.goal = true;
  } else if (outcome == "noGoal") {
    s.goal = false;
  } else {
    throw SchemaViolation(lineNo, "outcome", "expected 'goal' or 'noGoal'");
  }
  return s;
}

// Shared line loop for both feeds. `parseLine` may throw pmrank::Error.
template <typename Record, typename Fn>
ParseResult<Record> parseLines(std::istream& stream, const ParseOptions& opts, Fn&& parseLine) {
  ParseResult<Record> result;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(stream, line)) {
    ++lineNo;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json obj = json::parse(line, nullptr, true);
      if (!obj.is_object()) throw MalformedLine(lineNo, "expected a JSON object");
      result.records.push_back(parseLine(obj, lineNo, result.warnings));
    } catch (const json::parse_error& e) {
      MalformedLine err(lineNo, e.what());
      if (opts.strict) throw err;
      result.errors.push_back({lineNo, err.what()});
    } catch (const Error& e) {
      if (opts.strict) throw;
      result.errors.push_back({lineNo, e.what()});
    }
  }
  return result;
}

}  // namespace

ParseResult<MatchRecord> parseMatches(std::istream& stream, const ParseOptions& opts) {
  std::set<std::string> seen;
  return parseLines<MatchRecord>(
      stream, opts,
      [&seen](const json& obj, std::size_t lineNo, std::vector<ParseIssue>& warnings) {
        MatchRecord m = matchFromJson(obj, lineNo, warnings);
        if (!seen.insert(m.matchId).second) {
          throw SchemaViolation(lineNo, "matchId", "duplicate matchId '" + m.matchId + "'");
        }
        validateLineupConsistency(m, lineNo);
        return m;
      });
}

ParseResult<ShotRecord> parseShots(std::istream& stream,
                                   const std::vector<MatchRecord>& matches,
                                   const ParseOptions& opts) {
  std::map<std::string, double> terminalByMatch;
  for (const auto& m : matches) terminalByMatch.emplace(m.matchId, m.terminalMinute);
  return parseLines<ShotRecord>(
      stream, opts,
      [&terminalByMatch](const json& obj, std::size_t lineNo, std::vector<ParseIssue>& warnings) {
        return shotFromJson(obj, lineNo, terminalByMatch, warnings);
      });
}

std::string serializeMatch(const MatchRecord& m) {
  ordered_json obj;
  obj["matchId"] = m.matchId;
  obj["date"] = m.date.toIso();
  obj["competitionId"] = m.competitionId;
  obj["season"] = m.season;
  obj["homeTeam"] = m.homeTeam;
  obj["awayTeam"] = m.awayTeam;
  auto lineup = [](const std::vector<PlayerRef>& players) {
    ordered_json arr = ordered_json::array();
    for (const auto& p : players) arr.push_back(playerToJson(p));
    return arr;
  };
  obj["homeLineup"] = lineup(m.homeLineup);
  obj["awayLineup"] = lineup(m.awayLineup);
  obj["terminalMinute"] = m.terminalMinute;
  ordered_json events = ordered_json::array();
  for (const auto& e : m.events) {
    ordered_json ev;
    ev["minute"] = e.minute;
    ev["side"] = toString(e.side);
    ev["kind"] = toString(e.kind);
    ev["player"] = playerToJson(e.player);
    if (e.playerOn) ev["playerOn"] = playerToJson(*e.playerOn);
    events.push_back(std::move(ev));
  }
  obj["events"] = std::move(events);
  return obj.dump();
}

std::string serializeShot(const ShotRecord& s) {
  ordered_json obj;
  obj["matchId"] = s.matchId;
  obj["minute"] = s.minute;
  obj["side"] = toString(s.side);
  obj["shooter"] = playerToJson(s.shooter);
  obj["x"] = s.x;
  obj["y"] = s.y;
  obj["shotType"] = toString(s.shotType);
  obj["bigChance"] = s.bigChance;
  if (s.gkSkills) {
    ordered_json arr = ordered_json::array();
    for (int i = 0; i < 5; ++i) arr.push_back((*s.gkSkills)[i]);
    obj["gkSkills"] = std::move(arr);
  }
  obj["outcome"] = s.goal ? "goal" : "noGoal";
  return obj.dump();
}

void writeMatchesJsonl(std::ostream& out, const std::vector<MatchRecord>& matches) {
  for (const auto& m : matches) out << serializeMatch(m) << '\n';
}

void writeShotsJsonl(std::ostream& out, const std::vector<ShotRecord>& shots) {
  for (const auto& s : shots) out << serializeShot(s) << '\n';
}

InitialFreqs empiricalInitialFreqs(const std::vector<MatchRecord>& matches,
                                   const std::string& league) {
  long hw = 0;
  long d = 0;
  long aw = 0;
  for (const auto& m : matches) {
    if (m.competitionId != league) continue;
    auto [home, away] = m.finalScore();
    if (home > away) {
      ++hw;
    } else if (home == away) {
      ++d;
    } else {
      ++aw;
    }
  }
  const long total = hw + d + aw;
  if (total == 0) throw EmptyLeague(league);
  const double n = static_cast<double>(total);
  return {hw / n, d / n, aw / n};
}

Dataset buildDataset(std::vector<MatchRecord> matches, std::vector<ShotRecord> shots) {
  Dataset data;
  data.matches = std::move(matches);
  data.shots = std::move(shots);
  for (std::size_t i = 0; i < data.matches.size(); ++i) {
    const MatchRecord& m = data.matches[i];
    if (!data.matchIndex.emplace(m.matchId, i).second) {
      throw Error("duplicate matchId '" + m.matchId + "' in dataset");
    }
    if (std::find(data.leagues.begin(), data.leagues.end(), m.competitionId) ==
        data.leagues.end()) {
      data.leagues.push_back(m.competitionId);
    }
  }
  for (const auto& s : data.shots) {
    if (!data.matchIndex.contains(s.matchId)) {
      throw Error("shot references unknown matchId '" + s.matchId + "'");
    }
  }
  for (const auto& league : data.leagues) {
    data.initialOutcomeFreqs[league] = empiricalInitialFreqs(data.matches, league);
  }
  return data;
}

}  // namespace pmrank
