#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "pmrank/ingest.hpp"

using namespace pmrank;
using namespace pmrank::test;

namespace {

std::string kGoodMatchLine =
    R"({"matchId":"m1","date":"2016-08-13","competitionId":"L1","season":"2016/17",)"
    R"("homeTeam":"H","awayTeam":"A",)"
    R"("homeLineup":["h1","h2","h3","h4","h5","h6","h7","h8","h9","h10","h11"],)"
    R"("awayLineup":["a1","a2","a3","a4","a5","a6","a7","a8","a9","a10","a11"],)"
    R"("terminalMinute":93.5,)"
    R"("events":[{"minute":10.0,"side":"home","kind":"goal","player":"h9"},)"
    R"({"minute":60.0,"side":"away","kind":"substitution","player":"a7","playerOn":"a12"}]})";

}  // namespace

TEST_CASE("empty stream parses to an empty list") {
  auto result = parseMatchesText("");
  CHECK(result.records.empty());
  CHECK(result.errors.empty());
}

TEST_CASE("single match with goal and substitution parses in order") {
  auto result = parseMatchesText(kGoodMatchLine);
  REQUIRE(result.records.size() == 1);
  const MatchRecord& m = result.records[0];
  CHECK(m.matchId == "m1");
  CHECK(m.date.toIso() == "2016-08-13");
  CHECK(m.homeLineup.size() == 11);
  CHECK(m.awayLineup.size() == 11);
  REQUIRE(m.events.size() == 2);
  CHECK((m.events[0].kind == EventKind::Goal));
  CHECK(m.events[0].minute == 10.0);
  CHECK((m.events[1].kind == EventKind::Substitution));
  REQUIRE(m.events[1].playerOn.has_value());
  CHECK(m.events[1].playerOn->playerId == "a12");
  CHECK(m.terminalMinute == 93.5);
}

TEST_CASE("substitution of a player not on the pitch is rejected") {
  std::string line = kGoodMatchLine;
  const auto pos = line.find("\"player\":\"a7\"");
  REQUIRE(pos != std::string::npos);
  line.replace(pos, 13, "\"player\":\"zz\"");
  CHECK_THROWS_AS(parseMatchesText(line), InconsistentLineup);
}

TEST_CASE("substituted-off player cannot be removed twice") {
  std::string events =
      R"([{"minute":50.0,"side":"home","kind":"substitution","player":"h7","playerOn":"h12"},)"
      R"({"minute":60.0,"side":"home","kind":"substitution","player":"h7","playerOn":"h13"}])";
  std::string line = kGoodMatchLine;
  const auto pos = line.find("\"events\":");
  line = line.substr(0, pos) + "\"events\":" + events + "}";
  CHECK_THROWS_AS(parseMatchesText(line), InconsistentLineup);
}

TEST_CASE("red-carded player must be on the pitch") {
  std::string events = R"([{"minute":30.0,"side":"away","kind":"redCard","player":"h1"}])";
  std::string line = kGoodMatchLine;
  const auto pos = line.find("\"events\":");
  line = line.substr(0, pos) + "\"events\":" + events + "}";
  // h1 plays for the home side; an away red card on h1 is inconsistent.
  CHECK_THROWS_AS(parseMatchesText(line), InconsistentLineup);
}

TEST_CASE("malformed JSON identifies the line") {
  const std::string feed = kGoodMatchLine + "\n{not json}\n";
  try {
    parseMatchesText(feed);
    FAIL("expected MalformedLine");
  } catch (const MalformedLine& e) {
    CHECK(e.lineNo == 2);
  }
}

TEST_CASE("lenient mode collects errors and keeps good lines") {
  std::string second = kGoodMatchLine;
  const auto pos = second.find("m1");
  second.replace(pos, 2, "m2");
  const std::string feed = kGoodMatchLine + "\n{broken\n" + second + "\n";
  auto result = parseMatchesText(feed, {.strict = false});
  CHECK(result.records.size() == 2);
  REQUIRE(result.errors.size() == 1);
  CHECK(result.errors[0].lineNo == 2);
}

TEST_CASE("duplicate matchId is rejected") {
  const std::string feed = kGoodMatchLine + "\n" + kGoodMatchLine + "\n";
  CHECK_THROWS_AS(parseMatchesText(feed), SchemaViolation);
}

TEST_CASE("missing required field is a schema violation") {
  std::string line = kGoodMatchLine;
  const auto pos = line.find("\"season\":\"2016/17\",");
  line.erase(pos, std::string("\"season\":\"2016/17\",").size());
  try {
    parseMatchesText(line);
    FAIL("expected SchemaViolation");
  } catch (const SchemaViolation& e) {
    CHECK(e.field == "season");
  }
}

TEST_CASE("unknown fields warn but do not fail") {
  std::string line = kGoodMatchLine;
  line.insert(1, "\"extraField\":1,");
  auto result = parseMatchesText(line);
  CHECK(result.records.size() == 1);
  REQUIRE_FALSE(result.warnings.empty());
  CHECK(result.warnings[0].message.find("extraField") != std::string::npos);
}

TEST_CASE("player appearing on both teams is inconsistent") {
  std::string line = kGoodMatchLine;
  const auto pos = line.find("\"a11\"");
  line.replace(pos, 5, "\"h1\"");
  CHECK_THROWS_AS(parseMatchesText(line), InconsistentLineup);
}

TEST_CASE("events are canonically sorted by minute, ties in feed order") {
  std::string events =
      R"([{"minute":60.0,"side":"home","kind":"goal","player":"h9"},)"
      R"({"minute":10.0,"side":"away","kind":"goal","player":"a9"},)"
      R"({"minute":10.0,"side":"away","kind":"goal","player":"a8"}])";
  std::string line = kGoodMatchLine;
  const auto pos = line.find("\"events\":");
  line = line.substr(0, pos) + "\"events\":" + events + "}";
  auto result = parseMatchesText(line);
  REQUIRE(result.records.size() == 1);
  const auto& evs = result.records[0].events;
  REQUIRE(evs.size() == 3);
  CHECK(evs[0].minute == 10.0);
  CHECK(evs[0].player.playerId == "a9");
  CHECK(evs[1].player.playerId == "a8");
  CHECK(evs[2].minute == 60.0);
}

TEST_CASE("shot parsing validates coordinates and linkage") {
  auto matches = parseMatchesText(kGoodMatchLine).records;

  SUBCASE("coordinate out of range") {
    const std::string shot =
        R"({"matchId":"m1","minute":12.0,"side":"home","shooter":"h9","x":1.05,"y":0.5,)"
        R"("shotType":"openplay","bigChance":false,"outcome":"noGoal"})";
    CHECK_THROWS_AS(parseShotsText(shot, matches), OutOfRangeCoordinate);
  }

  SUBCASE("penalty goal accepted and linked") {
    const std::string shot =
        R"({"matchId":"m1","minute":44.0,"side":"home","shooter":"h9","x":0.895,"y":0.5,)"
        R"("shotType":"penalty","bigChance":true,"outcome":"goal"})";
    auto result = parseShotsText(shot, matches);
    REQUIRE(result.records.size() == 1);
    CHECK((result.records[0].shotType == ShotType::Penalty));
    CHECK(result.records[0].goal);
  }

  SUBCASE("unknown match is rejected") {
    const std::string shot =
        R"({"matchId":"nope","minute":12.0,"side":"home","shooter":"h9","x":0.9,"y":0.5,)"
        R"("shotType":"header","bigChance":false,"outcome":"noGoal"})";
    CHECK_THROWS_AS(parseShotsText(shot, matches), UnknownMatch);
  }

  SUBCASE("gk skills bounds are checked") {
    const std::string shot =
        R"({"matchId":"m1","minute":12.0,"side":"home","shooter":"h9","x":0.9,"y":0.5,)"
        R"("shotType":"header","bigChance":false,"gkSkills":[0.5,0.5,0.5,0.5,1.5],)"
        R"("outcome":"noGoal"})";
    CHECK_THROWS_AS(parseShotsText(shot, matches), OutOfRangeCoordinate);
  }
}

TEST_CASE("synthetic shot feed of known counts parses completely") {
  auto matches = parseMatchesText(kGoodMatchLine).records;
  std::ostringstream feed;
  std::mt19937_64 rng(7);
  const int total = 500;
  int goals = 0;
  for (int i = 0; i < total; ++i) {
    const bool isGoal = (rng() % 10) == 0;
    goals += isGoal ? 1 : 0;
    feed << R"({"matchId":"m1","minute":)" << (i % 90) << R"(,"side":"home","shooter":"h9",)"
         << R"("x":0.9,"y":0.5,"shotType":"openplay","bigChance":false,"outcome":")"
         << (isGoal ? "goal" : "noGoal") << "\"}\n";
  }
  auto result = parseShotsText(feed.str(), matches);
  CHECK(result.records.size() == total);
  long parsedGoals = 0;
  for (const auto& s : result.records) parsedGoals += s.goal ? 1 : 0;
  CHECK(parsedGoals == goals);
}

TEST_CASE("empirical initial frequencies") {
  SUBCASE("all draws") {
    std::vector<MatchRecord> matches;
    for (int i = 0; i < 4; ++i) {
      matches.push_back(makeMatch("d" + std::to_string(i), "2016-01-01", {}));
    }
    auto f = empiricalInitialFreqs(matches, "L1");
    CHECK(f.pHW == 0.0);
    CHECK(f.pD == 1.0);
    CHECK(f.pAW == 0.0);
  }

  SUBCASE("5 home wins, 3 draws, 2 away wins") {
    std::vector<MatchRecord> matches;
    int n = 0;
    for (int i = 0; i < 5; ++i) {
      matches.push_back(makeMatch("h" + std::to_string(n++), "2016-01-01",
                                  {goal(10, Side::Home, "h9")}));
    }
    for (int i = 0; i < 3; ++i) {
      matches.push_back(makeMatch("d" + std::to_string(n++), "2016-01-01", {}));
    }
    for (int i = 0; i < 2; ++i) {
      matches.push_back(makeMatch("a" + std::to_string(n++), "2016-01-01",
                                  {goal(80, Side::Away, "a9")}));
    }
    auto f = empiricalInitialFreqs(matches, "L1");
    CHECK(f.pHW == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f.pD == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(f.pAW == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(f.pHW + f.pD + f.pAW == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("empty league throws") {
    std::vector<MatchRecord> matches{makeMatch("x", "2016-01-01", {})};
    CHECK_THROWS_AS(empiricalInitialFreqs(matches, "L9"), EmptyLeague);
  }
}

TEST_CASE("round trip: serialize(parse(feed)) is canonical and stable") {
  // Random feeds with names, gk skills and stoppage-time minutes.
  std::mt19937_64 rng(11);
  auto randomMinute = [&](double terminal) {
    return std::floor((static_cast<double>(rng() % 1000) / 1000.0 * terminal) * 10.0) / 10.0;
  };
  std::ostringstream feed;
  for (int i = 0; i < 20; ++i) {
    MatchRecord m = makeMatch("m" + std::to_string(i), "2016-08-13", {}, "L1", "2016/17",
                              90.0 + (rng() % 80) / 10.0);
    if (rng() % 2) m.homeLineup[3].displayName = "Player Three";
    std::vector<EventRecord> events;
    const int nEvents = static_cast<int>(rng() % 5);
    for (int e = 0; e < nEvents; ++e) {
      const double minute = randomMinute(m.terminalMinute);
      switch (rng() % 3) {
        case 0:
          events.push_back(goal(minute, rng() % 2 ? Side::Home : Side::Away, "h9"));
          break;
        case 1:
          events.push_back(sub(minute, Side::Home, "h" + std::to_string(1 + e),
                               "h" + std::to_string(20 + e)));
          break;
        default:
          events.push_back(goal(minute, Side::Away, "a9"));
          break;
      }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.minute < b.minute; });
    m.events = std::move(events);
    feed << serializeMatch(m) << '\n';
  }

  auto first = parseMatchesText(feed.str());
  REQUIRE(first.errors.empty());
  std::ostringstream out;
  writeMatchesJsonl(out, first.records);
  auto second = parseMatchesText(out.str());
  REQUIRE(second.records.size() == first.records.size());
  std::ostringstream out2;
  writeMatchesJsonl(out2, second.records);
  CHECK(out.str() == out2.str());
}

TEST_CASE("buildDataset links shots, enumerates leagues, computes freqs") {
  std::vector<MatchRecord> matches;
  matches.push_back(makeMatch("m1", "2016-08-13", {goal(10, Side::Home, "h9")}, "EPL"));
  matches.push_back(makeMatch("m2", "2016-08-14", {}, "LIGA"));
  std::vector<ShotRecord> shots;
  ShotRecord s;
  s.matchId = "m1";
  s.minute = 10.0;
  s.side = Side::Home;
  s.shooter = {"h9", ""};
  s.x = 0.9;
  s.y = 0.5;
  s.shotType = ShotType::Openplay;
  s.goal = true;
  shots.push_back(s);

  Dataset data = buildDataset(matches, shots);
  CHECK(data.leagues == std::vector<std::string>{"EPL", "LIGA"});
  CHECK(data.initialOutcomeFreqs.at("EPL").pHW == 1.0);
  CHECK(data.initialOutcomeFreqs.at("LIGA").pD == 1.0);
  CHECK(data.match("m1").matchId == "m1");

  s.matchId = "zzz";
  shots.push_back(s);
  CHECK_THROWS_AS(buildDataset(matches, shots), Error);
}
