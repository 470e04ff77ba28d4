#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "pmrank/segmentation.hpp"

using namespace pmrank;
using namespace pmrank::test;

namespace {

void addSeasonTo(AdaptationLedger& ledger, const std::string& id, const std::string& league,
                 const Date& matchDate) {
  for (int i = 0; i < 6; ++i) {
    ledger.addAppearance(id, matchDate.addDays(-7 * (i + 1)), league, "2016/17");
  }
}

}  // namespace

TEST_CASE("match with no changes is a single segment") {
  auto segments = buildSegments(makeMatch("m", "2016-08-13", {goal(10, Side::Home, "h9")}));
  REQUIRE(segments.size() == 1);
  CHECK(segments[0].startMinute == 0.0);
  CHECK(segments[0].endMinute == 90.0);
  CHECK(segments[0].goalsHome == 1);
  CHECK(segments[0].homeOnPitch.size() == 11);
}

TEST_CASE("substitutions at 60 and 75 create three segments") {
  auto segments = buildSegments(makeMatch(
      "m", "2016-08-13",
      {sub(60, Side::Home, "h7", "h12"), sub(75, Side::Away, "a7", "a12")}));
  REQUIRE(segments.size() == 3);
  CHECK(segments[0].endMinute == 60.0);
  CHECK(segments[1].startMinute == 60.0);
  CHECK(segments[1].endMinute == 75.0);
  CHECK(segments[2].startMinute == 75.0);
  CHECK(segments[2].endMinute == 90.0);
  // The incoming player is on the pitch from the boundary on.
  auto& mid = segments[1].homeOnPitch;
  CHECK(std::find(mid.begin(), mid.end(), "h12") != mid.end());
  CHECK(std::find(mid.begin(), mid.end(), "h7") == mid.end());
}

TEST_CASE("red card and substitution at the same minute merge into one boundary") {
  auto segments = buildSegments(makeMatch(
      "m", "2016-08-13",
      {red(80, Side::Home, "h3"), sub(80, Side::Away, "a5", "a12")}));
  REQUIRE(segments.size() == 2);
  CHECK(segments[1].startMinute == 80.0);
  CHECK(segments[1].homeOnPitch.size() == 10);  // red card applied
  CHECK(segments[1].redsAtStart == std::pair<int, int>{1, 0});
  auto& away = segments[1].awayOnPitch;
  CHECK(std::find(away.begin(), away.end(), "a12") != away.end());
  CHECK(segments[1].dismissal[0] == 1);
}

TEST_CASE("goal at a boundary belongs to the earlier segment") {
  auto segments = buildSegments(makeMatch(
      "m", "2016-08-13", {goal(60, Side::Home, "h9"), sub(60, Side::Away, "a7", "a12")}));
  REQUIRE(segments.size() == 2);
  CHECK(segments[0].goalsHome == 1);
  CHECK(segments[1].goalsHome == 0);
  CHECK(segments[1].scoreAtStart == std::pair<int, int>{1, 0});
}

TEST_CASE("segment partition and goal-sum invariants on random matches") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<EventRecord> events;
    const double terminal = 90.0 + (rng() % 60) / 10.0;
    const int n = static_cast<int>(rng() % 8);
    int homeSubs = 0;
    int reds = 0;
    int goals = 0;
    for (int i = 0; i < n; ++i) {
      const double minute = std::round((rng() % 9000) / 100.0 * 10.0) / 10.0;
      switch (rng() % 3) {
        case 0:
          events.push_back(goal(minute, rng() % 2 ? Side::Home : Side::Away,
                                rng() % 2 ? "h9" : "a9"));
          ++goals;
          break;
        case 1:
          if (homeSubs < 3) {
            events.push_back(sub(minute, Side::Home, "h" + std::to_string(1 + homeSubs),
                                 "h" + std::to_string(12 + homeSubs)));
            ++homeSubs;
          }
          break;
        default:
          if (reds < 2) {
            events.push_back(red(minute, Side::Away, "a" + std::to_string(1 + reds)));
            ++reds;
          }
          break;
      }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.minute < b.minute; });
    MatchRecord match = makeMatch("m", "2016-08-13", events, "L1", "2016/17", terminal);
    auto segments = buildSegments(match);

    double total = 0.0;
    int goalsHome = 0;
    int goalsAway = 0;
    for (std::size_t k = 0; k < segments.size(); ++k) {
      const Segment& seg = segments[k];
      CHECK(seg.durationMin() > 0.0);
      total += seg.durationMin();
      goalsHome += seg.goalsHome;
      goalsAway += seg.goalsAway;
      // Lineup reconstruction: 11 minus reds so far per side.
      CHECK(seg.homeOnPitch.size() == 11 - static_cast<std::size_t>(seg.redsAtStart.first));
      CHECK(seg.awayOnPitch.size() == 11 - static_cast<std::size_t>(seg.redsAtStart.second));
      if (k > 0) CHECK(seg.startMinute == segments[k - 1].endMinute);
    }
    CHECK(total == doctest::Approx(terminal).epsilon(1e-12));
    const auto [h, a] = match.finalScore();
    CHECK(goalsHome == h);
    CHECK(goalsAway == a);
  }
}

TEST_CASE("dismissal dummies") {
  CHECK(dismissalDummies(0, 0) == Eigen::Vector3i(0, 0, 0));
  CHECK(dismissalDummies(1, 0) == Eigen::Vector3i(1, 0, 0));
  CHECK(dismissalDummies(1, 1) == Eigen::Vector3i(0, 0, 0));
  CHECK(dismissalDummies(0, 2) == Eigen::Vector3i(-1, -1, 0));
  CHECK(dismissalDummies(4, 0) == Eigen::Vector3i(1, 1, 1));

  // Antisymmetry over the full count range.
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; b <= 4; ++b) {
      CHECK(dismissalDummies(a, b) == (-dismissalDummies(b, a)).eval());
    }
  }
}

TEST_CASE("segment weight") {
  const Date rating = Date::parse("2017-06-30");
  CHECK(segmentWeight(Date::parse("2015-01-01"), rating, 0.0) == 1.0);
  CHECK(segmentWeight(rating, rating, 0.002) == 1.0);

  const Date seg = rating.addDays(-700);
  CHECK(segmentWeight(seg, rating, 0.002) ==
        doctest::Approx(std::exp(-0.4)).epsilon(1e-12));

  CHECK_THROWS_AS(segmentWeight(rating.addDays(1), rating, 0.002), FutureSegment);

  SUBCASE("monotone in distance and zeta; depends only on the product") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
      const long d1 = static_cast<long>(rng() % 2000);
      const long d2 = d1 + 1 + static_cast<long>(rng() % 500);
      const double z1 = (rng() % 1000) / 100000.0;
      const double z2 = z1 + 0.001;
      CHECK(segmentWeight(rating.addDays(-d2), rating, z1) <=
            segmentWeight(rating.addDays(-d1), rating, z1));
      CHECK(segmentWeight(rating.addDays(-d1), rating, z2) <=
            segmentWeight(rating.addDays(-d1), rating, z1));
      CHECK(segmentWeight(rating.addDays(-2 * d1), rating, z1) ==
            doctest::Approx(segmentWeight(rating.addDays(-d1), rating, 2 * z1))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("adaptation status") {
  AdaptationLedger ledger;
  const Date match = Date::parse("2017-03-01");

  SUBCASE("six games this season adapt") {
    for (int i = 0; i < 6; ++i) {
      ledger.addAppearance("p", match.addDays(-7 * (i + 1)), "L", "2016/17");
    }
    CHECK(adaptationStatus(ledger, "p", match, "2016/17", "L"));
    CHECK_FALSE(adaptationStatus(ledger, "p", match, "2016/17", "M"));
  }

  SUBCASE("five games this season do not reach the season rule but win 18 months") {
    for (int i = 0; i < 5; ++i) {
      ledger.addAppearance("p", match.addDays(-7 * (i + 1)), "L", "2016/17");
    }
    CHECK(adaptationStatus(ledger, "p", match, "2016/17", "L"));  // 5 > 0 elsewhere
  }

  SUBCASE("zero games anywhere adapt to nothing") {
    ledger.addAppearance("p", match, "L", "2016/17");  // appearance on match day only
    CHECK_FALSE(adaptationStatus(ledger, "p", match, "2016/17", "L"));
    CHECK_FALSE(adaptationStatus(ledger, "p", match, "2016/17", "M"));
  }

  SUBCASE("an 18-month tie adapts to neither league") {
    for (int i = 0; i < 3; ++i) {
      ledger.addAppearance("p", match.addDays(-30 * (i + 1)), "L", "2016/17");
      ledger.addAppearance("p", match.addDays(-30 * (i + 1) - 7), "M", "2016/17");
    }
    CHECK_FALSE(adaptationStatus(ledger, "p", match, "2016/17", "L"));
    CHECK_FALSE(adaptationStatus(ledger, "p", match, "2016/17", "M"));
  }

  SUBCASE("games beyond 18 months do not count") {
    for (int i = 0; i < 10; ++i) {
      ledger.addAppearance("p", match.addMonths(-19).addDays(-i), "L", "2015/16");
    }
    ledger.addAppearance("p", match.addDays(-10), "M", "2016/17");
    CHECK_FALSE(adaptationStatus(ledger, "p", match, "2016/17", "L"));
    CHECK(adaptationStatus(ledger, "p", match, "2016/17", "M"));
  }

  SUBCASE("unknown player throws") {
    CHECK_THROWS_AS(adaptationStatus(ledger, "ghost", match, "2016/17", "L"), UnknownPlayer);
  }
}

TEST_CASE("league balance") {
  MatchRecord match = makeMatch("m", "2017-03-01", {});
  AdaptationLedger ledger;
  // Everyone has 6 prior games in L1 this season.
  auto addSeason = [&](const std::string& id, const std::string& league) {
    for (int i = 0; i < 6; ++i) {
      ledger.addAppearance(id, match.date.addDays(-7 * (i + 1)), league, "2016/17");
    }
  };
  for (const auto& p : match.homeLineup) addSeason(p.playerId, "L1");
  for (const auto& p : match.awayLineup) addSeason(p.playerId, "L1");

  auto segments = buildSegments(match);
  REQUIRE(segments.size() == 1);

  SUBCASE("all adapted to the segment's own league balances to zero") {
    auto m = leagueBalance(segments[0], match, ledger, {"L1", "F"});
    CHECK(m[0] == 0.0);
    CHECK(m[1] == 0.0);
  }

  SUBCASE("a home player adapted to a foreign league shifts that column") {
    // h1 moves: strictly more games in F than L1 over 18 months, none this season in L1.
    AdaptationLedger moved;
    for (const auto& p : match.homeLineup) {
      if (p.playerId != "h1") addSeasonTo(moved, p.playerId, "L1", match.date);
    }
    for (const auto& p : match.awayLineup) addSeasonTo(moved, p.playerId, "L1", match.date);
    for (int i = 0; i < 8; ++i) {
      moved.addAppearance("h1", match.date.addDays(-30 * (i + 1)), "F", "2016/17");
    }
    auto m = leagueBalance(segments[0], match, moved, {"L1", "F"});
    CHECK(m[0] == -1.0);  // ten home vs eleven away adapted to L1
    CHECK(m[1] == 1.0);
  }
}

TEST_CASE("two adapted sides of unequal size") {
  // Nine away players adapted to L1, eleven home ones.
  MatchRecord match = makeMatch("m", "2017-03-01", {});
  AdaptationLedger ledger;
  auto addSeason = [&](const std::string& id) {
    for (int i = 0; i < 6; ++i) {
      ledger.addAppearance(id, match.date.addDays(-7 * (i + 1)), "L1", "2016/17");
    }
  };
  for (const auto& p : match.homeLineup) addSeason(p.playerId);
  for (std::size_t i = 0; i < match.awayLineup.size(); ++i) {
    if (i < 9) {
      addSeason(match.awayLineup[i].playerId);
    } else {
      ledger.addAppearance(match.awayLineup[i].playerId, match.date, "L1", "2016/17");
    }
  }
  auto segments = buildSegments(match);
  auto m = leagueBalance(segments[0], match, ledger, {"L1"});
  CHECK(m[0] == 2.0);
}

TEST_CASE("basic and net plus-minus") {
  // Two appearances: 60 minutes conceding once, 30 minutes scoring twice.
  const std::vector<Appearance> on = {{60.0, 0, 1}, {30.0, 2, 0}};
  CHECK(basicPM(on) == doctest::Approx(4.5).epsilon(1e-12));

  const std::vector<Appearance> flat = {{90.0, 0, 0}};
  CHECK(basicPM(flat) == 0.0);

  const std::vector<Appearance> half = {{45.0, 1, 0}};
  CHECK(basicPM(half) == doctest::Approx(2.0).epsilon(1e-12));

  // The matching off-pitch record gives net zero.
  const std::vector<Appearance> off = {{30.0, 0, 0}, {60.0, 3, 0}};
  CHECK(basicPM(off) == doctest::Approx(4.5).epsilon(1e-12));
  CHECK(netPM(on, off) == doctest::Approx(0.0).epsilon(1e-12));

  CHECK(netPM(on, on) == 0.0);

  const std::vector<Appearance> on2 = {{90.0, 2, 0}};
  const std::vector<Appearance> off2 = {{90.0, 0, 1}};
  CHECK(netPM(on2, off2) == doctest::Approx(3.0).epsilon(1e-12));

  CHECK_THROWS_AS(basicPM(std::vector<Appearance>{{0.0, 1, 0}}), ZeroMinutes);
  CHECK_THROWS_AS(basicPM(std::vector<Appearance>{}), ZeroMinutes);
}

TEST_CASE("observations carry exact per-90 goal targets") {
  Dataset data = buildDataset(
      {makeMatch("m", "2016-08-13",
                 {goal(30, Side::Home, "h9"), sub(45, Side::Home, "h7", "h12"),
                  goal(70, Side::Away, "a9")})},
      {});
  auto ledger = AdaptationLedger::fromMatches(data.matches);
  auto observations = buildObservations(data, ledger);
  REQUIRE(observations.size() == 2);
  CHECK(observations[0].yGoals == doctest::Approx(1.0 * 90.0 / 45.0).epsilon(1e-12));
  CHECK(observations[1].yGoals == doctest::Approx(-1.0 * 90.0 / 45.0).epsilon(1e-12));
  CHECK(observations[0].weight == 1.0);
  CHECK(observations[0].mLeague.size() == 1);
}
