#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace pmrank::test {

namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double gaussian(std::mt19937_64& rng) {
  // Box-Muller keeps the draw sequence identical across standard libraries.
  const double u1 = std::max(uniform01(rng), 1e-12);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

int blockOf(const std::vector<double>& edges, double t) {
  for (int b = static_cast<int>(edges.size()) - 2; b >= 0; --b) {
    if (t >= edges[b]) return b;
  }
  return 0;
}

}  // namespace

std::vector<MatchRecord> generateHazardCorpus(const HazardCorpusSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<MatchRecord> matches;
  matches.reserve(spec.nMatches);

  for (int m = 0; m < spec.nMatches; ++m) {
    const double homeRed =
        uniform01(rng) < spec.redProbPerSide ? 10.0 + 70.0 * uniform01(rng) : -1.0;
    const double awayRed =
        uniform01(rng) < spec.redProbPerSide ? 10.0 + 70.0 * uniform01(rng) : -1.0;

    std::set<double> cuts;
    for (double e : spec.blockEdges) {
      if (e > 0.0 && e < spec.terminal) cuts.insert(e);
    }
    if (homeRed > 0.0) cuts.insert(homeRed);
    if (awayRed > 0.0) cuts.insert(awayRed);
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), cuts.begin(), cuts.end());
    edges.push_back(spec.terminal);

    std::vector<EventRecord> events;
    if (homeRed > 0.0) {
      events.push_back({homeRed, Side::Home, EventKind::RedCard, {"h2", ""}, std::nullopt});
    }
    if (awayRed > 0.0) {
      events.push_back({awayRed, Side::Away, EventKind::RedCard, {"a2", ""}, std::nullopt});
    }

    for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
      double t = edges[k];
      const double end = edges[k + 1];
      const int mp = (awayRed > 0.0 && awayRed <= t ? 1 : 0) -
                     (homeRed > 0.0 && homeRed <= t ? 1 : 0);
      const int block = blockOf(spec.blockEdges, t);
      double rateH = spec.homeRates[block];
      double rateA = spec.awayRates[block];
      if (mp > 0) rateH *= spec.mpUplift;
      if (mp < 0) rateA *= spec.mpUplift;
      const double total = rateH + rateA;
      if (total <= 0.0) continue;
      while (true) {
        t += -std::log1p(-uniform01(rng)) / total;
        if (t >= end) break;
        const Side side = uniform01(rng) * total < rateH ? Side::Home : Side::Away;
        events.push_back({t, side, EventKind::Goal,
                          {side == Side::Home ? "h9" : "a9", ""},
                          std::nullopt});
      }
    }
    std::stable_sort(events.begin(), events.end(),
                     [](const EventRecord& a, const EventRecord& b) { return a.minute < b.minute; });

    MatchRecord match;
    match.matchId = "hz" + std::to_string(m);
    match.date = Date(2016, 1, 1).addDays(m % 300);
    match.competitionId = "L1";
    match.season = "2016/17";
    match.homeTeam = "H";
    match.awayTeam = "A";
    for (int i = 1; i <= 11; ++i) {
      match.homeLineup.push_back({"h" + std::to_string(i), ""});
      match.awayLineup.push_back({"a" + std::to_string(i), ""});
    }
    match.events = std::move(events);
    match.terminalMinute = spec.terminal;
    matches.push_back(std::move(match));
  }
  return matches;
}

LeagueCorpus generateLeagueCorpus(const LeagueCorpusSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  LeagueCorpus corpus;

  const int nPlayers = spec.nTeams * spec.playersPerTeam;
  corpus.playerIds.reserve(nPlayers);
  corpus.strengths.reserve(nPlayers);
  for (int t = 0; t < spec.nTeams; ++t) {
    for (int k = 0; k < spec.playersPerTeam; ++k) {
      corpus.playerIds.push_back("T" + std::to_string(t) + "P" + std::to_string(k));
      corpus.strengths.push_back(spec.strengthSd * gaussian(rng));
    }
  }
  auto strengthOf = [&](int team, int k) {
    return corpus.strengths[team * spec.playersPerTeam + k];
  };
  auto idOf = [&](int team, int k) { return corpus.playerIds[team * spec.playersPerTeam + k]; };

  int matchCounter = 0;
  for (int season = 0; season < spec.nSeasons; ++season) {
    const double strengthScale =
        season < static_cast<int>(spec.seasonStrengthScale.size())
            ? spec.seasonStrengthScale[season]
            : 1.0;
    std::vector<std::pair<int, int>> fixtures;
    for (int i = 0; i < spec.nTeams; ++i) {
      for (int j = 0; j < spec.nTeams; ++j) {
        if (i != j) fixtures.emplace_back(i, j);
      }
    }
    std::shuffle(fixtures.begin(), fixtures.end(), rng);
    const Date seasonStart(2013 + season, 8, 10);
    const std::string seasonLabel =
        std::to_string(2013 + season) + "/" + std::to_string(14 + season);
    const int perWeek = std::max<int>(1, spec.nTeams / 2);

    for (std::size_t f = 0; f < fixtures.size(); ++f) {
      const auto [homeTeam, awayTeam] = fixtures[f];
      MatchRecord match;
      match.matchId = "m" + std::to_string(matchCounter++);
      match.date = seasonStart.addDays(static_cast<long>(f / perWeek) * 7 +
                                       static_cast<long>(f % 2));
      match.competitionId = "SYN";
      match.season = seasonLabel;
      match.homeTeam = "T" + std::to_string(homeTeam);
      match.awayTeam = "T" + std::to_string(awayTeam);
      match.terminalMinute = 93.0;

      // Random starters and bench order per side.
      auto pickSquad = [&] {
        std::vector<int> order(spec.playersPerTeam);
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        return order;
      };
      const std::vector<int> homeSquad = pickSquad();
      const std::vector<int> awaySquad = pickSquad();
      for (int i = 0; i < 11; ++i) {
        match.homeLineup.push_back({idOf(homeTeam, homeSquad[i]), ""});
        match.awayLineup.push_back({idOf(awayTeam, awaySquad[i]), ""});
      }

      // Substitutions: bench players replace starters at random minutes.
      struct Change {
        double minute;
        Side side;
        int offIdx;  // index into the squad order
        int onIdx;
      };
      std::vector<Change> changes;
      for (int s = 0; s < spec.substitutionsPerSide; ++s) {
        changes.push_back({45.0 + 45.0 * uniform01(rng), Side::Home, s, 11 + s});
        changes.push_back({45.0 + 45.0 * uniform01(rng), Side::Away, s, 11 + s});
      }
      std::sort(changes.begin(), changes.end(),
                [](const Change& a, const Change& b) { return a.minute < b.minute; });

      std::vector<EventRecord> events;
      std::vector<int> homeOn(homeSquad.begin(), homeSquad.begin() + 11);
      std::vector<int> awayOn(awaySquad.begin(), awaySquad.begin() + 11);
      for (const auto& c : changes) {
        const int team = c.side == Side::Home ? homeTeam : awayTeam;
        const auto& squad = c.side == Side::Home ? homeSquad : awaySquad;
        events.push_back({c.minute, c.side, EventKind::Substitution,
                          {idOf(team, squad[c.offIdx]), ""},
                          PlayerRef{idOf(team, squad[c.onIdx]), ""}});
      }

      // Goals from the planted strengths, piecewise between substitutions.
      double t = 0.0;
      std::size_t nextChange = 0;
      auto sumStrength = [&](int team, const std::vector<int>& on) {
        double s = 0.0;
        for (int k : on) s += strengthOf(team, k);
        return s;
      };
      while (t < match.terminalMinute) {
        const double end = nextChange < changes.size()
                               ? std::min(changes[nextChange].minute, match.terminalMinute)
                               : match.terminalMinute;
        const double diffPerMin =
            strengthScale *
                (sumStrength(homeTeam, homeOn) - sumStrength(awayTeam, awayOn)) / 90.0 +
            spec.homeAdvantage;
        const double rateH = std::max(spec.baseRate + diffPerMin / 2.0, 0.1 / 90.0);
        const double rateA = std::max(spec.baseRate - diffPerMin / 2.0, 0.1 / 90.0);
        const double total = rateH + rateA;
        while (true) {
          t += -std::log1p(-uniform01(rng)) / total;
          if (t >= end) break;
          const Side side = uniform01(rng) * total < rateH ? Side::Home : Side::Away;
          const int team = side == Side::Home ? homeTeam : awayTeam;
          const auto& on = side == Side::Home ? homeOn : awayOn;
          const int scorer = on[static_cast<std::size_t>(rng() % on.size())];
          events.push_back({t, side, EventKind::Goal, {idOf(team, scorer), ""}, std::nullopt});
        }
        t = end;
        if (nextChange < changes.size() && changes[nextChange].minute <= t + 1e-12) {
          const Change& c = changes[nextChange];
          auto& on = c.side == Side::Home ? homeOn : awayOn;
          const auto& squad = c.side == Side::Home ? homeSquad : awaySquad;
          std::replace(on.begin(), on.end(), squad[c.offIdx], squad[c.onIdx]);
          ++nextChange;
        }
      }

      std::stable_sort(events.begin(), events.end(),
                       [](const EventRecord& a, const EventRecord& b) {
                         return a.minute < b.minute;
                       });
      match.events = std::move(events);

      // A shot record per goal plus background shots so the xg stage has
      // something to train on.
      auto addShot = [&](double minute, Side side, bool isGoal) {
        ShotRecord shot;
        shot.matchId = match.matchId;
        shot.minute = minute;
        shot.side = side;
        const auto& on = side == Side::Home ? homeOn : awayOn;
        const int team = side == Side::Home ? homeTeam : awayTeam;
        shot.shooter = {idOf(team, on[static_cast<std::size_t>(rng() % on.size())]), ""};
        shot.x = isGoal ? 0.85 + 0.15 * uniform01(rng) : 0.6 + 0.4 * uniform01(rng);
        shot.y = 0.3 + 0.4 * uniform01(rng);
        const double typeDraw = uniform01(rng);
        shot.shotType = typeDraw < 0.75   ? ShotType::Openplay
                        : typeDraw < 0.92 ? ShotType::Header
                                          : ShotType::Freekick;
        shot.bigChance = isGoal && uniform01(rng) < 0.4;
        shot.goal = isGoal;
        corpus.shots.push_back(std::move(shot));
      };
      for (const auto& e : match.events) {
        if (e.kind == EventKind::Goal) addShot(e.minute, e.side, true);
      }
      const int background = 6 + static_cast<int>(rng() % 8);
      for (int s = 0; s < background; ++s) {
        addShot(1.0 + 89.0 * uniform01(rng), rng() % 2 ? Side::Home : Side::Away, false);
      }

      corpus.matches.push_back(std::move(match));
    }
  }
  return corpus;
}

}  // namespace pmrank::test
