#include "pmrank/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace pmrank {

std::vector<Segment> buildSegments(const MatchRecord& match) {
  // Boundary at every lineup-change minute strictly inside (0, terminal);
  // duplicates collapse, so simultaneous changes share one boundary.
  std::set<double> boundaries;
  for (const auto& e : match.events) {
    if (e.kind == EventKind::Goal) continue;
    if (e.minute > 0.0 && e.minute < match.terminalMinute) boundaries.insert(e.minute);
  }
  std::vector<double> edges;
  edges.push_back(0.0);
  edges.insert(edges.end(), boundaries.begin(), boundaries.end());
  edges.push_back(match.terminalMinute);
  const std::size_t nSegs = edges.size() - 1;

  // A goal at minute m belongs to the segment (a, b] with a < m <= b; a goal
  // at kickoff minute 0 belongs to the first segment.
  auto segmentOfGoal = [&](double minute) -> std::size_t {
    if (minute <= edges[1]) return 0;
    const auto it = std::lower_bound(edges.begin(), edges.end(), minute);
    return static_cast<std::size_t>(it - edges.begin()) - 1;
  };

  std::vector<Segment> segments(nSegs);
  for (const auto& e : match.events) {
    if (e.kind != EventKind::Goal) continue;
    Segment& seg = segments[segmentOfGoal(e.minute)];
    (e.side == Side::Home ? seg.goalsHome : seg.goalsAway) += 1;
  }

  std::set<std::string> home;
  std::set<std::string> away;
  for (const auto& p : match.homeLineup) home.insert(p.playerId);
  for (const auto& p : match.awayLineup) away.insert(p.playerId);
  int redsHome = 0;
  int redsAway = 0;

  auto applyChange = [&](const EventRecord& e) {
    std::set<std::string>& pitch = (e.side == Side::Home) ? home : away;
    if (e.kind == EventKind::Substitution) {
      pitch.erase(e.player.playerId);
      pitch.insert(e.playerOn->playerId);
    } else if (e.kind == EventKind::RedCard) {
      pitch.erase(e.player.playerId);
      (e.side == Side::Home ? redsHome : redsAway) += 1;
    }
  };

  std::size_t next = 0;  // next unapplied lineup change
  std::vector<const EventRecord*> changes;
  for (const auto& e : match.events) {
    if (e.kind != EventKind::Goal) changes.push_back(&e);
  }

  int scoreHome = 0;
  int scoreAway = 0;
  for (std::size_t k = 0; k < nSegs; ++k) {
    // Changes at the segment's start minute take effect for this segment.
    while (next < changes.size() && changes[next]->minute <= edges[k]) {
      applyChange(*changes[next]);
      ++next;
    }
    Segment& seg = segments[k];
    seg.matchId = match.matchId;
    seg.leagueId = match.competitionId;
    seg.date = match.date;
    seg.startMinute = edges[k];
    seg.endMinute = edges[k + 1];
    seg.homeOnPitch.assign(home.begin(), home.end());
    seg.awayOnPitch.assign(away.begin(), away.end());
    seg.redsAtStart = {redsHome, redsAway};
    seg.dismissal = dismissalDummies(redsHome, redsAway);
    seg.scoreAtStart = {scoreHome, scoreAway};
    scoreHome += seg.goalsHome;
    scoreAway += seg.goalsAway;
  }
  return segments;
}

Eigen::Vector3i dismissalDummies(int redsHome, int redsAway) {
  Eigen::Vector3i dummies = Eigen::Vector3i::Zero();
  const int d = redsHome - redsAway;
  const int sign = d > 0 ? 1 : -1;
  const int n = std::min(std::abs(d), 3);
  for (int i = 0; i < n; ++i) dummies[i] = sign;
  return dummies;
}

double segmentWeight(const Date& segDate, const Date& ratingDate, double zeta) {
  if (segDate > ratingDate) throw FutureSegment(segDate, ratingDate);
  const double halfWeeks = static_cast<double>(daysBetween(segDate, ratingDate)) / 3.5;
  return std::exp(-zeta * halfWeeks);
}

void AdaptationLedger::addAppearance(const std::string& playerId, const Date& date,
                                     const std::string& league, const std::string& season) {
  appearances_[playerId].push_back({date.dayNumber(), league, season});
}

AdaptationLedger AdaptationLedger::fromMatches(const std::vector<MatchRecord>& matches) {
  AdaptationLedger ledger;
  for (const auto& m : matches) {
    std::set<std::string> fielded;
    for (const auto& p : m.homeLineup) fielded.insert(p.playerId);
    for (const auto& p : m.awayLineup) fielded.insert(p.playerId);
    for (const auto& e : m.events) {
      if (e.kind == EventKind::Substitution && e.playerOn) fielded.insert(e.playerOn->playerId);
    }
    for (const auto& id : fielded) ledger.addAppearance(id, m.date, m.competitionId, m.season);
  }
  for (auto& [id, apps] : ledger.appearances_) {
    std::stable_sort(apps.begin(), apps.end(),
                     [](const Appearance& a, const Appearance& b) { return a.day < b.day; });
  }
  return ledger;
}

bool AdaptationLedger::contains(const std::string& playerId) const {
  return appearances_.contains(playerId);
}

int AdaptationLedger::gamesInSeason(const std::string& playerId, const std::string& league,
                                    const std::string& season, const Date& before) const {
  auto it = appearances_.find(playerId);
  if (it == appearances_.end()) return 0;
  int n = 0;
  for (const auto& a : it->second) {
    if (a.day >= before.dayNumber()) break;
    if (a.league == league && a.season == season) ++n;
  }
  return n;
}

std::map<std::string, int> AdaptationLedger::gamesInWindow(const std::string& playerId,
                                                           const Date& from,
                                                           const Date& before) const {
  std::map<std::string, int> counts;
  auto it = appearances_.find(playerId);
  if (it == appearances_.end()) return counts;
  for (const auto& a : it->second) {
    if (a.day >= before.dayNumber()) break;
    if (a.day >= from.dayNumber()) counts[a.league] += 1;
  }
  return counts;
}

bool adaptationStatus(const AdaptationLedger& ledger, const std::string& playerId,
                      const Date& matchDate, const std::string& season,
                      const std::string& league) {
  if (!ledger.contains(playerId)) throw UnknownPlayer(playerId);
  if (ledger.gamesInSeason(playerId, league, season, matchDate) >= 6) return true;
  const auto counts = ledger.gamesInWindow(playerId, matchDate.addMonths(-18), matchDate);
  auto own = counts.find(league);
  if (own == counts.end() || own->second == 0) return false;
  for (const auto& [other, n] : counts) {
    if (other == league) continue;
    if (n >= own->second) return false;  // ties do not grant adaptation
  }
  return true;
}

Eigen::VectorXd leagueBalance(const Segment& segment, const MatchRecord& match,
                              const AdaptationLedger& ledger,
                              const std::vector<std::string>& leagues) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(leagues.size()));
  for (std::size_t l = 0; l < leagues.size(); ++l) {
    int balance = 0;
    for (const auto& id : segment.homeOnPitch) {
      if (adaptationStatus(ledger, id, match.date, match.season, leagues[l])) balance += 1;
    }
    for (const auto& id : segment.awayOnPitch) {
      if (adaptationStatus(ledger, id, match.date, match.season, leagues[l])) balance -= 1;
    }
    m[static_cast<Eigen::Index>(l)] = balance;
  }
  return m;
}

std::vector<SegmentObservation> buildObservations(const Dataset& data,
                                                  const AdaptationLedger& ledger) {
  std::vector<SegmentObservation> observations;
  for (const auto& match : data.matches) {
    for (Segment& seg : buildSegments(match)) {
      SegmentObservation obs;
      obs.yGoals = (seg.goalsHome - seg.goalsAway) * 90.0 / seg.durationMin();
      obs.mLeague = leagueBalance(seg, match, ledger, data.leagues);
      obs.segment = std::move(seg);
      observations.push_back(std::move(obs));
    }
  }
  return observations;
}

double basicPM(std::span<const Appearance> appearances) {
  double total = 0.0;
  double minutes = 0.0;
  for (const auto& a : appearances) {
    if (a.minutes <= 0.0) throw ZeroMinutes();
    total += static_cast<double>(a.goalsFor - a.goalsAgainst) / a.minutes;
    minutes += a.minutes;
  }
  if (minutes <= 0.0) throw ZeroMinutes();
  return total * 90.0;
}

double netPM(std::span<const Appearance> on, std::span<const Appearance> off) {
  return basicPM(on) - basicPM(off);
}

}  // namespace pmrank
