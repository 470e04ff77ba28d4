#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pmrank/types.hpp"

namespace pmrank {

struct FutureSegment : Error {
  FutureSegment(const Date& segDate, const Date& ratingDate)
      : Error("segment dated " + segDate.toIso() + " is after rating date " +
              ratingDate.toIso()) {}
};

struct ZeroMinutes : Error {
  ZeroMinutes() : Error("appearance list has zero playing minutes") {}
};

// Maximal interval of play with an unchanged set of players on the pitch.
struct Segment {
  std::string matchId;
  std::string leagueId;
  Date date;  // match date, used for observation weights
  double startMinute = 0.0;
  double endMinute = 0.0;
  std::vector<std::string> homeOnPitch;  // sorted player ids
  std::vector<std::string> awayOnPitch;
  int goalsHome = 0;  // goals scored within the segment
  int goalsAway = 0;
  Eigen::Vector3i dismissal = Eigen::Vector3i::Zero();
  std::pair<int, int> scoreAtStart{0, 0};
  std::pair<int, int> redsAtStart{0, 0};

  double durationMin() const { return endMinute - startMinute; }
};

// One ridge regression row: a segment with its targets, weight and
// league-balance counts. The xg / inplay modules fill yXg / yXp.
struct SegmentObservation {
  Segment segment;
  double yGoals = 0.0;               // goal differential per 90 (home - away)
  std::optional<double> yXg;         // xG differential per 90
  std::optional<double> yXp;         // expected-points swing (not per-90)
  double weight = 1.0;
  Eigen::VectorXd mLeague;           // per-league balance, dataset league order
};

// Splits a validated match into segments partitioning (0, terminalMinute].
// Boundaries sit exactly at substitution / red-card minutes; simultaneous
// changes merge into one boundary; a goal at a boundary belongs to the
// earlier segment.
std::vector<Segment> buildSegments(const MatchRecord& match);

// Net red-card deficit encoding. d = redsHome - redsAway; the first
// min(|d|,3) entries carry sign(+1 when the home side is short-handed).
Eigen::Vector3i dismissalDummies(int redsHome, int redsAway);

// exp(-zeta * daysBetween / 3.5): exponential down-weighting of old
// segments, distances in half-week units.
double segmentWeight(const Date& segDate, const Date& ratingDate, double zeta);

// Appearance history used by the league-adaptation rule.
class AdaptationLedger {
 public:
  void addAppearance(const std::string& playerId, const Date& date,
                     const std::string& league, const std::string& season);

  static AdaptationLedger fromMatches(const std::vector<MatchRecord>& matches);

  bool contains(const std::string& playerId) const;

  // Appearances in (league, season) strictly before `before`.
  int gamesInSeason(const std::string& playerId, const std::string& league,
                    const std::string& season, const Date& before) const;

  // Per-league appearance counts in [from, before).
  std::map<std::string, int> gamesInWindow(const std::string& playerId, const Date& from,
                                           const Date& before) const;

 private:
  struct Appearance {
    long day;
    std::string league;
    std::string season;
  };
  std::map<std::string, std::vector<Appearance>> appearances_;
};

// True iff the player is adapted to `league` at `matchDate`: at least 6
// games in that competition this season, or strictly more games there than
// in any other competition over the previous 18 months.
bool adaptationStatus(const AdaptationLedger& ledger, const std::string& playerId,
                      const Date& matchDate, const std::string& season,
                      const std::string& league);

// m[l] = |home on pitch adapted to l| - |away on pitch adapted to l|,
// indexed by `leagues` order.
Eigen::VectorXd leagueBalance(const Segment& segment, const MatchRecord& match,
                              const AdaptationLedger& ledger,
                              const std::vector<std::string>& leagues);

// Segments for every match with yGoals, weights left at 1 and mLeague filled.
std::vector<SegmentObservation> buildObservations(const Dataset& data,
                                                  const AdaptationLedger& ledger);

// (minutes, goals for, goals against) while a player was on the pitch.
struct Appearance {
  double minutes = 0.0;
  int goalsFor = 0;
  int goalsAgainst = 0;
};

// Sum over appearances of (goal difference / minutes), times 90.
double basicPM(std::span<const Appearance> appearances);

// basicPM while on the pitch minus basicPM while off it.
double netPM(std::span<const Appearance> on, std::span<const Appearance> off);

}  // namespace pmrank
