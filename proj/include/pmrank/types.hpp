#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pmrank/date.hpp"

namespace pmrank {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown by the iterative fitters (logistic, Poisson hazard, ordered probit,
// conjugate gradient) when the stated tolerance is not reached.
struct NonConvergence : Error {
  NonConvergence(const std::string& what, int iterations)
      : Error(what + " (after " + std::to_string(iterations) + " iterations)"),
        iterations(iterations) {}
  int iterations;
};

enum class Side { Home, Away };

inline Side opponent(Side s) { return s == Side::Home ? Side::Away : Side::Home; }
inline const char* toString(Side s) { return s == Side::Home ? "home" : "away"; }

enum class EventKind { Goal, Substitution, RedCard };

enum class ShotType { Penalty, Freekick, Header, Openplay };

constexpr int kNumShotTypes = 4;

const char* toString(EventKind k);
const char* toString(ShotType t);

struct PlayerRef {
  std::string playerId;
  std::string displayName;  // optional, reports only

  friend bool operator==(const PlayerRef&, const PlayerRef&) = default;
};

struct EventRecord {
  double minute = 0.0;  // cumulative decimal minutes
  Side side = Side::Home;
  EventKind kind = EventKind::Goal;
  PlayerRef player;
  std::optional<PlayerRef> playerOn;  // substitution only
};

struct MatchRecord {
  std::string matchId;
  Date date;
  std::string competitionId;
  std::string season;
  std::string homeTeam;
  std::string awayTeam;
  std::vector<PlayerRef> homeLineup;  // exactly 11
  std::vector<PlayerRef> awayLineup;  // exactly 11
  std::vector<EventRecord> events;    // sorted by minute, feed order on ties
  double terminalMinute = 90.0;

  // Final score from the goal events.
  std::pair<int, int> finalScore() const;
};

using GkSkills = Eigen::Matrix<double, 5, 1>;  // diving, handling, kicking, positioning, reflexes

struct ShotRecord {
  std::string matchId;
  double minute = 0.0;
  Side side = Side::Home;
  PlayerRef shooter;
  double x = 0.0;  // pitch fraction toward the attacking goal line
  double y = 0.0;  // pitch fraction across the width
  ShotType shotType = ShotType::Openplay;
  bool bigChance = false;
  std::optional<GkSkills> gkSkills;
  bool goal = false;
};

// Empirical (home win, draw, away win) frequencies for a league.
struct InitialFreqs {
  double pHW = 0.0;
  double pD = 0.0;
  double pAW = 0.0;
};

struct Dataset {
  std::vector<MatchRecord> matches;          // feed order
  std::vector<ShotRecord> shots;             // feed order
  std::vector<std::string> leagues;          // distinct competitionIds, first-seen order
  std::map<std::string, InitialFreqs> initialOutcomeFreqs;

  std::map<std::string, std::size_t> matchIndex;  // matchId -> index into matches

  const MatchRecord& match(const std::string& matchId) const;
};

// Dense player index over a dataset. Column order in the design matrix and
// every per-player report follows registration order.
class PlayerRegistry {
 public:
  int add(const PlayerRef& p);  // returns existing index on re-registration
  int indexOf(const std::string& playerId) const;  // -1 when absent
  int require(const std::string& playerId) const;  // throws UnknownPlayer

  int size() const { return static_cast<int>(players_.size()); }
  const PlayerRef& player(int index) const { return players_.at(index); }
  const std::vector<PlayerRef>& players() const { return players_; }

  static PlayerRegistry fromDataset(const Dataset& data);

 private:
  std::vector<PlayerRef> players_;
  std::map<std::string, int> index_;
};

struct UnknownPlayer : Error {
  explicit UnknownPlayer(const std::string& id) : Error("unknown player '" + id + "'") {}
};

}  // namespace pmrank
