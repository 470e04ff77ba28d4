#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "pmrank/probit.hpp"
#include "pmrank/ridge.hpp"
#include "pmrank/types.hpp"

namespace pmrank {

struct LengthMismatch : Error {
  LengthMismatch(std::size_t a, std::size_t b)
      : Error("forecast/outcome lengths disagree: " + std::to_string(a) + " vs " +
              std::to_string(b)) {}
};

struct InvalidDistribution : Error {
  explicit InvalidDistribution(std::size_t index)
      : Error("forecast " + std::to_string(index) + " is not a probability distribution") {}
};

struct NoEligiblePlayers : Error {
  explicit NoEligiblePlayers(int year)
      : Error("no players pass the minutes filter in " + std::to_string(year)) {}
};

struct TooFewLeagues : Error {
  explicit TooFewLeagues(std::size_t n)
      : Error("league comparison needs at least 2 leagues, got " + std::to_string(n)) {}
};

// Three-category Brier score: mean over matches of the summed squared
// deviations between the forecast triple and the outcome indicators.
double brierScore(const std::vector<OutcomeDistribution>& forecasts,
                  const std::vector<MatchOutcome>& outcomes);

MatchOutcome matchOutcome(const MatchRecord& match);

// Starting-eleven mean coefficients, home then away, for each target:
// (homePM, homeXgPM, homeXpPM, awayPM, awayXgPM, awayXpPM). Unrated
// players contribute 0 to the mean with the divisor kept at 11.
struct MatchCovariates {
  Eigen::VectorXd x;
  int unratedPlayers = 0;
};

MatchCovariates matchCovariates(const MatchRecord& match, const RatingSolution& ratings);

struct CvGridPoint {
  double lambda = 0.0;
  double zeta = 0.0;
  double meanBrier = 0.0;
  double sdBrier = 0.0;
};

struct CvReport {
  std::vector<CvGridPoint> grid;
  std::size_t selectedIndex = 0;
  int folds = 10;
  int repeats = 3;
  std::uint64_t seed = 0;

  const CvGridPoint& selected() const { return grid.at(selectedIndex); }
};

// Repeated k-fold evaluation over (lambda, zeta): ratings are fitted on the
// training folds, an ordered probit on the training matches' covariates,
// and the Brier score taken on the held-out matches. Folds split whole
// matches so segments of one match never straddle the split. Ties select
// the larger lambda.
CvReport tuneHyperparameters(const Dataset& data,
                             const std::vector<SegmentObservation>& observations,
                             const PlayerRegistry& registry,
                             const std::vector<std::pair<double, double>>& grid, int folds,
                             int repeats, std::uint64_t seed, int jobs = 1);

// On-pitch minutes per player per calendar year.
std::map<int, std::map<std::string, double>> minutesByCalendarYear(
    const std::vector<SegmentObservation>& observations);

struct PlayerBoardEntry {
  int rank = 0;
  std::string playerId;
  std::string name;
  double score = 0.0;
};

struct PlayerBoard {
  int year = 0;
  double minMinutes = 900.0;
  std::vector<PlayerBoardEntry> entries;  // descending score
};

// Mean of the three min-max-normalized ratings over players with at least
// minMinutes on-pitch minutes in the calendar year.
PlayerBoard topPlayers(const RatingSolution& solution,
                       const std::map<std::string, double>& minutesInYear, int year,
                       double minMinutes = 900.0);

struct LeagueTableRow {
  std::string league;
  double pm = 0.0;
  double xgpm = 0.0;
  double xppm = 0.0;
  double mean = 0.0;
};

// League effects min-max normalized per target, with the mean column,
// sorted by descending mean.
std::vector<LeagueTableRow> leagueStrengths(const RatingSolution& solution);

struct SeriesPoint {
  Date date;
  std::optional<double> pm;
  std::optional<double> xgpm;
  std::optional<double> xppm;
};

// Per-date re-rating of one player; null entries where the player has no
// segment inside that date's window.
std::vector<SeriesPoint> ratingSeries(const std::string& playerId,
                                      const std::vector<Date>& dates,
                                      const std::vector<SegmentObservation>& observations,
                                      const PlayerRegistry& registry,
                                      const std::vector<std::string>& leagues, double lambda,
                                      double zeta, double windowYears = 2.0);

}  // namespace pmrank
