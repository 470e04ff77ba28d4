#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pmrank/segmentation.hpp"
#include "pmrank/types.hpp"

namespace pmrank {

// Game state at a moment of play. goalDiff is home - away, tracked exactly
// and clipped to +/-10 for state vectors; manPower is away reds minus home
// reds (positive = home has the extra man), clipped to +/-3 as a covariate.
struct GameState {
  double minute = 0.0;
  int goalDiff = 0;
  int manPower = 0;
};

struct OutcomeDistribution {
  double pHW = 0.0;
  double pD = 0.0;
  double pAW = 0.0;
};

// Proportional scoring-intensity model: per side, a baseline log-rate per
// time block and multiplicative log-effects for the goal-difference and
// man-power covariate levels {-3..+3}, references GD=0 / MP=0 pinned to 0.
struct HazardModel {
  static constexpr int kLevels = 7;  // covariate levels -3..+3

  struct SideParams {
    Eigen::VectorXd blockLog;                       // one per block, log goals/min
    Eigen::Matrix<double, kLevels, 1> gdLog = Eigen::Matrix<double, kLevels, 1>::Zero();
    Eigen::Matrix<double, kLevels, 1> mpLog = Eigen::Matrix<double, kLevels, 1>::Zero();
  };

  struct Diagnostics {
    int iterations = 0;
    double gradientNorm = 0.0;
    std::vector<std::string> warnings;
  };

  std::vector<double> blockEdges;  // ascending, first 0, last = horizon T
  SideParams home;
  SideParams away;
  Diagnostics homeDiagnostics;
  Diagnostics awayDiagnostics;

  double horizon() const { return blockEdges.back(); }
  int numBlocks() const { return static_cast<int>(blockEdges.size()) - 1; }
  int blockAt(double minute) const;

  // Goals per minute for the side at the given state. Covariates are
  // home-perspective and clipped to the level range.
  double intensity(Side side, double minute, int goalDiff, int manPower) const;
};

struct HazardFitOptions {
  std::vector<double> blockEdges = {0.0, 15.0, 30.0, 45.0, 60.0, 75.0, 93.0};
  double tol = 1e-8;    // gradient norm target
  int maxIter = 200;
  double floorIntensity = 1e-6;  // goals/min fallback for a side with no goals
};

// Log-linear Poisson maximum likelihood over the exposure decomposition of
// the matches into constant-(block, GD, MP) intervals. Covariate levels
// that are never observed keep a zero effect, with a warning.
HazardModel fitHazards(const std::vector<MatchRecord>& matches,
                       const HazardFitOptions& opts = {});

// Exact outcome distribution by forward integration of the goal-difference
// chain from the state's minute to the horizon. Man power is held fixed.
// Throws if the probability mass suppressed at the chain boundary exceeds
// 1e-8 (the chain is sized so realistic intensities stay far below that).
OutcomeDistribution outcomeProbabilities(const HazardModel& model, const GameState& state,
                                         double gridStep = 0.1);

// Monte Carlo oracle: exact exponential inter-arrival sampling against the
// piecewise-constant intensities. Deterministic for a given seed.
OutcomeDistribution simulateOutcomes(const HazardModel& model, const GameState& state,
                                     long runs, std::uint64_t seed);

// home: 3*pHW + pD; away: 3*pAW + pD.
double expectedPoints(const OutcomeDistribution& dist, Side side);

// Expected-points swing of a segment: (dxP home - dxP away) between the
// segment's boundary states. At minute 0 the distribution is the league's
// empirical initial triple rather than the model's.
double xpTarget(const HazardModel& model, const Segment& segment,
                const InitialFreqs& initialFreqs);

// One hazard model per league with a pooled fallback for small leagues.
struct HazardModelSet {
  HazardModel pooled;
  std::map<std::string, HazardModel> perLeague;
  int minLeagueMatches = 300;

  const HazardModel& forLeague(const std::string& league) const;
};

HazardModelSet fitHazardModelSet(const std::vector<MatchRecord>& matches,
                                 int minLeagueMatches = 300,
                                 const HazardFitOptions& opts = {});

// Fills yXp on every observation.
void attachXpTargets(std::vector<SegmentObservation>& observations, const Dataset& data,
                     const HazardModelSet& set);

}  // namespace pmrank
