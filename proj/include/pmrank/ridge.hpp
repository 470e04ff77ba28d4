#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "pmrank/segmentation.hpp"
#include "pmrank/types.hpp"

namespace pmrank {

struct EmptyObservationSet : Error {
  EmptyObservationSet() : Error("no observations to assemble a design matrix from") {}
};

struct SingularUnregularized : Error {
  SingularUnregularized()
      : Error("unregularized (lambda = 0) system is rank-deficient; a positive lambda is "
              "required") {}
};

struct EmptyWindow : Error {
  EmptyWindow(const Date& from, const Date& to)
      : Error("no observations in rating window [" + from.toIso() + ", " + to.toIso() + ")") {}
};

// Sparse segment-by-parameter matrix. Column layout: players in registry
// order, then home advantage (all-ones), three dismissal dummies, and the
// per-league balance columns.
struct DesignMatrix {
  Eigen::SparseMatrix<double, Eigen::RowMajor> X;
  Eigen::VectorXd weights;
  Eigen::VectorXd yGoals;
  Eigen::VectorXd yXg;  // empty when targets were not attached
  Eigen::VectorXd yXp;
  int numPlayers = 0;
  int numLeagues = 0;
  std::vector<bool> activePlayer;  // player column has a nonzero entry

  int cols() const { return numPlayers + 1 + 3 + numLeagues; }
  int homeAdvantageCol() const { return numPlayers; }
  int dismissalCol(int k) const { return numPlayers + 1 + k; }
  int leagueCol(int l) const { return numPlayers + 4 + l; }
};

DesignMatrix buildDesignMatrix(const std::vector<SegmentObservation>& observations,
                               const PlayerRegistry& registry, int numLeagues);

struct RidgeOptions {
  double tol = 1e-10;  // relative residual on the normal equations
  int maxIter = 50000;
};

// Solves (X' W X + lambda I) a = X' W y by conjugate gradients with Jacobi
// preconditioning; every column, intercept included, is penalized.
Eigen::VectorXd solveWeightedRidge(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X,
                                   const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                                   double lambda, const RidgeOptions& opts = {});

enum class RatingTarget { PM = 0, XgPM = 1, XpPM = 2 };

constexpr int kNumTargets = 3;

struct RatingSolution {
  Date ratingDate;
  double lambda = 0.0;
  double zeta = 0.0;
  double windowYears = 2.0;
  std::vector<std::string> playerIds;    // registry order
  std::vector<std::string> playerNames;  // aligned, may be empty strings
  std::vector<bool> activePlayer;        // played inside the window
  std::vector<std::string> leagues;
  Eigen::MatrixXd playerCoeffs;   // N x 3, columns in RatingTarget order
  Eigen::Vector3d homeAdvantage = Eigen::Vector3d::Zero();
  Eigen::Matrix3d dismissal = Eigen::Matrix3d::Zero();  // dummy x target
  Eigen::MatrixXd leagueEffects;  // L x 3

  // Coefficient for an active player; nullopt for unknown or inactive ids.
  std::optional<double> coefficientFor(const std::string& playerId, RatingTarget target) const;

  int playerIndexOf(const std::string& playerId) const;  // -1 when absent

  // Rebuilds the id lookup; call after mutating playerIds.
  void buildIndex();

 private:
  std::vector<std::pair<std::string, int>> sortedIds_;
};

// Filters observations to [ratingDate - window, ratingDate), applies the
// zeta time weights and solves the three targets.
RatingSolution ratingsAsOf(const std::vector<SegmentObservation>& observations,
                           const PlayerRegistry& registry,
                           const std::vector<std::string>& leagues, const Date& ratingDate,
                           double lambda, double zeta, double windowYears = 2.0,
                           const RidgeOptions& opts = {});

}  // namespace pmrank
