#include "pmrank/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pmrank {

DesignMatrix buildDesignMatrix(const std::vector<SegmentObservation>& observations,
                               const PlayerRegistry& registry, int numLeagues) {
  if (observations.empty()) throw EmptyObservationSet();

  DesignMatrix design;
  design.numPlayers = registry.size();
  design.numLeagues = numLeagues;
  design.activePlayer.assign(registry.size(), false);

  const Eigen::Index rows = static_cast<Eigen::Index>(observations.size());
  design.X.resize(rows, design.cols());
  design.weights.resize(rows);
  design.yGoals.resize(rows);

  const bool haveXg = std::all_of(observations.begin(), observations.end(),
                                  [](const SegmentObservation& o) { return o.yXg.has_value(); });
  const bool haveXp = std::all_of(observations.begin(), observations.end(),
                                  [](const SegmentObservation& o) { return o.yXp.has_value(); });
  if (haveXg) design.yXg.resize(rows);
  if (haveXp) design.yXp.resize(rows);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(observations.size() * 26);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const SegmentObservation& obs = observations[r];
    if (obs.weight <= 0.0 || obs.weight > 1.0) {
      throw Error("observation weight outside (0, 1]");
    }
    for (const auto& id : obs.segment.homeOnPitch) {
      const int j = registry.require(id);
      triplets.emplace_back(r, j, 1.0);
      design.activePlayer[j] = true;
    }
    for (const auto& id : obs.segment.awayOnPitch) {
      const int j = registry.require(id);
      triplets.emplace_back(r, j, -1.0);
      design.activePlayer[j] = true;
    }
    triplets.emplace_back(r, design.homeAdvantageCol(), 1.0);
    for (int k = 0; k < 3; ++k) {
      if (obs.segment.dismissal[k] != 0) {
        triplets.emplace_back(r, design.dismissalCol(k),
                              static_cast<double>(obs.segment.dismissal[k]));
      }
    }
    if (obs.mLeague.size() != numLeagues) {
      throw Error("league balance vector has wrong length");
    }
    for (int l = 0; l < numLeagues; ++l) {
      if (obs.mLeague[l] != 0.0) {
        triplets.emplace_back(r, design.leagueCol(l), obs.mLeague[l]);
      }
    }
    design.weights[r] = obs.weight;
    design.yGoals[r] = obs.yGoals;
    if (haveXg) design.yXg[r] = *obs.yXg;
    if (haveXp) design.yXp[r] = *obs.yXp;
  }
  design.X.setFromTriplets(triplets.begin(), triplets.end());
  design.X.makeCompressed();
  return design;
}

Eigen::VectorXd solveWeightedRidge(const Eigen::SparseMatrix<double, Eigen::RowMajor>& X,
                                   const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                                   double lambda, const RidgeOptions& opts) {
  if (X.rows() != y.size() || X.rows() != weights.size()) {
    throw Error("design/response/weight dimensions disagree");
  }
  if (lambda < 0.0) throw Error("lambda must be non-negative");
  if ((weights.array() <= 0.0).any()) throw Error("weights must be positive");

  const Eigen::Index n = X.cols();
  const Eigen::VectorXd b = X.transpose() * weights.cwiseProduct(y).eval();
  const double bNorm = b.norm();
  if (bNorm == 0.0) return Eigen::VectorXd::Zero(n);

  // Jacobi preconditioner: diag(X'WX) + lambda.
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, lambda);
  for (Eigen::Index r = 0; r < X.outerSize(); ++r) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(X, r); it; ++it) {
      diag[it.col()] += weights[r] * it.value() * it.value();
    }
  }
  const Eigen::VectorXd invDiag =
      (diag.array() > 0.0).select(diag.array().inverse(), 1.0);

  auto applyNormal = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd t = X * v;
    t.array() *= weights.array();
    return (X.transpose() * t).eval() + lambda * v;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd r = b;
  Eigen::VectorXd z = invDiag.cwiseProduct(r);
  Eigen::VectorXd p = z;
  double rz = r.dot(z);

  for (int iter = 0; iter < opts.maxIter; ++iter) {
    const Eigen::VectorXd Ap = applyNormal(p);
    const double pAp = p.dot(Ap);
    if (pAp <= 1e-300 * p.squaredNorm() || !std::isfinite(pAp)) {
      if (lambda == 0.0) throw SingularUnregularized();
      throw NonConvergence("ridge conjugate gradient broke down", iter);
    }
    const double alpha = rz / pAp;
    x += alpha * p;
    r -= alpha * Ap;
    if (r.norm() <= opts.tol * bNorm) return x;
    z = invDiag.cwiseProduct(r);
    const double rzNext = r.dot(z);
    p = z + (rzNext / rz) * p;
    rz = rzNext;
  }
  if (lambda == 0.0) throw SingularUnregularized();
  throw NonConvergence("ridge conjugate gradient", opts.maxIter);
}

std::optional<double> RatingSolution::coefficientFor(const std::string& playerId,
                                                     RatingTarget target) const {
  const int idx = playerIndexOf(playerId);
  if (idx < 0 || !activePlayer[idx]) return std::nullopt;
  return playerCoeffs(idx, static_cast<int>(target));
}

int RatingSolution::playerIndexOf(const std::string& playerId) const {
  auto it = std::partition_point(sortedIds_.begin(), sortedIds_.end(),
                                 [&](const auto& e) { return e.first < playerId; });
  if (it != sortedIds_.end() && it->first == playerId) return it->second;
  return -1;
}

void RatingSolution::buildIndex() {
  sortedIds_.clear();
  sortedIds_.reserve(playerIds.size());
  for (std::size_t i = 0; i < playerIds.size(); ++i) {
    sortedIds_.emplace_back(playerIds[i], static_cast<int>(i));
  }
  std::sort(sortedIds_.begin(), sortedIds_.end());
}

RatingSolution ratingsAsOf(const std::vector<SegmentObservation>& observations,
                           const PlayerRegistry& registry,
                           const std::vector<std::string>& leagues, const Date& ratingDate,
                           double lambda, double zeta, double windowYears,
                           const RidgeOptions& opts) {
  const Date from = ratingDate.addMonths(-static_cast<int>(std::lround(windowYears * 12.0)));

  std::vector<SegmentObservation> window;
  for (const auto& obs : observations) {
    if (obs.segment.date >= from && obs.segment.date < ratingDate) {
      window.push_back(obs);
      window.back().weight = segmentWeight(obs.segment.date, ratingDate, zeta);
    }
  }
  if (window.empty()) throw EmptyWindow(from, ratingDate);

  DesignMatrix design = buildDesignMatrix(window, registry, static_cast<int>(leagues.size()));
  if (design.yXg.size() == 0 || design.yXp.size() == 0) {
    throw Error("observations are missing xG or xP targets; attach them before rating");
  }

  RatingSolution solution;
  solution.ratingDate = ratingDate;
  solution.lambda = lambda;
  solution.zeta = zeta;
  solution.windowYears = windowYears;
  solution.leagues = leagues;
  solution.activePlayer = design.activePlayer;
  solution.playerIds.reserve(registry.size());
  solution.playerNames.reserve(registry.size());
  for (int j = 0; j < registry.size(); ++j) {
    solution.playerIds.push_back(registry.player(j).playerId);
    solution.playerNames.push_back(registry.player(j).displayName);
  }

  solution.playerCoeffs.resize(registry.size(), kNumTargets);
  solution.leagueEffects.resize(static_cast<Eigen::Index>(leagues.size()), kNumTargets);

  const Eigen::VectorXd* targets[kNumTargets] = {&design.yGoals, &design.yXg, &design.yXp};
  for (int t = 0; t < kNumTargets; ++t) {
    const Eigen::VectorXd coef =
        solveWeightedRidge(design.X, *targets[t], design.weights, lambda, opts);
    solution.playerCoeffs.col(t) = coef.head(design.numPlayers);
    solution.homeAdvantage[t] = coef[design.homeAdvantageCol()];
    for (int k = 0; k < 3; ++k) solution.dismissal(k, t) = coef[design.dismissalCol(k)];
    for (int l = 0; l < design.numLeagues; ++l) {
      solution.leagueEffects(l, t) = coef[design.leagueCol(l)];
    }
  }
  solution.buildIndex();
  return solution;
}

}  // namespace pmrank
