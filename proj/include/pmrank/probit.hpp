#pragma once

#include <vector>

#include <Eigen/Core>

#include "pmrank/inplay.hpp"
#include "pmrank/types.hpp"

namespace pmrank {

enum class MatchOutcome { AwayWin = 0, Draw = 1, HomeWin = 2 };

// Latent-Gaussian ordered regression over away win < draw < home win.
// Cutpoints play the intercept role; there is no separate intercept column.
struct OrderedProbitModel {
  Eigen::VectorXd beta;
  double c1 = 0.0;
  double c2 = 1.0;  // strictly above c1
  int iterations = 0;
  double gradientNorm = 0.0;
  bool separationCapped = false;
};

struct ProbitOptions {
  double tol = 1e-9;  // gradient norm target
  int maxIter = 300;
  double betaCap = 30.0;  // separation guard on |beta|
};

// P(awayWin) = Phi(c1 - x'b), P(draw) = Phi(c2 - x'b) - Phi(c1 - x'b),
// P(homeWin) = 1 - Phi(c2 - x'b).
OutcomeDistribution orderedProbitProbs(const OrderedProbitModel& model,
                                       const Eigen::VectorXd& x);

double orderedProbitLoglik(const Eigen::MatrixXd& X, const std::vector<MatchOutcome>& y,
                           const OrderedProbitModel& model);

// Gradient of the log-likelihood in the (beta..., c1, c2) layout.
Eigen::VectorXd orderedProbitGradient(const Eigen::MatrixXd& X,
                                      const std::vector<MatchOutcome>& y,
                                      const OrderedProbitModel& model);

OrderedProbitModel fitOrderedProbit(const Eigen::MatrixXd& X,
                                    const std::vector<MatchOutcome>& y,
                                    const ProbitOptions& opts = {});

}  // namespace pmrank
