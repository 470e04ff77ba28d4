#pragma once

#include <Eigen/Core>

#include "pmrank/types.hpp"

namespace pmrank {

// L2-penalized logistic regression. The objective is the mean negative
// log-likelihood plus 0.5 * lambda * ||beta||^2; the intercept is not
// penalized, so an empty feature matrix reduces to the empirical rate.
struct LogisticFit {
  Eigen::VectorXd beta;
  double intercept = 0.0;
  int iterations = 0;
  double gradientNorm = 0.0;
};

struct LogisticOptions {
  double tol = 1e-9;  // gradient norm target
  int maxIter = 200;
};

double logisticObjective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                         const Eigen::VectorXd& beta, double intercept);

// Gradient in the (intercept, beta...) layout.
Eigen::VectorXd logisticGradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 double lambda, const Eigen::VectorXd& beta, double intercept);

LogisticFit fitLogisticRidge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                             const LogisticOptions& opts = {});

}  // namespace pmrank
