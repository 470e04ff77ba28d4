#include "pmrank/logistic.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "pmrank/numeric.hpp"

namespace pmrank {

namespace {

// log(1 + e^z) without overflow.
double log1pExp(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

}  // namespace

double logisticObjective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                         const Eigen::VectorXd& beta, double intercept) {
  const Eigen::Index n = y.size();
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, intercept);
  if (X.cols() > 0) eta += X * beta;
  double nll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    // -[y*eta - log(1+e^eta)]
    nll += log1pExp(eta[i]) - y[i] * eta[i];
  }
  return nll / static_cast<double>(n) + 0.5 * lambda * beta.squaredNorm();
}

Eigen::VectorXd logisticGradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                 double lambda, const Eigen::VectorXd& beta, double intercept) {
  const Eigen::Index n = y.size();
  Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, intercept);
  if (X.cols() > 0) eta += X * beta;
  const Eigen::VectorXd resid = logistic(eta) - y;  // p - y
  Eigen::VectorXd grad(1 + X.cols());
  grad[0] = resid.sum() / static_cast<double>(n);
  if (X.cols() > 0) {
    grad.tail(X.cols()) = X.transpose() * resid / static_cast<double>(n) + lambda * beta;
  }
  return grad;
}

LogisticFit fitLogisticRidge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                             const LogisticOptions& opts) {
  const Eigen::Index n = y.size();
  const Eigen::Index p = X.cols();
  if (n == 0) throw Error("logistic fit requires at least one observation");

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  // Start the intercept at the logit of the clamped empirical rate.
  const double rate = std::min(std::max(y.mean(), 1e-6), 1.0 - 1e-6);
  double intercept = std::log(rate / (1.0 - rate));

  double objective = logisticObjective(X, y, lambda, beta, intercept);
  for (int iter = 1; iter <= opts.maxIter; ++iter) {
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(n, intercept);
    if (p > 0) eta += X * beta;
    const Eigen::VectorXd prob = logistic(eta);
    const Eigen::VectorXd w = prob.array() * (1.0 - prob.array());

    Eigen::VectorXd grad(1 + p);
    const Eigen::VectorXd resid = prob - y;
    grad[0] = resid.sum() / static_cast<double>(n);
    if (p > 0) grad.tail(p) = X.transpose() * resid / static_cast<double>(n) + lambda * beta;

    const double gradNorm = grad.norm();
    if (gradNorm < opts.tol) return {beta, intercept, iter - 1, gradNorm};

    Eigen::MatrixXd hess(1 + p, 1 + p);
    hess(0, 0) = w.sum() / static_cast<double>(n);
    if (p > 0) {
      const Eigen::MatrixXd Xw = w.asDiagonal() * X;
      hess.block(0, 1, 1, p) = Xw.colwise().sum() / static_cast<double>(n);
      hess.block(1, 0, p, 1) = hess.block(0, 1, 1, p).transpose();
      hess.block(1, 1, p, p) =
          X.transpose() * Xw / static_cast<double>(n) + lambda * Eigen::MatrixXd::Identity(p, p);
    }
    // Levenberg-style jitter keeps the step defined when w underflows.
    hess.diagonal().array() += 1e-12;

    const Eigen::VectorXd step = hess.ldlt().solve(grad);

    // Backtracking line search on the objective.
    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 50; ++ls) {
      const double trialIntercept = intercept - t * step[0];
      Eigen::VectorXd trialBeta = beta;
      if (p > 0) trialBeta -= t * step.tail(p);
      const double trial = logisticObjective(X, y, lambda, trialBeta, trialIntercept);
      if (trial <= objective + 1e-12) {
        intercept = trialIntercept;
        beta = std::move(trialBeta);
        objective = trial;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) {
      // No descent along the Newton direction: either converged to noise
      // level or the problem is ill-posed at this tolerance.
      if (gradNorm < 1e-6) return {beta, intercept, iter, gradNorm};
      throw NonConvergence("logistic line search stalled", iter);
    }
  }
  const double finalNorm = logisticGradient(X, y, lambda, beta, intercept).norm();
  if (finalNorm < 1e-6) return {beta, intercept, opts.maxIter, finalNorm};
  throw NonConvergence("logistic fit did not reach gradient tolerance", opts.maxIter);
}

}  // namespace pmrank
