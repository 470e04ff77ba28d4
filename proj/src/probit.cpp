#include "pmrank/probit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "pmrank/numeric.hpp"

namespace pmrank {

namespace {

constexpr double kTinyProb = 1e-300;

// 1D Newton on Phi(c) = p; adequate for the non-extreme start values used
// to initialize the cutpoints.
double inverseNormalCdf(double p) {
  p = std::clamp(p, 1e-9, 1.0 - 1e-9);
  double c = 0.0;
  for (int i = 0; i < 60; ++i) {
    const double f = normalCdf(c) - p;
    const double d = normalPdf(c);
    if (d < 1e-300) break;
    const double step = f / d;
    c -= std::clamp(step, -2.0, 2.0);
    if (std::abs(step) < 1e-14) break;
  }
  return c;
}

std::array<double, 3> categoryProbs(double eta, double c1, double c2) {
  const double phi1 = normalCdf(c1 - eta);
  const double phi2 = normalCdf(c2 - eta);
  const double pAW = phi1;
  const double pD = std::max(phi2 - phi1, 0.0);
  const double pHW = std::max(1.0 - pAW - pD, 0.0);
  return {pAW, pD, pHW};
}

}  // namespace

OutcomeDistribution orderedProbitProbs(const OrderedProbitModel& model,
                                       const Eigen::VectorXd& x) {
  if (x.size() != model.beta.size()) throw Error("covariate dimension mismatch");
  const auto p = categoryProbs(model.beta.dot(x), model.c1, model.c2);
  return {p[2], p[1], p[0]};
}

double orderedProbitLoglik(const Eigen::MatrixXd& X, const std::vector<MatchOutcome>& y,
                           const OrderedProbitModel& model) {
  double ll = 0.0;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double eta = X.cols() > 0 ? model.beta.dot(X.row(i)) : 0.0;
    const auto p = categoryProbs(eta, model.c1, model.c2);
    ll += std::log(std::max(p[static_cast<int>(y[i])], kTinyProb));
  }
  return ll;
}

Eigen::VectorXd orderedProbitGradient(const Eigen::MatrixXd& X,
                                      const std::vector<MatchOutcome>& y,
                                      const OrderedProbitModel& model) {
  const Eigen::Index p = X.cols();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(p + 2);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const double eta = p > 0 ? model.beta.dot(X.row(i)) : 0.0;
    const double u1 = model.c1 - eta;
    const double u2 = model.c2 - eta;
    const double phi1 = normalPdf(u1);
    const double phi2 = normalPdf(u2);
    const auto probs = categoryProbs(eta, model.c1, model.c2);
    double dEta = 0.0;
    double dC1 = 0.0;
    double dC2 = 0.0;
    switch (y[i]) {
      case MatchOutcome::AwayWin: {
        const double q = std::max(probs[0], kTinyProb);
        dEta = -phi1 / q;
        dC1 = phi1 / q;
        break;
      }
      case MatchOutcome::Draw: {
        const double q = std::max(probs[1], kTinyProb);
        dEta = (phi1 - phi2) / q;
        dC1 = -phi1 / q;
        dC2 = phi2 / q;
        break;
      }
      case MatchOutcome::HomeWin: {
        const double q = std::max(probs[2], kTinyProb);
        dEta = phi2 / q;
        dC2 = -phi2 / q;
        break;
      }
    }
    if (p > 0) grad.head(p) += dEta * X.row(i).transpose();
    grad[p] += dC1;
    grad[p + 1] += dC2;
  }
  return grad;
}

OrderedProbitModel fitOrderedProbit(const Eigen::MatrixXd& X,
                                    const std::vector<MatchOutcome>& y,
                                    const ProbitOptions& opts) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (n == 0 || static_cast<std::size_t>(n) != y.size()) {
    throw Error("probit fit requires matching, non-empty inputs");
  }
  std::array<long, 3> counts{0, 0, 0};
  for (auto o : y) counts[static_cast<int>(o)] += 1;
  if (counts[0] == 0 || counts[1] == 0 || counts[2] == 0) {
    throw Error("probit fit requires at least one match per outcome category");
  }

  OrderedProbitModel model;
  model.beta = Eigen::VectorXd::Zero(p);
  const double fAway = static_cast<double>(counts[0]) / static_cast<double>(n);
  const double fDraw = static_cast<double>(counts[1]) / static_cast<double>(n);
  model.c1 = inverseNormalCdf(fAway);
  model.c2 = inverseNormalCdf(fAway + fDraw);

  double current = orderedProbitLoglik(X, y, model);
  const Eigen::Index dim = p + 2;
  bool converged = false;

  for (int iter = 1; iter <= opts.maxIter; ++iter) {
    model.iterations = iter;
    const Eigen::VectorXd grad = orderedProbitGradient(X, y, model);
    model.gradientNorm = grad.norm();
    if (model.gradientNorm < opts.tol) {
      converged = true;
      break;
    }

    // Hessian by central differences of the analytic gradient; the
    // parameter count is small so this stays cheap.
    Eigen::MatrixXd hess(dim, dim);
    OrderedProbitModel probe = model;
    auto setParam = [&](OrderedProbitModel& m, Eigen::Index j, double value) {
      if (j < p) {
        m.beta[j] = value;
      } else if (j == p) {
        m.c1 = value;
      } else {
        m.c2 = value;
      }
    };
    auto getParam = [&](const OrderedProbitModel& m, Eigen::Index j) {
      if (j < p) return m.beta[j];
      return j == p ? m.c1 : m.c2;
    };
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double v = getParam(model, j);
      const double h = 1e-5 * std::max(1.0, std::abs(v));
      setParam(probe, j, v + h);
      const Eigen::VectorXd gPlus = orderedProbitGradient(X, y, probe);
      setParam(probe, j, v - h);
      const Eigen::VectorXd gMinus = orderedProbitGradient(X, y, probe);
      setParam(probe, j, v);
      hess.col(j) = (gPlus - gMinus) / (2.0 * h);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();
    hess.diagonal().array() -= 1e-10;

    Eigen::VectorXd step = hess.ldlt().solve(-grad);
    if (!step.allFinite()) step = grad;  // gradient-ascent fallback

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      OrderedProbitModel trial = model;
      if (p > 0) trial.beta += t * step.head(p);
      trial.c1 += t * step[p];
      trial.c2 += t * step[p + 1];
      if (trial.c2 > trial.c1 + 1e-10) {
        const double value = orderedProbitLoglik(X, y, trial);
        if (value > current) {
          trial.iterations = model.iterations;
          model = std::move(trial);
          current = value;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;  // stalled at floating-point noise

    if (p > 0 && model.beta.cwiseAbs().maxCoeff() > opts.betaCap) {
      model.beta = model.beta.cwiseMax(-opts.betaCap).cwiseMin(opts.betaCap);
      model.separationCapped = true;
      model.gradientNorm = orderedProbitGradient(X, y, model).norm();
      return model;
    }
  }

  if (!converged) {
    model.gradientNorm = orderedProbitGradient(X, y, model).norm();
    if (model.gradientNorm >= 1e-7) {
      throw NonConvergence("ordered probit fit", model.iterations);
    }
  }
  return model;
}

}  // namespace pmrank
