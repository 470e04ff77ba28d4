#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Core>

namespace pmrank {

inline double logistic(double z) {
  // Split on sign so large |z| never overflows exp.
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

template <typename Derived>
Eigen::VectorXd logistic(const Eigen::MatrixBase<Derived>& z) {
  Eigen::VectorXd out(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = logistic(z.derived()(i));
  return out;
}

inline double normalCdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

inline double normalPdf(double z) {
  static const double kInvSqrt2Pi = 0.3989422804014326779;
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

// Min-max rescale to [0,1]. A constant vector maps to `degenerate` everywhere.
template <typename Derived>
Eigen::VectorXd minMaxNormalize(const Eigen::MatrixBase<Derived>& v, double degenerate) {
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (hi - lo <= 0.0) return Eigen::VectorXd::Constant(v.size(), degenerate);
  return ((v.derived().array() - lo) / (hi - lo)).matrix();
}

// Spearman rank correlation; average ranks on ties.
double spearman(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace pmrank
