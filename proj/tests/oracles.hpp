#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace pmrank::test {

// Dense closed-form ridge solve; the independent check for the conjugate
// gradient path.
inline Eigen::VectorXd denseRidgeSolve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& w, double lambda) {
  const Eigen::MatrixXd A = X.transpose() * w.asDiagonal() * X +
                            lambda * Eigen::MatrixXd::Identity(X.cols(), X.cols());
  const Eigen::VectorXd b = X.transpose() * (w.asDiagonal() * y);
  return A.ldlt().solve(b);
}

inline Eigen::SparseMatrix<double, Eigen::RowMajor> toSparse(const Eigen::MatrixXd& X) {
  Eigen::SparseMatrix<double, Eigen::RowMajor> S(X.rows(), X.cols());
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (X(i, j) != 0.0) triplets.emplace_back(i, j, X(i, j));
    }
  }
  S.setFromTriplets(triplets.begin(), triplets.end());
  return S;
}

}  // namespace pmrank::test
