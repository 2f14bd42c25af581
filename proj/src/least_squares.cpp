#include "cogman/least_squares.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "cogman/errors.hpp"

namespace cogman {

LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double rank_tol) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (Y.rows() != n) throw OutOfRange("design and target row counts differ");
  if (n < p) throw DegenerateDesign("fewer samples than unknowns");
  if (!X.allFinite() || !Y.allFinite()) throw NumericalError("non-finite least-squares input");

  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    scale[j] = std::sqrt(X.col(j).squaredNorm() / static_cast<double>(n));
    if (!(scale[j] > 0.0)) throw DegenerateDesign("design column is identically zero");
  }
  const Eigen::MatrixXd Xs = X * scale.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd G = Xs.transpose() * Xs;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = eig.eigenvalues();
  if (!(ev.minCoeff() > rank_tol * ev.maxCoeff())) {
    throw DegenerateDesign("design matrix is rank deficient");
  }
  const Eigen::MatrixXd coef_s = G.ldlt().solve(Xs.transpose() * Y);

  LinearFit fit;
  fit.coef = scale.cwiseInverse().asDiagonal() * coef_s;
  fit.dof = static_cast<int>(n - p);
  const Eigen::MatrixXd R = Y - X * fit.coef;
  fit.residual_std = Eigen::VectorXd::Zero(Y.cols());
  if (fit.dof > 0) {
    for (Eigen::Index k = 0; k < Y.cols(); ++k) {
      fit.residual_std[k] = std::sqrt(R.col(k).squaredNorm() / fit.dof);
    }
    fit.pooled_std = std::sqrt(R.squaredNorm() / (static_cast<double>(fit.dof) * Y.cols()));
  }
  return fit;
}

}  // namespace cogman
