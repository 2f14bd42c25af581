#pragma once

#include <Eigen/Core>

namespace cogman {

struct LinearFit {
  Eigen::MatrixXd coef;          // p x k, so that Y ≈ X * coef
  Eigen::VectorXd residual_std;  // per output column, sqrt(SSR / (n - p))
  double pooled_std = 0.0;       // over all outputs
  int dof = 0;
};

/// Ordinary least squares on the normal equations with columns scaled to unit
/// RMS. Throws DegenerateDesign when the scaled Gram matrix is numerically
/// rank deficient (smallest/largest eigenvalue below `rank_tol`).
LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double rank_tol = 1e-10);

}  // namespace cogman
