#pragma once

#include <Eigen/Dense>

namespace gmfr {

struct LinearSolution {
  Eigen::VectorXd x;
  // Diagonal ridge added to make the system factorizable; 0 when none was needed.
  double jitter = 0.0;
};

// Solve A x = b for symmetric positive (semi)definite A. Falls back to a ridge
// of 1e-10 * mean(diag A), escalated tenfold until the Cholesky factor exists.
LinearSolution solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

struct LeastSquaresFit {
  double intercept = 0.0;
  Eigen::VectorXd coef;
  Eigen::VectorXd fitted;
  double jitter = 0.0;
};

// Least squares of y on X, optionally with an unpenalized intercept (handled by
// centering, so the jitter never touches it).
LeastSquaresFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool intercept);

}  // namespace gmfr
