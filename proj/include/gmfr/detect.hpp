#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmfr/funcdata.hpp"
#include "gmfr/grouping.hpp"
#include "gmfr/kernels.hpp"
#include "gmfr/penalty.hpp"

namespace gmfr {

// p x D coefficient scores, row j = B_j.
using CoefficientScores = Eigen::MatrixXd;

// b_id b_jd' - b_jd b_id' for d < d', lexicographic.
Eigen::VectorXd misalignment(const Eigen::VectorXd& bi, const Eigen::VectorXd& bj);

// ||misalignment(bi, bj)|| / (||bi|| ||bj||), in [0, 1].
double normalized_misalignment(const Eigen::VectorXd& bi, const Eigen::VectorXd& bj);

// p x p matrix of normalized misalignments between rows of B.
Eigen::MatrixXd normalized_misalignment_matrix(const CoefficientScores& B,
                                               kernels::Backend backend = kernels::Backend::Serial);

enum class InitKind { Auto, Ols, Ridge, Given };

struct Initialization {
  InitKind kind = InitKind::Auto;
  // Ridge: epsilon <= 0 means 1e-4 * trace(Xi'Xi) / (pD).
  double ridge_epsilon = 0.0;
  CoefficientScores given;
};

struct DetectConfig {
  PenaltySpec penalty;
  double theta = 1.0;
  double tilde_lambda = 0.2;
  int max_iter = 2000;
  double tol_primal = 1e-6;
  double tol_change = 1e-6;
  Initialization init;
  // Along a lambda path: start each point from the previous B and u.
  bool warm_start = true;
  kernels::Backend backend = kernels::Backend::Serial;

  void validate() const;
};

// Gram quantities of the (already centered) design, shared across iterations.
struct DetectionProblem {
  std::size_t p = 0;
  std::size_t dim = 0;
  Eigen::MatrixXd xtx;
  Eigen::VectorXd xty;
  std::size_t num_samples = 0;

  static DetectionProblem from_design(const Eigen::MatrixXd& xi, const Eigen::VectorXd& y, std::size_t p,
                                      std::size_t dim);
};

struct ADMMState {
  CoefficientScores B;
  Eigen::MatrixXd M;  // P x Q
  Eigen::MatrixXd u;  // P x Q
  int iterations = 0;
  double primal_residual = 0.0;  // max |wedge(B) - M|
  double change = 0.0;           // max |B - B_prev|
  bool converged = false;
  double max_jitter = 0.0;
};

// OLS when N > pD, otherwise ridge (or per the configured initialization).
CoefficientScores initial_coefficients(const DetectionProblem& problem, const Initialization& init);

// Exact minimizer over B of the augmented Lagrangian with the constraint
// linearized at B_prev.
CoefficientScores b_update(const DetectionProblem& problem, const Eigen::MatrixXd& M, const Eigen::MatrixXd& u,
                           const CoefficientScores& B_prev, double theta,
                           kernels::Backend backend = kernels::Backend::Serial, double* jitter = nullptr);

CoefficientScores b_update(const Eigen::MatrixXd& M, const Eigen::MatrixXd& u, const CoefficientScores& B_prev,
                           const Eigen::MatrixXd& xi, const Eigen::VectorXd& y, double theta);

// Linearized ADMM for the truncated shape-misalignment objective at
// config.penalty.lambda. warm supplies B and u to start from.
ADMMState admm_solve(const DetectionProblem& problem, const DetectConfig& config, const ADMMState* warm = nullptr);

ADMMState admm_solve(const Eigen::MatrixXd& xi, const Eigen::VectorXd& y, std::size_t p, std::size_t dim,
                     const DetectConfig& config);

GroupingStructure threshold_grouping(const CoefficientScores& B, double tilde_lambda,
                                     kernels::Backend backend = kernels::Backend::Serial);

struct PathPoint {
  double lambda = 0.0;
  bool ok = false;
  std::string error;
  CoefficientScores B;
  Eigen::MatrixXd normalized;  // p x p
  GroupingStructure grouping;  // at config.tilde_lambda
  int iterations = 0;
  double primal_residual = 0.0;
  double change = 0.0;
  bool converged = false;
};

// Column-centered design and centered responses (detection ignores the intercept).
void center_for_detection(Eigen::MatrixXd& xi, Eigen::VectorXd& y);

// admm_solve over an ascending lambda grid on centered data.
std::vector<PathPoint> detect_path(const ScoreMatrix& scores, const Eigen::VectorXd& y,
                                   const std::vector<double>& lambda_grid, const DetectConfig& config);

// count log-spaced values from lambda_max * min_ratio to lambda_max, where
// lambda_max = 2 theta max_ij ||wedge(B_i^ols, B_j^ols)||. Starts with 0 when
// include_zero is set.
std::vector<double> default_lambda_grid(const ScoreMatrix& scores, const Eigen::VectorXd& y, double theta,
                                        std::size_t count = 40, double min_ratio = 1e-3, bool include_zero = true);

}  // namespace gmfr
