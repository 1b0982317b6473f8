#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmfr/funcdata.hpp"
#include "gmfr/grouping.hpp"

namespace gmfr {

// y_n = beta0 + sum_k sum_{j in delta_k} f_j <xi_nj, alpha_k> + eps_n
struct GroupedModel {
  GroupingStructure delta;
  double beta0 = 0.0;
  Eigen::VectorXd f;  // p scale coefficients
  Eigen::MatrixXd A;  // K x D templates
  Eigen::VectorXd c;  // K normalization constants applied by normalize()
  bool converged = false;
  int iterations = 0;
  std::vector<double> objective_trace;  // 0.5 * RSS, initial value first
  double max_jitter = 0.0;
  std::vector<std::string> warnings;

  // p x D rows f_j * alpha_{k(j)}.
  Eigen::MatrixXd coefficient_rows() const;
};

struct FitOptions {
  int max_iter = 500;
  double tol = 1e-8;
  // Rows used to initialize templates; least squares on the same data when absent.
  std::optional<Eigen::MatrixXd> initial_rows;
};

// Block relaxation over (A, F, beta0); returns the normalized model.
GroupedModel fit_grouped(const ScoreMatrix& scores, const Eigen::VectorXd& y, const GroupingStructure& delta,
                         const FitOptions& options = {});

// c_k = sign(a_k1) ||alpha_k||, f*_j = c_k f_j, alpha*_k = alpha_k / c_k. The
// sign comes from the first nonzero entry when a_k1 = 0.
GroupedModel normalize(GroupedModel model);

Eigen::VectorXd predict(const GroupedModel& model, const ScoreMatrix& scores);

// Unconstrained intercept + p*D coefficients.
struct OrdinaryModel {
  double intercept = 0.0;
  Eigen::MatrixXd B;  // p x D
  double jitter = 0.0;
  std::vector<std::string> warnings;
};

OrdinaryModel fit_ordinary(const ScoreMatrix& scores, const Eigen::VectorXd& y);
Eigen::VectorXd predict(const OrdinaryModel& model, const ScoreMatrix& scores);

// Grouped model with every covariate in one group.
GroupedModel fit_matrix_variate(const ScoreMatrix& scores, const Eigen::VectorXd& y, const FitOptions& options = {});

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace gmfr
