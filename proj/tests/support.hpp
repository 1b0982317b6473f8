#pragma once

// Shared fixtures and independent reference computations for the unit and
// acceptance tests. The oracles here deliberately avoid the library's own
// solvers: least squares goes through Householder QR, misalignments are
// summed from the definition, and the prox is found by brute-force search.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>

#include <unistd.h>

#include <Eigen/Dense>

#include "gmfr/funcdata.hpp"
#include "gmfr/penalty.hpp"
#include "gmfr/rng.hpp"

namespace testing {

inline Eigen::MatrixXd normal_matrix(gmfr::Rng& rng, Eigen::Index rows, Eigen::Index cols, double sd = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = sd * rng.normal();
  return m;
}

inline Eigen::VectorXd normal_vector(gmfr::Rng& rng, Eigen::Index n, double sd = 1.0) {
  return normal_matrix(rng, n, 1, sd).col(0);
}

inline double uniform(gmfr::Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline gmfr::ScoreMatrix random_scores(gmfr::Rng& rng, std::size_t n, std::size_t p, std::size_t dim) {
  return gmfr::ScoreMatrix(p, dim, normal_matrix(rng, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p * dim)));
}

// y = Xi vec(B) with B row-major (covariate outer).
inline Eigen::VectorXd linear_response(const gmfr::ScoreMatrix& s, const Eigen::MatrixXd& B) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.num_samples()));
  for (std::size_t j = 0; j < s.num_covariates(); ++j) y += s.block(j) * B.row(static_cast<Eigen::Index>(j)).transpose();
  return y;
}

// Least squares through Householder QR, no intercept.
inline Eigen::VectorXd qr_solve(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  return X.colPivHouseholderQr().solve(y);
}

// OLS rows (p x D) of centered y on centered scores.
inline Eigen::MatrixXd ols_rows(const gmfr::ScoreMatrix& s, const Eigen::VectorXd& y) {
  Eigen::MatrixXd X = s.flat();
  X.rowwise() -= X.colwise().mean();
  const Eigen::VectorXd yc = y.array() - y.mean();
  const Eigen::VectorXd b = qr_solve(X, yc);
  Eigen::MatrixXd B(static_cast<Eigen::Index>(s.num_covariates()), static_cast<Eigen::Index>(s.dimension()));
  for (Eigen::Index j = 0; j < B.rows(); ++j) B.row(j) = b.segment(j * B.cols(), B.cols()).transpose();
  return B;
}

// Fitted values of y on [1, X] via QR.
inline Eigen::VectorXd ols_fitted(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::MatrixXd Z(X.rows(), X.cols() + 1);
  Z.col(0).setOnes();
  Z.rightCols(X.cols()) = X;
  return Z * qr_solve(Z, y);
}

// ||M_ij|| / (||B_i|| ||B_j||) with M summed term by term from the definition.
inline double misalignment_by_definition(const Eigen::VectorXd& bi, const Eigen::VectorXd& bj) {
  double ss = 0.0;
  for (Eigen::Index d = 0; d < bi.size(); ++d)
    for (Eigen::Index e = d + 1; e < bi.size(); ++e) {
      const double m = bi[d] * bj[e] - bj[d] * bi[e];
      ss += m * m;
    }
  return std::sqrt(ss) / (bi.norm() * bj.norm());
}

// The prox of a radial penalty is a nonnegative multiple of a, so minimize
// h(r) = theta/2 (r - |a|)^2 + J(r) over r in [0, |a|] on a grid of the given step.
inline Eigen::VectorXd prox_grid_search(const gmfr::PenaltySpec& spec, const Eigen::VectorXd& a, double theta,
                                        double step) {
  const double norm = a.norm();
  if (norm == 0.0) return a;
  double best_r = 0.0;
  double best = std::numeric_limits<double>::infinity();
  const auto steps = static_cast<long>(std::ceil(norm / step));
  for (long k = 0; k <= steps; ++k) {
    const double r = std::min(norm, static_cast<double>(k) * step);
    const double h = 0.5 * theta * (r - norm) * (r - norm) + gmfr::evaluate(spec, r);
    if (h < best) {
      best = h;
      best_r = r;
    }
  }
  return (best_r / norm) * a;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("gmfr_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
