#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gmfr {

// N samples of p curves on a shared grid, plus one scalar response per sample.
//
// values is stored (N*p) x T with row n*p + j holding X_{nj} on the grid.
class CurveSet {
 public:
  CurveSet(Eigen::VectorXd grid, std::size_t num_samples, std::size_t num_covariates,
           Eigen::MatrixXd values, Eigen::VectorXd responses,
           std::vector<std::string> names = {});

  std::size_t num_samples() const { return n_; }
  std::size_t num_covariates() const { return p_; }
  std::size_t grid_size() const { return static_cast<std::size_t>(grid_.size()); }

  const Eigen::VectorXd& grid() const { return grid_; }
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::VectorXd& responses() const { return y_; }
  const std::vector<std::string>& names() const { return names_; }

  auto curve(std::size_t n, std::size_t j) const { return values_.row(static_cast<Eigen::Index>(n * p_ + j)); }

  // Multiply every curve of covariate j by c.
  void scale_covariate(std::size_t j, double c);

 private:
  Eigen::VectorXd grid_;
  std::size_t n_;
  std::size_t p_;
  Eigen::MatrixXd values_;
  Eigen::VectorXd y_;
  std::vector<std::string> names_;
};

enum class BasisKind { Fourier, Eigenbasis };

// D orthonormal functions evaluated on a grid with the quadrature weights used
// to integrate against them.
struct BasisSystem {
  BasisKind kind = BasisKind::Fourier;
  Eigen::VectorXd grid;
  Eigen::MatrixXd eval;     // D x T
  Eigen::VectorXd weights;  // T
  // Eigenvalues of the pooled covariance, eigenbasis only (all of them, descending).
  Eigen::VectorXd eigenvalues;

  std::size_t dimension() const { return static_cast<std::size_t>(eval.rows()); }
  Eigen::MatrixXd gram() const;
};

inline constexpr double kOrthTolerance = 1e-6;

// Projection scores xi_{nj,d}, flattened N x (p*D) with column j*D + d.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(std::size_t num_covariates, std::size_t dimension, Eigen::MatrixXd flat);

  std::size_t num_samples() const { return static_cast<std::size_t>(flat_.rows()); }
  std::size_t num_covariates() const { return p_; }
  std::size_t dimension() const { return d_; }

  double operator()(std::size_t n, std::size_t j, std::size_t d) const {
    return flat_(static_cast<Eigen::Index>(n), column(j, d));
  }
  Eigen::Index column(std::size_t j, std::size_t d) const { return static_cast<Eigen::Index>(j * d_ + d); }

  const Eigen::MatrixXd& flat() const { return flat_; }
  // N x D block of covariate j.
  auto block(std::size_t j) const {
    return flat_.middleCols(static_cast<Eigen::Index>(j * d_), static_cast<Eigen::Index>(d_));
  }

  ScoreMatrix rows(const std::vector<std::size_t>& index) const;
  void scale_covariate(std::size_t j, double c);

 private:
  std::size_t p_ = 0;
  std::size_t d_ = 0;
  Eigen::MatrixXd flat_;
};

// Trapezoid weights for a strictly increasing grid.
Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid);

Eigen::VectorXd uniform_grid(std::size_t points);

void validate_grid(const Eigen::VectorXd& grid);

// Orthonormal Fourier system on [0,1]: 1, sqrt2 sin(2 pi t), sqrt2 cos(2 pi t), sqrt2 sin(4 pi t), ...
BasisSystem build_fourier_basis(std::size_t dimension, const Eigen::VectorXd& grid);

// Smallest D whose cumulative eigenvalue fraction reaches threshold.
std::size_t select_dimension(const Eigen::VectorXd& eigenvalues, double var_threshold);

struct EigenbasisResult {
  BasisSystem basis;
  std::size_t dimension;
};

// Pooled FPCA over all N*p curves (centered by the pooled mean).
EigenbasisResult build_eigenbasis(const CurveSet& curves, double var_threshold);

ScoreMatrix project_scores(const CurveSet& curves, const BasisSystem& basis);

Eigen::VectorXd reconstruct_function(const Eigen::VectorXd& coeffs, const BasisSystem& basis);

}  // namespace gmfr
