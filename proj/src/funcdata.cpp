#include "gmfr/funcdata.hpp"

#include <cmath>
#include <numbers>

#include "gmfr/errors.hpp"

namespace gmfr {

void validate_grid(const Eigen::VectorXd& grid) {
  if (grid.size() < 2) throw InvalidInput("grid needs at least 2 points");
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw InvalidInput("grid has a non-finite abscissa");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidInput("grid must be strictly increasing");
  }
  if (grid[0] < 0.0 || grid[grid.size() - 1] > 1.0) throw InvalidInput("grid endpoints must lie in [0,1]");
}

CurveSet::CurveSet(Eigen::VectorXd grid, std::size_t num_samples, std::size_t num_covariates,
                   Eigen::MatrixXd values, Eigen::VectorXd responses, std::vector<std::string> names)
    : grid_(std::move(grid)),
      n_(num_samples),
      p_(num_covariates),
      values_(std::move(values)),
      y_(std::move(responses)),
      names_(std::move(names)) {
  validate_grid(grid_);
  if (n_ == 0 || p_ == 0) throw InvalidInput("curve set needs at least one sample and one covariate");
  if (static_cast<std::size_t>(values_.rows()) != n_ * p_ || values_.cols() != grid_.size())
    throw InvalidInput("curve values must be (N*p) x T");
  if (static_cast<std::size_t>(y_.size()) != n_) throw InvalidInput("responses length must equal N");
  if (!values_.allFinite()) throw InvalidInput("curve values contain non-finite entries");
  if (!y_.allFinite()) throw InvalidInput("responses contain non-finite entries");
  if (!names_.empty() && names_.size() != p_) throw InvalidInput("covariate names must have length p");
}

void CurveSet::scale_covariate(std::size_t j, double c) {
  if (j >= p_) throw InvalidInput("covariate index out of range");
  for (std::size_t n = 0; n < n_; ++n) values_.row(static_cast<Eigen::Index>(n * p_ + j)) *= c;
}

Eigen::MatrixXd BasisSystem::gram() const {
  return eval * weights.asDiagonal() * eval.transpose();
}

ScoreMatrix::ScoreMatrix(std::size_t num_covariates, std::size_t dimension, Eigen::MatrixXd flat)
    : p_(num_covariates), d_(dimension), flat_(std::move(flat)) {
  if (p_ == 0 || d_ == 0) throw InvalidInput("score matrix needs p >= 1 and D >= 1");
  if (static_cast<std::size_t>(flat_.cols()) != p_ * d_) throw InvalidInput("score matrix must have p*D columns");
  if (!flat_.allFinite()) throw InvalidInput("score matrix contains non-finite entries");
}

ScoreMatrix ScoreMatrix::rows(const std::vector<std::size_t>& index) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(index.size()), flat_.cols());
  for (std::size_t i = 0; i < index.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = flat_.row(static_cast<Eigen::Index>(index[i]));
  return ScoreMatrix(p_, d_, std::move(out));
}

void ScoreMatrix::scale_covariate(std::size_t j, double c) {
  if (j >= p_) throw InvalidInput("covariate index out of range");
  flat_.middleCols(static_cast<Eigen::Index>(j * d_), static_cast<Eigen::Index>(d_)) *= c;
}

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid) {
  validate_grid(grid);
  const Eigen::Index t = grid.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(t);
  for (Eigen::Index i = 0; i + 1 < t; ++i) {
    const double h = grid[i + 1] - grid[i];
    w[i] += 0.5 * h;
    w[i + 1] += 0.5 * h;
  }
  return w;
}

Eigen::VectorXd uniform_grid(std::size_t points) {
  if (points < 2) throw InvalidInput("grid needs at least 2 points");
  return Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(points), 0.0, 1.0);
}

BasisSystem build_fourier_basis(std::size_t dimension, const Eigen::VectorXd& grid) {
  if (dimension == 0) throw InvalidInput("basis dimension must be positive");
  BasisSystem basis;
  basis.kind = BasisKind::Fourier;
  basis.grid = grid;
  basis.weights = trapezoid_weights(grid);
  basis.eval.resize(static_cast<Eigen::Index>(dimension), grid.size());
  const double root2 = std::numbers::sqrt2;
  for (std::size_t d = 0; d < dimension; ++d) {
    const auto row = static_cast<Eigen::Index>(d);
    if (d == 0) {
      basis.eval.row(row).setOnes();
      continue;
    }
    const double freq = 2.0 * std::numbers::pi * static_cast<double>((d + 1) / 2);
    const bool is_sin = (d % 2 == 1);
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      basis.eval(row, i) = root2 * (is_sin ? std::sin(freq * grid[i]) : std::cos(freq * grid[i]));
  }
  return basis;
}

std::size_t select_dimension(const Eigen::VectorXd& eigenvalues, double var_threshold) {
  if (!(var_threshold > 0.0 && var_threshold <= 1.0)) throw InvalidInput("variance threshold must be in (0,1]");
  double total = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) total += std::max(eigenvalues[i], 0.0);
  if (!(total > 0.0)) throw InvalidInput("pooled curves have zero variance");
  // Relative slack absorbs rounding in the running sum (0.5+0.3+0.1 < 0.9 in binary).
  const double target = var_threshold * total * (1.0 - 1e-12);
  double cum = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    cum += std::max(eigenvalues[i], 0.0);
    if (cum >= target) return static_cast<std::size_t>(i + 1);
  }
  return static_cast<std::size_t>(eigenvalues.size());
}

EigenbasisResult build_eigenbasis(const CurveSet& curves, double var_threshold) {
  const Eigen::MatrixXd& x = curves.values();
  if (x.rows() < 2) throw InvalidInput("eigenbasis needs at least 2 pooled curves");
  const Eigen::VectorXd w = trapezoid_weights(curves.grid());
  const Eigen::RowVectorXd mean = x.colwise().mean();
  // Operator eigenproblem C W phi = mu phi, symmetrized with W^{1/2}.
  const Eigen::VectorXd sw = w.cwiseSqrt();
  const Eigen::MatrixXd centered = ((x.rowwise() - mean) * sw.asDiagonal()).eval();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(x.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success) throw SolverFailure("eigendecomposition of pooled covariance failed");

  const Eigen::Index t = cov.rows();
  Eigen::VectorXd values = es.eigenvalues().reverse();
  Eigen::MatrixXd vectors = es.eigenvectors().rowwise().reverse();
  if (!(values[0] > 0.0)) throw InvalidInput("pooled curves have zero variance");

  const std::size_t dim = select_dimension(values, var_threshold);
  BasisSystem basis;
  basis.kind = BasisKind::Eigenbasis;
  basis.grid = curves.grid();
  basis.weights = w;
  basis.eigenvalues = values;
  basis.eval.resize(static_cast<Eigen::Index>(dim), t);
  for (std::size_t d = 0; d < dim; ++d) {
    Eigen::VectorXd psi = vectors.col(static_cast<Eigen::Index>(d));
    Eigen::Index arg;
    psi.cwiseAbs().maxCoeff(&arg);
    if (psi[arg] < 0.0) psi = -psi;
    basis.eval.row(static_cast<Eigen::Index>(d)) = psi.cwiseQuotient(sw).transpose();
  }
  return {std::move(basis), dim};
}

ScoreMatrix project_scores(const CurveSet& curves, const BasisSystem& basis) {
  if (basis.grid.size() != curves.grid().size() || (basis.grid - curves.grid()).cwiseAbs().maxCoeff() > 1e-12)
    throw InvalidInput("basis grid does not match curve grid");
  const std::size_t n = curves.num_samples();
  const std::size_t p = curves.num_covariates();
  const std::size_t dim = basis.dimension();
  // (N*p) x D, row n*p + j
  const Eigen::MatrixXd pooled = curves.values() * basis.weights.asDiagonal() * basis.eval.transpose();
  Eigen::MatrixXd flat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p * dim));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < p; ++j)
      flat.block(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j * dim), 1, static_cast<Eigen::Index>(dim)) =
          pooled.row(static_cast<Eigen::Index>(s * p + j));
  return ScoreMatrix(p, dim, std::move(flat));
}

Eigen::VectorXd reconstruct_function(const Eigen::VectorXd& coeffs, const BasisSystem& basis) {
  if (static_cast<std::size_t>(coeffs.size()) != basis.dimension())
    throw InvalidInput("coefficient length does not match basis dimension");
  return basis.eval.transpose() * coeffs;
}

}  // namespace gmfr
