#include "gmfr/detect.hpp"

#include <algorithm>
#include <cmath>

#include "gmfr/errors.hpp"
#include "gmfr/linalg.hpp"

namespace gmfr {

Eigen::VectorXd misalignment(const Eigen::VectorXd& bi, const Eigen::VectorXd& bj) {
  if (bi.size() != bj.size()) throw InvalidInput("misalignment needs rows of equal length");
  const Eigen::Index dim = bi.size();
  if (dim < 2) throw InvalidInput("misalignment needs D >= 2");
  Eigen::VectorXd out(dim * (dim - 1) / 2);
  Eigen::Index q = 0;
  for (Eigen::Index d = 0; d < dim; ++d)
    for (Eigen::Index e = d + 1; e < dim; ++e, ++q) out[q] = bi[d] * bj[e] - bj[d] * bi[e];
  return out;
}

double normalized_misalignment(const Eigen::VectorXd& bi, const Eigen::VectorXd& bj) {
  const double ni = bi.norm();
  const double nj = bj.norm();
  if (!(ni > 0.0)) throw DegenerateRow(0, "zero-norm coefficient row");
  if (!(nj > 0.0)) throw DegenerateRow(1, "zero-norm coefficient row");
  return misalignment(bi, bj).norm() / (ni * nj);
}

namespace {

void require_nonzero_rows(const CoefficientScores& B) {
  for (Eigen::Index j = 0; j < B.rows(); ++j)
    if (!(B.row(j).norm() > 0.0)) throw DegenerateRow(static_cast<std::size_t>(j), "zero-norm coefficient row");
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::MatrixXd normalized_misalignment_matrix(const CoefficientScores& B, kernels::Backend backend) {
  require_nonzero_rows(B);
  Eigen::MatrixXd out;
  kernels::normalized_misalignment_matrix(backend, B, out);
  return out;
}

void DetectConfig::validate() const {
  penalty.validate_with_theta(theta);
  if (!(tilde_lambda >= 0.0)) throw ConfigError("tilde_lambda must be >= 0");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(tol_primal > 0.0) || !(tol_change > 0.0)) throw ConfigError("tolerances must be > 0");
}

DetectionProblem DetectionProblem::from_design(const Eigen::MatrixXd& xi, const Eigen::VectorXd& y, std::size_t p,
                                               std::size_t dim) {
  if (static_cast<std::size_t>(xi.cols()) != p * dim) throw InvalidInput("design must have p*D columns");
  if (xi.rows() != y.size()) throw InvalidInput("design rows must match response length");
  if (xi.rows() == 0) throw InvalidInput("detection needs at least one sample");
  if (!xi.allFinite() || !y.allFinite()) throw InvalidInput("design or responses contain non-finite entries");
  DetectionProblem prob;
  prob.p = p;
  prob.dim = dim;
  prob.num_samples = static_cast<std::size_t>(xi.rows());
  prob.xtx = xi.transpose() * xi;
  prob.xty = xi.transpose() * y;
  return prob;
}

namespace {

CoefficientScores unflatten(const Eigen::VectorXd& v, std::size_t p, std::size_t dim) {
  CoefficientScores B(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < p; ++j)
    B.row(static_cast<Eigen::Index>(j)) = v.segment(static_cast<Eigen::Index>(j * dim), static_cast<Eigen::Index>(dim)).transpose();
  return B;
}

CoefficientScores ridge_solution(const DetectionProblem& problem, double eps) {
  Eigen::MatrixXd a = problem.xtx;
  a.diagonal().array() += eps;
  return unflatten(solve_spd(a, problem.xty).x, problem.p, problem.dim);
}

}  // namespace

CoefficientScores initial_coefficients(const DetectionProblem& problem, const Initialization& init) {
  const std::size_t pd = problem.p * problem.dim;
  const double default_eps = 1e-4 * problem.xtx.trace() / static_cast<double>(pd);
  switch (init.kind) {
    case InitKind::Given:
      if (static_cast<std::size_t>(init.given.rows()) != problem.p ||
          static_cast<std::size_t>(init.given.cols()) != problem.dim)
        throw ConfigError("given initial B must be p x D");
      return init.given;
    case InitKind::Ridge:
      return ridge_solution(problem, init.ridge_epsilon > 0.0 ? init.ridge_epsilon : default_eps);
    case InitKind::Ols:
      return unflatten(solve_spd(problem.xtx, problem.xty).x, problem.p, problem.dim);
    case InitKind::Auto:
      if (problem.num_samples > pd) return unflatten(solve_spd(problem.xtx, problem.xty).x, problem.p, problem.dim);
      return ridge_solution(problem, default_eps > 0.0 ? default_eps : 1e-4);
  }
  return {};
}

CoefficientScores b_update(const DetectionProblem& problem, const Eigen::MatrixXd& M, const Eigen::MatrixXd& u,
                           const CoefficientScores& B_prev, double theta, kernels::Backend backend, double* jitter) {
  Eigen::MatrixXd W;
  kernels::wedge_all(backend, B_prev, W);
  if (M.rows() != W.rows() || M.cols() != W.cols() || u.rows() != W.rows() || u.cols() != W.cols())
    throw InvalidInput("M and u must be P x Q for the given B");
  // J(B)B = 2 wedge(B) because wedge is bilinear, so the linearized target
  // J B_prev - F(B_prev, M) - u/theta reduces to W + M - u/theta.
  const Eigen::MatrixXd target = W + M - u / theta;
  Eigen::MatrixXd jtj;
  Eigen::VectorXd jtt;
  kernels::constraint_normal_equations(backend, B_prev, target, jtj, jtt);
  Eigen::MatrixXd lhs = problem.xtx + theta * jtj;
  Eigen::VectorXd rhs = problem.xty + theta * jtt;
  if (!lhs.allFinite() || !rhs.allFinite()) throw SolverFailure("non-finite entries in B-step system");
  LinearSolution sol = solve_spd(lhs, rhs);
  if (jitter) *jitter = sol.jitter;
  return unflatten(sol.x, problem.p, problem.dim);
}

CoefficientScores b_update(const Eigen::MatrixXd& M, const Eigen::MatrixXd& u, const CoefficientScores& B_prev,
                           const Eigen::MatrixXd& xi, const Eigen::VectorXd& y, double theta) {
  const auto prob = DetectionProblem::from_design(xi, y, static_cast<std::size_t>(B_prev.rows()),
                                                  static_cast<std::size_t>(B_prev.cols()));
  return b_update(prob, M, u, B_prev, theta);
}

ADMMState admm_solve(const DetectionProblem& problem, const DetectConfig& config, const ADMMState* warm) {
  config.validate();
  const double theta = config.theta;
  const auto pairs = static_cast<Eigen::Index>(kernels::pair_count(problem.p));
  const auto q = static_cast<Eigen::Index>(kernels::wedge_length(problem.dim));

  ADMMState st;
  if (warm && warm->B.size() > 0) {
    st.B = warm->B;
    st.u = warm->u.size() > 0 ? warm->u : Eigen::MatrixXd::Zero(pairs, q);
  } else {
    st.B = initial_coefficients(problem, config.init);
    st.u = Eigen::MatrixXd::Zero(pairs, q);
  }
  if (static_cast<std::size_t>(st.B.rows()) != problem.p || static_cast<std::size_t>(st.B.cols()) != problem.dim ||
      st.u.rows() != pairs || st.u.cols() != q)
    throw InvalidInput("warm start has the wrong shape");

  Eigen::MatrixXd W, A(pairs, q);
  Eigen::VectorXd a(q), m(q);
  st.M.resize(pairs, q);
  for (int it = 1; it <= config.max_iter; ++it) {
    kernels::wedge_all(config.backend, st.B, W);
    A = W + st.u / theta;
    for (Eigen::Index r = 0; r < pairs; ++r) {
      a = A.row(r).transpose();
      prox_update(config.penalty, a, theta, m);
      st.M.row(r) = m.transpose();
    }

    double jitter = 0.0;
    CoefficientScores next = b_update(problem, st.M, st.u, st.B, theta, config.backend, &jitter);
    st.max_jitter = std::max(st.max_jitter, jitter);

    kernels::wedge_all(config.backend, next, W);
    const Eigen::MatrixXd residual = W - st.M;
    st.u += theta * residual;
    st.primal_residual = max_abs(residual);
    st.change = max_abs(next - st.B);
    st.B = std::move(next);
    st.iterations = it;
    if (!st.B.allFinite() || !st.u.allFinite() || !std::isfinite(st.primal_residual))
      throw SolverFailure("ADMM iterates became non-finite", it);
    if (st.primal_residual <= config.tol_primal && st.change <= config.tol_change) {
      st.converged = true;
      break;
    }
  }
  return st;
}

ADMMState admm_solve(const Eigen::MatrixXd& xi, const Eigen::VectorXd& y, std::size_t p, std::size_t dim,
                     const DetectConfig& config) {
  config.validate();
  return admm_solve(DetectionProblem::from_design(xi, y, p, dim), config);
}

GroupingStructure threshold_grouping(const CoefficientScores& B, double tilde_lambda, kernels::Backend backend) {
  if (!(tilde_lambda >= 0.0)) throw ConfigError("tilde_lambda must be >= 0");
  return partition_by_threshold(normalized_misalignment_matrix(B, backend), tilde_lambda);
}

void center_for_detection(Eigen::MatrixXd& xi, Eigen::VectorXd& y) {
  if (xi.rows() == 0) return;
  xi.rowwise() -= xi.colwise().mean();
  y.array() -= y.mean();
}

namespace {

PathPoint solve_point(const DetectionProblem& problem, const DetectConfig& base, double lambda, const ADMMState* warm,
                      ADMMState* out_state) {
  PathPoint pt;
  pt.lambda = lambda;
  try {
    DetectConfig cfg = base;
    cfg.penalty.lambda = lambda;
    ADMMState st = admm_solve(problem, cfg, warm);
    pt.B = st.B;
    pt.iterations = st.iterations;
    pt.primal_residual = st.primal_residual;
    pt.change = st.change;
    pt.converged = st.converged;
    pt.normalized = normalized_misalignment_matrix(st.B, base.backend);
    pt.grouping = partition_by_threshold(pt.normalized, base.tilde_lambda);
    pt.ok = true;
    if (out_state) *out_state = std::move(st);
  } catch (const SolverFailure& e) {
    pt.error = e.what();
  } catch (const DegenerateRow& e) {
    pt.error = e.what();
  }
  return pt;
}

}  // namespace

std::vector<PathPoint> detect_path(const ScoreMatrix& scores, const Eigen::VectorXd& y,
                                   const std::vector<double>& lambda_grid, const DetectConfig& config) {
  config.validate();
  if (lambda_grid.empty()) throw ConfigError("lambda grid is empty");
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end())) throw ConfigError("lambda grid must be ascending");
  for (double l : lambda_grid)
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("lambda grid values must be finite and >= 0");
  if (static_cast<std::size_t>(y.size()) != scores.num_samples()) throw InvalidInput("responses length must equal N");

  Eigen::MatrixXd xi = scores.flat();
  Eigen::VectorXd yc = y;
  center_for_detection(xi, yc);
  const auto problem = DetectionProblem::from_design(xi, yc, scores.num_covariates(), scores.dimension());

  std::vector<PathPoint> path(lambda_grid.size());
  if (config.warm_start) {
    ADMMState state;
    bool have_state = false;
    for (std::size_t g = 0; g < lambda_grid.size(); ++g) {
      ADMMState next;
      path[g] = solve_point(problem, config, lambda_grid[g], have_state ? &state : nullptr, &next);
      if (path[g].ok) {
        state = std::move(next);
        have_state = true;
      }
    }
  } else {
    const auto n = static_cast<long>(lambda_grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long g = 0; g < n; ++g)
      path[static_cast<std::size_t>(g)] = solve_point(problem, config, lambda_grid[static_cast<std::size_t>(g)], nullptr, nullptr);
  }
  return path;
}

std::vector<double> default_lambda_grid(const ScoreMatrix& scores, const Eigen::VectorXd& y, double theta,
                                        std::size_t count, double min_ratio, bool include_zero) {
  if (count < 2) throw ConfigError("lambda grid needs at least 2 points");
  if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw ConfigError("min_ratio must be in (0,1)");
  Eigen::MatrixXd xi = scores.flat();
  Eigen::VectorXd yc = y;
  center_for_detection(xi, yc);
  const auto problem = DetectionProblem::from_design(xi, yc, scores.num_covariates(), scores.dimension());
  const CoefficientScores B = initial_coefficients(problem, Initialization{});
  Eigen::MatrixXd W;
  kernels::serial::wedge_all(B, W);
  double wmax = W.rows() > 0 && W.cols() > 0 ? W.rowwise().norm().maxCoeff() : 0.0;
  if (!(wmax > 0.0)) wmax = 1.0;
  const double lmax = 2.0 * theta * wmax;
  std::vector<double> grid;
  if (include_zero) grid.push_back(0.0);
  const double lmin = lmax * min_ratio;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(count - 1);
    grid.push_back(lmin * std::pow(lmax / lmin, t));
  }
  grid.back() = lmax;
  return grid;
}

}  // namespace gmfr
