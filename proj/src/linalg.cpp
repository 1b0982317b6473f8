#include "gmfr/linalg.hpp"

#include <algorithm>

#include "gmfr/errors.hpp"

namespace gmfr {

namespace {

// Below this the factor exists only through rounding.
constexpr double kMinRcond = 1e-13;

}  // namespace

LinearSolution solve_spd(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  if (!A.allFinite() || !b.allFinite()) throw SolverFailure("non-finite entries in linear system");
  const Eigen::Index n = A.rows();
  LinearSolution out;
  if (n == 0) return out;
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() == Eigen::Success && llt.rcond() > kMinRcond) {
    out.x = llt.solve(b);
    if (out.x.allFinite()) return out;
  }
  double scale = A.diagonal().cwiseAbs().mean();
  if (!(scale > 0.0)) scale = 1.0;
  double jitter = 1e-10 * scale;
  for (int attempt = 0; attempt < 12; ++attempt, jitter *= 10.0) {
    Eigen::MatrixXd reg = A;
    reg.diagonal().array() += jitter;
    llt.compute(reg);
    if (llt.info() != Eigen::Success) continue;
    out.x = llt.solve(b);
    if (!out.x.allFinite()) continue;
    out.jitter = jitter;
    return out;
  }
  throw SolverFailure("linear system could not be factorized even with ridge jitter");
}

LeastSquaresFit least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, bool intercept) {
  if (X.rows() != y.size()) throw InvalidInput("design rows must match response length");
  LeastSquaresFit fit;
  if (X.cols() == 0) {
    fit.intercept = intercept && y.size() > 0 ? y.mean() : 0.0;
    fit.coef.resize(0);
    fit.fitted = Eigen::VectorXd::Constant(y.size(), fit.intercept);
    return fit;
  }
  if (intercept) {
    const Eigen::RowVectorXd xm = X.colwise().mean();
    const double ym = y.mean();
    const Eigen::MatrixXd xc = X.rowwise() - xm;
    const Eigen::VectorXd yc = y.array() - ym;
    LinearSolution s = solve_spd(xc.transpose() * xc, xc.transpose() * yc);
    fit.coef = std::move(s.x);
    fit.jitter = s.jitter;
    fit.intercept = ym - xm.dot(fit.coef);
  } else {
    LinearSolution s = solve_spd(X.transpose() * X, X.transpose() * y);
    fit.coef = std::move(s.x);
    fit.jitter = s.jitter;
  }
  fit.fitted = (X * fit.coef).array() + fit.intercept;
  return fit;
}

}  // namespace gmfr
