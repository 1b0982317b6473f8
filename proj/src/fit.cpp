#include "gmfr/fit.hpp"

#include <cmath>
#include <limits>

#include "gmfr/errors.hpp"
#include "gmfr/linalg.hpp"

namespace gmfr {

Eigen::MatrixXd GroupedModel::coefficient_rows() const {
  const auto member = delta.membership();
  Eigen::MatrixXd rows(f.size(), A.cols());
  for (Eigen::Index j = 0; j < f.size(); ++j)
    rows.row(j) = f[j] * A.row(static_cast<Eigen::Index>(member[static_cast<std::size_t>(j)]));
  return rows;
}

double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size() || a.size() == 0) throw InvalidInput("rmse needs equal nonempty vectors");
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

namespace {

// Least squares of r on the columns of Z whose mask entry is set; the
// remaining coefficients keep their value in x. Returns the jitter used.
double solve_masked(const Eigen::MatrixXd& Z, const Eigen::VectorXd& r, const std::vector<bool>& active,
                    Eigen::VectorXd& x) {
  std::vector<Eigen::Index> cols;
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i]) cols.push_back(static_cast<Eigen::Index>(i));
  if (cols.empty()) return 0.0;
  Eigen::MatrixXd sub(Z.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) sub.col(static_cast<Eigen::Index>(c)) = Z.col(cols[c]);
  // Columns frozen at nonzero values still contribute to the fit.
  Eigen::VectorXd target = r;
  for (Eigen::Index i = 0; i < Z.cols(); ++i)
    if (!active[static_cast<std::size_t>(i)] && x[i] != 0.0) target -= x[i] * Z.col(i);
  LinearSolution s = solve_spd(sub.transpose() * sub, sub.transpose() * target);
  for (std::size_t c = 0; c < cols.size(); ++c) x[cols[c]] = s.x[static_cast<Eigen::Index>(c)];
  return s.jitter;
}

struct Blocks {
  std::size_t p, dim, k;
  std::vector<std::size_t> member;
};

Eigen::VectorXd linear_part(const ScoreMatrix& scores, const Blocks& b, const Eigen::VectorXd& f,
                            const Eigen::MatrixXd& A) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(scores.num_samples()));
  for (std::size_t j = 0; j < b.p; ++j) {
    if (f[static_cast<Eigen::Index>(j)] == 0.0) continue;
    out.noalias() += f[static_cast<Eigen::Index>(j)] * (scores.block(j) * A.row(static_cast<Eigen::Index>(b.member[j])).transpose());
  }
  return out;
}

double half_rss(const Eigen::VectorXd& y, double beta0, const Eigen::VectorXd& lin) {
  return 0.5 * (y.array() - beta0 - lin.array()).matrix().squaredNorm();
}

}  // namespace

GroupedModel fit_grouped(const ScoreMatrix& scores, const Eigen::VectorXd& y, const GroupingStructure& delta,
                         const FitOptions& options) {
  const std::size_t n = scores.num_samples();
  const std::size_t p = scores.num_covariates();
  const std::size_t dim = scores.dimension();
  if (static_cast<std::size_t>(y.size()) != n) throw InvalidInput("responses length must equal N");
  if (n == 0) throw InvalidInput("fit needs at least one sample");
  if (delta.num_covariates() != p) throw InvalidInput("grouping does not cover the p covariates of the data");
  if (options.max_iter < 1 || !(options.tol > 0.0)) throw ConfigError("fit needs max_iter >= 1 and tol > 0");

  Blocks b{p, dim, delta.num_groups(), delta.membership()};
  GroupedModel model;
  model.delta = delta;

  for (std::size_t k = 0; k < b.k; ++k) {
    bool any = false;
    for (std::size_t j : delta.block(k)) any = any || scores.block(j).cwiseAbs().maxCoeff() > 0.0;
    if (!any) throw InvalidInput("group " + std::to_string(k + 1) + " has an all-zero design");
  }
  if (n <= b.k * dim + p + 1)
    model.warnings.push_back("N = " + std::to_string(n) + " does not exceed K*D + p + 1 = " +
                             std::to_string(b.k * dim + p + 1));

  Eigen::MatrixXd rows;
  if (options.initial_rows) {
    rows = *options.initial_rows;
    if (static_cast<std::size_t>(rows.rows()) != p || static_cast<std::size_t>(rows.cols()) != dim)
      throw InvalidInput("initial rows must be p x D");
  } else {
    LeastSquaresFit ls = least_squares(scores.flat(), y, true);
    if (ls.jitter > 0.0) model.warnings.push_back("initial least squares needed ridge jitter");
    rows.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(dim));
    for (std::size_t j = 0; j < p; ++j)
      rows.row(static_cast<Eigen::Index>(j)) = ls.coef.segment(static_cast<Eigen::Index>(j * dim), static_cast<Eigen::Index>(dim)).transpose();
  }

  // Template start: leading right singular vector of the group's rows scaled
  // to unit norm, so the start does not depend on covariate scaling.
  model.A.resize(static_cast<Eigen::Index>(b.k), static_cast<Eigen::Index>(dim));
  model.f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t k = 0; k < b.k; ++k) {
    const auto& members = delta.block(k);
    Eigen::MatrixXd stacked(static_cast<Eigen::Index>(members.size()), static_cast<Eigen::Index>(dim));
    bool any = false;
    for (std::size_t i = 0; i < members.size(); ++i) {
      const Eigen::RowVectorXd r = rows.row(static_cast<Eigen::Index>(members[i]));
      const double nr = r.norm();
      any = any || nr > 0.0;
      stacked.row(static_cast<Eigen::Index>(i)) = nr > 0.0 ? Eigen::RowVectorXd(r / nr) : r;
    }
    Eigen::VectorXd alpha = Eigen::VectorXd::Unit(static_cast<Eigen::Index>(dim), 0);
    if (any) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
      alpha = svd.matrixV().col(0);
    }
    model.A.row(static_cast<Eigen::Index>(k)) = alpha.transpose();
    for (std::size_t j : members) model.f[static_cast<Eigen::Index>(j)] = rows.row(static_cast<Eigen::Index>(j)).dot(alpha.transpose());
  }
  Eigen::VectorXd lin = linear_part(scores, b, model.f, model.A);
  model.beta0 = (y - lin).mean();
  double obj = half_rss(y, model.beta0, lin);
  model.objective_trace.push_back(obj);

  const double floor = std::max(1e-16 * 0.5 * (y.array() - y.mean()).square().sum(), std::numeric_limits<double>::min());
  Eigen::MatrixXd za(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(b.k * dim));
  Eigen::MatrixXd zf(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  std::vector<bool> active_a(b.k * dim), active_f(p);
  for (int it = 1; it <= options.max_iter; ++it) {
    // A given F, beta0
    za.setZero();
    for (std::size_t j = 0; j < p; ++j) {
      const double fj = model.f[static_cast<Eigen::Index>(j)];
      if (fj != 0.0) za.middleCols(static_cast<Eigen::Index>(b.member[j] * dim), static_cast<Eigen::Index>(dim)) += fj * scores.block(j);
    }
    for (std::size_t c = 0; c < b.k * dim; ++c) active_a[c] = za.col(static_cast<Eigen::Index>(c)).squaredNorm() > 0.0;
    Eigen::VectorXd a_flat(static_cast<Eigen::Index>(b.k * dim));
    for (std::size_t k = 0; k < b.k; ++k)
      a_flat.segment(static_cast<Eigen::Index>(k * dim), static_cast<Eigen::Index>(dim)) = model.A.row(static_cast<Eigen::Index>(k)).transpose();
    model.max_jitter = std::max(model.max_jitter, solve_masked(za, y.array() - model.beta0, active_a, a_flat));
    for (std::size_t k = 0; k < b.k; ++k)
      model.A.row(static_cast<Eigen::Index>(k)) = a_flat.segment(static_cast<Eigen::Index>(k * dim), static_cast<Eigen::Index>(dim)).transpose();

    // F given A, beta0
    for (std::size_t j = 0; j < p; ++j) {
      zf.col(static_cast<Eigen::Index>(j)) = scores.block(j) * model.A.row(static_cast<Eigen::Index>(b.member[j])).transpose();
      active_f[j] = zf.col(static_cast<Eigen::Index>(j)).squaredNorm() > 0.0;
    }
    model.max_jitter = std::max(model.max_jitter, solve_masked(zf, y.array() - model.beta0, active_f, model.f));

    // beta0 given both
    lin = zf * model.f;
    model.beta0 = (y - lin).mean();
    const double next = half_rss(y, model.beta0, lin);
    if (!std::isfinite(next)) throw SolverFailure("block relaxation produced a non-finite objective", it);
    model.objective_trace.push_back(next);
    model.iterations = it;
    const double prev = obj;
    obj = next;
    // Relative change, floored so that an objective decaying geometrically to
    // zero on exact data still terminates.
    if (std::abs(prev - next) <= options.tol * std::max(prev, floor) || next == 0.0) {
      model.converged = true;
      break;
    }
  }
  if (model.max_jitter > 0.0) model.warnings.push_back("singular least-squares step solved with ridge jitter");
  return normalize(std::move(model));
}

GroupedModel normalize(GroupedModel model) {
  const auto k_count = model.A.rows();
  model.c.resize(k_count);
  const auto member = model.delta.membership();
  for (Eigen::Index k = 0; k < k_count; ++k) {
    const double norm = model.A.row(k).norm();
    if (!(norm > 0.0)) throw DegenerateRow(static_cast<std::size_t>(k), "template has zero norm");
    double sign = 1.0;
    for (Eigen::Index d = 0; d < model.A.cols(); ++d)
      if (model.A(k, d) != 0.0) {
        sign = model.A(k, d) > 0.0 ? 1.0 : -1.0;
        break;
      }
    double c = sign * norm;
    // Already normalized up to rounding in the norm.
    if (std::abs(c - 1.0) <= 8.0 * std::numeric_limits<double>::epsilon()) c = 1.0;
    model.c[k] = c;
    if (c == 1.0) continue;
    model.A.row(k) /= c;
    for (std::size_t j = 0; j < member.size(); ++j)
      if (static_cast<Eigen::Index>(member[j]) == k) model.f[static_cast<Eigen::Index>(j)] *= c;
  }
  return model;
}

Eigen::VectorXd predict(const GroupedModel& model, const ScoreMatrix& scores) {
  if (static_cast<Eigen::Index>(scores.num_covariates()) != model.f.size() ||
      static_cast<Eigen::Index>(scores.dimension()) != model.A.cols())
    throw InvalidInput("score dimensions do not match the model");
  Blocks b{scores.num_covariates(), scores.dimension(), model.delta.num_groups(), model.delta.membership()};
  return linear_part(scores, b, model.f, model.A).array() + model.beta0;
}

OrdinaryModel fit_ordinary(const ScoreMatrix& scores, const Eigen::VectorXd& y) {
  if (static_cast<std::size_t>(y.size()) != scores.num_samples()) throw InvalidInput("responses length must equal N");
  LeastSquaresFit ls = least_squares(scores.flat(), y, true);
  OrdinaryModel m;
  m.intercept = ls.intercept;
  m.jitter = ls.jitter;
  const std::size_t p = scores.num_covariates();
  const std::size_t dim = scores.dimension();
  m.B.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < p; ++j)
    m.B.row(static_cast<Eigen::Index>(j)) = ls.coef.segment(static_cast<Eigen::Index>(j * dim), static_cast<Eigen::Index>(dim)).transpose();
  if (ls.jitter > 0.0) m.warnings.push_back("design is rank deficient; solved with ridge jitter");
  return m;
}

Eigen::VectorXd predict(const OrdinaryModel& model, const ScoreMatrix& scores) {
  if (static_cast<Eigen::Index>(scores.num_covariates()) != model.B.rows() ||
      static_cast<Eigen::Index>(scores.dimension()) != model.B.cols())
    throw InvalidInput("score dimensions do not match the model");
  Eigen::VectorXd out = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(scores.num_samples()), model.intercept);
  for (std::size_t j = 0; j < scores.num_covariates(); ++j)
    out.noalias() += scores.block(j) * model.B.row(static_cast<Eigen::Index>(j)).transpose();
  return out;
}

GroupedModel fit_matrix_variate(const ScoreMatrix& scores, const Eigen::VectorXd& y, const FitOptions& options) {
  return fit_grouped(scores, y, GroupingStructure::single_group(scores.num_covariates()), options);
}

}  // namespace gmfr
