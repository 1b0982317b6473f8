#include <doctest.h>

#include "gmfr/errors.hpp"
#include "gmfr/fit.hpp"
#include "gmfr/linalg.hpp"
#include "gmfr/simgen.hpp"
#include "support.hpp"

using namespace gmfr;

namespace {

GroupedModel random_model(Rng& rng, const GroupingStructure& delta, std::size_t dim) {
  GroupedModel m;
  m.delta = delta;
  m.beta0 = rng.normal();
  m.f = testing::normal_vector(rng, static_cast<Eigen::Index>(delta.num_covariates()));
  m.A = testing::normal_matrix(rng, static_cast<Eigen::Index>(delta.num_groups()), static_cast<Eigen::Index>(dim));
  return m;
}

}  // namespace

TEST_SUITE("fit") {

TEST_CASE("least squares and spd solver against QR") {
  Rng rng(3);
  const Eigen::MatrixXd X = testing::normal_matrix(rng, 30, 4);
  const Eigen::VectorXd y = testing::normal_vector(rng, 30);
  const LeastSquaresFit ls = least_squares(X, y, true);
  CHECK((ls.fitted - testing::ols_fitted(X, y)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(ls.jitter == 0.0);

  // Rank-deficient system still returns a finite solution, flagged by jitter.
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 3);
  A(0, 0) = 1.0;
  const LinearSolution s = solve_spd(A, Eigen::Vector3d(1.0, 0.0, 0.0));
  CHECK(s.jitter > 0.0);
  CHECK(s.x.allFinite());
  CHECK(s.x[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("normalize example and properties") {
  GroupedModel m;
  m.delta = GroupingStructure::single_group(1);
  m.f = Eigen::VectorXd::Constant(1, 3.0);
  m.A = Eigen::RowVector2d(-2.0, 0.0);
  const GroupedModel n = normalize(m);
  CHECK(n.A(0, 0) == 1.0);
  CHECK(n.A(0, 1) == 0.0);
  CHECK(n.f[0] == -6.0);

  GroupedModel lead_zero = m;
  lead_zero.A = Eigen::RowVector2d(0.0, -4.0);
  CHECK(normalize(lead_zero).A(0, 1) == 1.0);

  GroupedModel zero = m;
  zero.A.setZero();
  CHECK_THROWS_AS(normalize(zero), DegenerateRow);

  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const GroupingStructure delta = GroupingStructure::from_labels({0, 1, 0, 2, 1});
    const GroupedModel raw = random_model(rng, delta, 4);
    const GroupedModel once = normalize(raw);
    const GroupedModel twice = normalize(once);
    CHECK((raw.coefficient_rows() - once.coefficient_rows()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((once.A - twice.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((once.f - twice.f).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index k = 0; k < once.A.rows(); ++k) CHECK(once.A.row(k).norm() == doctest::Approx(1.0));
  }
}

TEST_CASE("predict examples") {
  Rng rng(5);
  const GroupedModel m = random_model(rng, GroupingStructure::from_labels({0, 0, 1}), 3);
  const ScoreMatrix zero(3, 3, Eigen::MatrixXd::Zero(4, 9));
  CHECK((predict(m, zero).array() - m.beta0).abs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(predict(m, ScoreMatrix(2, 3, Eigen::MatrixXd::Zero(4, 6))), InvalidInput);
  // Predictions are sum_j <xi_j, f_j alpha_k(j)>.
  const ScoreMatrix s = testing::random_scores(rng, 6, 3, 3);
  const Eigen::VectorXd expected = testing::linear_response(s, m.coefficient_rows()).array() + m.beta0;
  CHECK((predict(m, s) - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("saturated grouping reproduces OLS fitted values") {
  Rng rng(7);
  const ScoreMatrix s = testing::random_scores(rng, 80, 4, 3);
  const Eigen::VectorXd y = testing::normal_vector(rng, 80);
  const GroupedModel m = fit_grouped(s, y, GroupingStructure::singletons(4));
  CHECK((predict(m, s) - testing::ols_fitted(s.flat(), y)).cwiseAbs().maxCoeff() < 1e-6);
  const OrdinaryModel o = fit_ordinary(s, y);
  CHECK((predict(o, s) - testing::ols_fitted(s.flat(), y)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("noiseless grouped data are recovered") {
  SimConfig c = SimConfig::reference();
  c.noise_sd = 0.0;
  c.num_samples = 150;
  const SimDataset d = gen_dataset(c);
  const GroupedModel m = fit_grouped(d.scores, d.y, d.truth);
  CHECK(m.converged);
  CHECK((m.coefficient_rows() - d.B_true).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(rmse(predict(m, d.scores), d.y) < 1e-6);
}

TEST_CASE("single covariate: ordinary, matrix and grouped agree") {
  Rng rng(19);
  const ScoreMatrix s = testing::random_scores(rng, 50, 1, 4);
  const Eigen::VectorXd y = testing::normal_vector(rng, 50);
  const Eigen::VectorXd o = predict(fit_ordinary(s, y), s);
  CHECK((predict(fit_matrix_variate(s, y), s) - o).cwiseAbs().maxCoeff() < 1e-6);
  CHECK((predict(fit_grouped(s, y, GroupingStructure::singletons(1)), s) - o).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("objective trace is non-increasing") {
  Rng rng(23);
  for (int t = 0; t < 30; ++t) {
    const ScoreMatrix s = testing::random_scores(rng, 40, 5, 3);
    const Eigen::VectorXd y = testing::normal_vector(rng, 40);
    const GroupedModel m = fit_grouped(s, y, GroupingStructure::from_labels({0, 0, 1, 1, 1}));
    for (std::size_t i = 1; i < m.objective_trace.size(); ++i)
      CHECK(m.objective_trace[i] <= m.objective_trace[i - 1] + 1e-10);
  }
}

TEST_CASE("fitted values are unchanged when a covariate is rescaled") {
  SimConfig c = SimConfig::reference();
  c.num_samples = 120;
  const SimDataset d = gen_dataset(c);
  const Eigen::VectorXd base = predict(fit_grouped(d.scores, d.y, d.truth), d.scores);
  for (double factor : {0.1, 10.0}) {
    ScoreMatrix scaled = d.scores;
    scaled.scale_covariate(4, factor);
    const Eigen::VectorXd refit = predict(fit_grouped(scaled, d.y, d.truth), scaled);
    CHECK((refit - base).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("fit errors and warnings") {
  Rng rng(29);
  ScoreMatrix s = testing::random_scores(rng, 20, 3, 2);
  const Eigen::VectorXd y = testing::normal_vector(rng, 20);
  CHECK_THROWS_AS(fit_grouped(s, y, GroupingStructure::singletons(2)), InvalidInput);
  CHECK_THROWS_AS(fit_grouped(s, Eigen::VectorXd::Zero(5), GroupingStructure::singletons(3)), InvalidInput);
  FitOptions bad;
  bad.max_iter = 0;
  CHECK_THROWS_AS(fit_grouped(s, y, GroupingStructure::singletons(3), bad), ConfigError);

  ScoreMatrix dead = s;
  dead.scale_covariate(2, 0.0);
  CHECK_THROWS_AS(fit_grouped(dead, y, GroupingStructure::singletons(3)), InvalidInput);

  const ScoreMatrix tiny = testing::random_scores(rng, 6, 3, 2);
  const GroupedModel m = fit_grouped(tiny, Eigen::VectorXd::LinSpaced(6, 0, 1), GroupingStructure::singletons(3));
  CHECK_FALSE(m.warnings.empty());
}

}  // TEST_SUITE
