#include <doctest.h>

#include "gmfr/errors.hpp"
#include "gmfr/penalty.hpp"
#include "support.hpp"

using namespace gmfr;

TEST_SUITE("penalty") {

TEST_CASE("penalty values at known points") {
  const PenaltySpec tl{PenaltyKind::TLasso, 1.0, 2.0};
  CHECK(evaluate(tl, 1.0) == 1.0);
  CHECK(evaluate(tl, 5.0) == 2.0);
  const PenaltySpec mcp{PenaltyKind::Mcp, 1.0, 2.0};
  CHECK(evaluate(mcp, 1.0) == 0.75);
  CHECK(evaluate(mcp, 3.0) == 1.0);
  const PenaltySpec scad{PenaltyKind::Scad, 1.0, 3.7};
  CHECK(evaluate(scad, 0.5) == 0.5);
  CHECK(evaluate(scad, 10.0) == doctest::Approx(0.5 * 4.7));
  CHECK_THROWS_AS(evaluate(scad, -1.0), InvalidInput);
}

TEST_CASE("SCAD closed form equals the integral of its derivative") {
  const double lam = 0.7, g = 3.2;
  const PenaltySpec scad{PenaltyKind::Scad, lam, g};
  // J'(x) = lambda up to lambda, then (gamma lambda - x)_+ / (gamma - 1).
  auto integral = [&](double x) {
    const int steps = 200000;
    const double h = x / steps;
    double sum = 0.0;
    for (int i = 0; i < steps; ++i) {
      const double m = (i + 0.5) * h;
      sum += h * (m <= lam ? lam : std::max(0.0, g * lam - m) / (g - 1.0));
    }
    return sum;
  };
  for (double x : {0.5, 1.0, 2.0, 3.0}) CHECK(evaluate(scad, x) == doctest::Approx(integral(x)).epsilon(1e-7));
}

TEST_CASE("penalties are continuous at branch boundaries") {
  for (auto kind : {PenaltyKind::TLasso, PenaltyKind::Mcp, PenaltyKind::Scad}) {
    const PenaltySpec s{kind, 0.8, 3.0};
    for (double x : {0.8, 2.4}) CHECK(evaluate(s, x - 1e-12) == doctest::Approx(evaluate(s, x + 1e-12)).epsilon(1e-10));
  }
}

TEST_CASE("prox examples") {
  Eigen::VectorXd a(2);
  a << 3.0, 4.0;  // norm 5
  SUBCASE("lambda 0 is the identity") {
    for (auto kind : {PenaltyKind::TLasso, PenaltyKind::Mcp, PenaltyKind::Scad})
      CHECK((prox_update({kind, 0.0, 3.0}, a, 1.0) - a).norm() == 0.0);
  }
  SUBCASE("MCP soft region is scaled up") {
    // norm 5 < gamma lambda = 6: (1 - 2/5) / (1 - 1/3) = 0.9
    const auto m = prox_update({PenaltyKind::Mcp, 2.0, 3.0}, a, 1.0);
    CHECK((m - 0.9 * a).norm() < 1e-14);
  }
  SUBCASE("zero vector maps to zero") {
    const auto m = prox_update({PenaltyKind::Scad, 1.0, 3.7}, Eigen::VectorXd::Zero(3), 1.0);
    CHECK(m.norm() == 0.0);
  }
  SUBCASE("large input is untouched") {
    CHECK((prox_update({PenaltyKind::Mcp, 1.0, 2.0}, a, 1.0) - a).norm() == 0.0);
  }
  SUBCASE("boundary tie goes to the identity branch") {
    // norm exactly gamma lambda
    CHECK(prox_scale({PenaltyKind::Mcp, 2.5, 2.0}, 5.0, 1.0) == 1.0);
  }
}

TEST_CASE("prox validity preconditions") {
  CHECK_THROWS_AS((PenaltySpec{PenaltyKind::Scad, 1.0, 2.0}.validate_with_theta(1.0)), ConfigError);
  CHECK_THROWS_AS((PenaltySpec{PenaltyKind::Scad, 1.0, 2.5}.validate_with_theta(0.6)), ConfigError);
  CHECK_NOTHROW((PenaltySpec{PenaltyKind::Scad, 1.0, 2.5}.validate_with_theta(2.5)));
  CHECK_THROWS_AS((PenaltySpec{PenaltyKind::Mcp, 1.0, 0.9}.validate_with_theta(1.0)), ConfigError);
  CHECK_NOTHROW((PenaltySpec{PenaltyKind::Mcp, 1.0, 0.9}.validate_with_theta(1.2)));
  CHECK_THROWS_AS((PenaltySpec{PenaltyKind::Mcp, -1.0, 2.0}.validate()), ConfigError);
  CHECK_THROWS_AS(parse_penalty_kind("lasso"), ConfigError);
  CHECK(parse_penalty_kind("scad") == PenaltyKind::Scad);
}

TEST_CASE("prox agrees with radial grid search on random draws") {
  Rng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const auto kind = static_cast<PenaltyKind>(trial % 3);
    const double lambda = testing::uniform(rng, 0.1, 2.0);
    const double theta = testing::uniform(rng, 0.5, 4.0);
    double gamma = testing::uniform(rng, 0.5, 4.0);
    if (kind == PenaltyKind::Mcp) gamma = 1.0 / theta + testing::uniform(rng, 0.05, 3.0);
    if (kind == PenaltyKind::Scad) gamma = std::max(2.0, 1.0 + 1.0 / theta) + testing::uniform(rng, 0.05, 3.0);
    const PenaltySpec spec{kind, lambda, gamma};
    const auto dim = static_cast<Eigen::Index>(1 + rng.below(3));
    const Eigen::VectorXd a = testing::normal_vector(rng, dim, lambda * gamma);
    const Eigen::VectorXd oracle = testing::prox_grid_search(spec, a, theta, 1e-4);
    CHECK((prox_update(spec, a, theta) - oracle).norm() < 1e-3);
  }
}

TEST_CASE("prox output may alias its input") {
  Eigen::VectorXd a(3);
  a << 0.5, -1.0, 0.25;
  const Eigen::VectorXd expected = prox_update({PenaltyKind::Scad, 0.3, 3.7}, a, 1.0);
  prox_update({PenaltyKind::Scad, 0.3, 3.7}, a, 1.0, a);
  CHECK((a - expected).norm() == 0.0);
}

}  // TEST_SUITE
