#include <doctest.h>

#include <cmath>

#include "gmfr/errors.hpp"
#include "gmfr/simgen.hpp"
#include "support.hpp"

using namespace gmfr;

TEST_SUITE("simgen") {

TEST_CASE("template formulas") {
  const Eigen::VectorXd v = template_scores(TemplateKind::VShape, 1.0, 5);
  CHECK(v[0] == 3.0);
  CHECK(v[2] == 1.0);
  CHECK(v[4] == 3.0);
  const Eigen::VectorXd f = template_scores(TemplateKind::FastDecay, 2.0, 3);
  CHECK(f[0] == 1.0);
  CHECK(f[2] == 0.25);
  const Eigen::VectorXd s = template_scores(TemplateKind::SlowDecay, 1.2, 2);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS(template_scores(TemplateKind::VShape, 1.0, 0), InvalidInput);
  CHECK(parse_template_kind("slow") == TemplateKind::SlowDecay);
  CHECK_THROWS_AS(parse_template_kind("zigzag"), ConfigError);
}

TEST_CASE("reference truth is the 3/4/3 layout") {
  CHECK(SimConfig::reference().truth().to_string() == "{1,2,3}{4,5,6,7}{8,9,10}");
}

TEST_CASE("generated data follow the model") {
  SimConfig c = SimConfig::reference();
  c.num_samples = 2000;
  c.noise_sd = 0.0;
  c.seed = 9;
  const SimDataset d = gen_dataset(c);
  CHECK(d.truth == c.truth());
  // Noiseless responses are exactly linear in the scores.
  CHECK((d.y - testing::linear_response(d.scores, d.B_true)).cwiseAbs().maxCoeff() < 1e-12);
  // Score variances follow d^{-1.2}.
  for (std::size_t dd = 0; dd < 5; ++dd) {
    const Eigen::VectorXd col = d.scores.flat().col(static_cast<Eigen::Index>(dd));
    const double var = col.squaredNorm() / static_cast<double>(col.size());
    CHECK(var == doctest::Approx(std::pow(dd + 1.0, -1.2)).epsilon(0.1));
  }
  // Curves are the basis expansions of the scores.
  const BasisSystem basis = build_fourier_basis(5, d.curves.grid());
  CHECK((project_scores(d.curves, basis).flat() - d.scores.flat()).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("same seed reproduces, noise level leaves scores unchanged") {
  SimConfig c = SimConfig::reference();
  c.num_samples = 50;
  const SimDataset a = gen_dataset(c), b = gen_dataset(c);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.curves.values() - b.curves.values()).cwiseAbs().maxCoeff() == 0.0);
  c.noise_sd = 3.0;
  const SimDataset noisy = gen_dataset(c);
  CHECK((noisy.scores.flat() - a.scores.flat()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((noisy.y - a.y).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("config validation and grouping rate") {
  SimConfig c = SimConfig::reference();
  c.scales.pop_back();
  CHECK_THROWS_AS(gen_dataset(c), ConfigError);
  c = SimConfig::reference();
  c.noise_sd = -1;
  CHECK_THROWS_AS(gen_dataset(c), ConfigError);
  const GroupingStructure t = SimConfig::reference().truth();
  CHECK(correct_grouping_rate({t, t, GroupingStructure::singletons(10), t}, t) == 0.75);
  CHECK_THROWS_AS(correct_grouping_rate({}, t), InvalidInput);
}

}  // TEST_SUITE
