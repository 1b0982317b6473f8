#include <doctest.h>

#include <fstream>

#include "gmfr/errors.hpp"
#include "gmfr/io.hpp"
#include "gmfr/simgen.hpp"
#include "support.hpp"

using namespace gmfr;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream out(p);
  out << s;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("format_double round-trips every double") {
  Rng rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.below(200)) - 100);
    CHECK(std::stod(io::format_double(v)) == v);
  }
}

TEST_CASE("csv round trips at full precision") {
  testing::TempDir dir("io");
  SimConfig c = SimConfig::reference();
  c.num_samples = 6;
  c.grid_points = 21;
  const SimDataset d = gen_dataset(c);

  io::write_scores_csv(dir.path() / "s.csv", d.scores);
  const ScoreMatrix s = io::read_scores_csv(dir.path() / "s.csv");
  CHECK(s.num_covariates() == 10);
  CHECK(s.dimension() == 5);
  CHECK((s.flat() - d.scores.flat()).cwiseAbs().maxCoeff() == 0.0);

  io::write_responses_csv(dir.path() / "y.csv", d.y);
  CHECK((io::read_responses_csv(dir.path() / "y.csv") - d.y).cwiseAbs().maxCoeff() == 0.0);

  io::write_curves_csv(dir.path() / "c.csv", d.curves);
  const io::CurveTable t = io::read_curves_csv(dir.path() / "c.csv");
  CHECK((t.grid - d.curves.grid()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((t.values - d.curves.values()).cwiseAbs().maxCoeff() == 0.0);

  io::write_partition(dir.path() / "p.txt", d.truth);
  CHECK(io::read_partition(dir.path() / "p.txt", 10) == d.truth);
}

TEST_CASE("rows may come in any order") {
  testing::TempDir dir("order");
  write_text(dir.path() / "y.csv", "sample_id,y\n2,5\n1,4\n");
  const Eigen::VectorXd y = io::read_responses_csv(dir.path() / "y.csv");
  CHECK(y[0] == 4.0);
  CHECK(y[1] == 5.0);
}

TEST_CASE("parse errors report the line") {
  testing::TempDir dir("bad");
  write_text(dir.path() / "y.csv", "sample_id,y\n1,4\n2,abc\n");
  try {
    io::read_responses_csv(dir.path() / "y.csv");
    FAIL("expected a parse error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  write_text(dir.path() / "s.csv", "sample_id,covariate_id,d,score\n1,1,1,0.5\n1,1,2\n");
  CHECK_THROWS_WITH_AS(io::read_scores_csv(dir.path() / "s.csv"), doctest::Contains(":3:"), InvalidInput);
  write_text(dir.path() / "gap.csv", "sample_id,y\n1,4\n3,5\n");
  CHECK_THROWS_AS(io::read_responses_csv(dir.path() / "gap.csv"), InvalidInput);
  write_text(dir.path() / "miss.csv", "1,1,1,0.5\n1,1,2,0.5\n2,1,1,0.5\n");
  CHECK_THROWS_AS(io::read_scores_csv(dir.path() / "miss.csv"), InvalidInput);
  CHECK_THROWS_AS(io::read_scores_csv(dir.path() / "none.csv"), InvalidInput);
}

TEST_CASE("partition parsing") {
  CHECK(io::parse_partition("1,2,3;4,5", 5).to_string() == "{1,2,3}{4,5}");
  CHECK(io::parse_partition("4, 5\n1,2,3\n", 5).to_string() == "{1,2,3}{4,5}");
  CHECK_THROWS_AS(io::parse_partition("1,2;3", 4), InvalidInput);
  CHECK_THROWS_AS(io::parse_partition("0,1", 2), InvalidInput);
  CHECK_THROWS_AS(io::parse_partition("", 2), InvalidInput);
}

TEST_CASE("grouped model json round trip") {
  SimConfig c = SimConfig::reference();
  c.num_samples = 60;
  const SimDataset d = gen_dataset(c);
  const GroupedModel m = fit_grouped(d.scores, d.y, d.truth);
  const nlohmann::json j = io::to_json(m);
  const GroupedModel back = io::grouped_model_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.delta == m.delta);
  CHECK(back.beta0 == m.beta0);
  CHECK((back.A - m.A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.f - m.f).cwiseAbs().maxCoeff() == 0.0);
  CHECK((predict(back, d.scores) - predict(m, d.scores)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("results carry schema version and manifest") {
  testing::TempDir dir("res");
  write_text(dir.path() / "in.txt", "abc");
  io::Manifest m{"test", {{"k", 1}}, 7, true, {{"in.txt", io::file_checksum(dir.path() / "in.txt")}}};
  io::write_result(dir.path() / "r.json", m, {{"value", 2.5}});
  const auto j = io::read_json(dir.path() / "r.json");
  CHECK(j["schema_version"] == io::kSchemaVersion);
  CHECK(j["manifest"]["seed"] == 7);
  CHECK(j["manifest"]["rng"] == std::string(Rng::kName));
  CHECK(j["manifest"]["inputs"][0]["fnv1a64"] == "e71fa2190541574b");
  CHECK(j["value"] == 2.5);
}

}  // TEST_SUITE
