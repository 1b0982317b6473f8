#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "gmfr/commands.hpp"
#include "gmfr/errors.hpp"
#include "gmfr/io.hpp"
#include "support.hpp"

using namespace gmfr;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the gmfr executable; returns its exit code and leaves stderr in err.
int run(const std::string& args, std::string* err = nullptr, const std::string& env = "") {
  const fs::path log = fs::temp_directory_path() / ("gmfr_cli_err_" + std::to_string(::getpid()));
  const std::string cmd = env + " " + GMFR_CLI_PATH + " " + args + " >/dev/null 2>" + log.string();
  const int status = std::system(cmd.c_str());
  if (err) *err = slurp(log);
  fs::remove(log);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json strip_manifest(json j) {
  j.erase("manifest");
  return j;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate writes the dataset deterministically") {
  testing::TempDir dir("sim");
  const auto a = dir.path() / "a", b = dir.path() / "b";
  REQUIRE(run("simulate --n 40 --seed 5 --out " + a.string()) == 0);
  REQUIRE(run("simulate --n 40 --seed 5 --out " + b.string()) == 0);
  for (const char* f : {"curves.csv", "scores.csv", "responses.csv", "truth.txt"}) {
    CHECK(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(slurp(a / "truth.txt") == "1,2,3\n4,5,6,7\n8,9,10\n");
  const json m = io::read_json(a / "manifest.json");
  CHECK(m["schema_version"] == 1);
  CHECK(m["manifest"]["seed"] == 5);
  CHECK(m["coefficients"].size() == 10);
}

TEST_CASE("simulate with s = 0 is noiseless") {
  testing::TempDir dir("noiseless");
  REQUIRE(run("simulate --n 30 --s 0 --out " + dir.path().string()) == 0);
  const ScoreMatrix s = io::read_scores_csv(dir.path() / "scores.csv");
  const Eigen::VectorXd y = io::read_responses_csv(dir.path() / "responses.csv");
  const Eigen::MatrixXd B = io::matrix_from_json(io::read_json(dir.path() / "manifest.json")["coefficients"]);
  CHECK((testing::linear_response(s, B) - y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("output directory defaults to GMFR_OUT_DIR") {
  testing::TempDir dir("env");
  REQUIRE(run("simulate --n 10", nullptr, "GMFR_OUT_DIR=" + dir.path().string()) == 0);
  CHECK(fs::exists(dir.path() / "scores.csv"));
}

TEST_CASE("detect") {
  testing::TempDir dir("detect");
  REQUIRE(run("simulate --seed 2 --out " + dir.path().string()) == 0);
  const std::string data = " --data " + dir.path().string();

  SUBCASE("lambda 0 gives the OLS grouping only") {
    REQUIRE(run("detect --lambda-grid 0" + data + " --out " + (dir.path() / "p.json").string()) == 0);
    const json j = io::read_json(dir.path() / "p.json");
    REQUIRE(j["path"].size() == 1);
    const ScoreMatrix s = io::read_scores_csv(dir.path() / "scores.csv");
    const Eigen::VectorXd y = io::read_responses_csv(dir.path() / "responses.csv");
    const Eigen::MatrixXd B = io::matrix_from_json(j["path"][0]["coefficients"]);
    CHECK((B - testing::ols_rows(s, y)).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("default path reaches the true partition") {
    REQUIRE(run("detect --penalty mcp --gamma 2.1" + data + " --out " + (dir.path() / "p.json").string()) == 0);
    const json j = io::read_json(dir.path() / "p.json");
    bool found = false;
    for (const auto& pt : j["path"]) found = found || pt["groups"] == json::parse("[[1,2,3],[4,5,6,7],[8,9,10]]");
    CHECK(found);
  }
  SUBCASE("invalid SCAD configuration fails before solving") {
    std::string err;
    CHECK(run("detect --penalty scad --gamma 2.0 --theta 1" + data, &err) == 2);
    CHECK(err.find("SCAD") != std::string::npos);
  }
  SUBCASE("unknown penalty and descending grid are configuration errors") {
    CHECK(run("detect --penalty lasso" + data) == 2);
    CHECK(run("detect --lambda-grid 1,0.5" + data) == 2);
  }
  SUBCASE("fourier projection of the curves") {
    REQUIRE(run("detect --basis fourier --dim 5 --lambda-grid 0" + data + " --out " + (dir.path() / "f.json").string()) == 0);
    const json j = io::read_json(dir.path() / "f.json");
    CHECK(j["manifest"]["config"]["data"]["source"] == "fourier");
  }
}

TEST_CASE("malformed input reports the line number") {
  testing::TempDir dir("malformed");
  REQUIRE(run("simulate --n 12 --out " + dir.path().string()) == 0);
  {
    std::ofstream out(dir.path() / "responses.csv", std::ios::app);
    out << "13,not-a-number\n";
  }
  std::string err;
  CHECK(run("detect --lambda-grid 0 --data " + dir.path().string(), &err) == 2);
  CHECK(err.find("responses.csv:14:") != std::string::npos);
}

TEST_CASE("fit") {
  testing::TempDir dir("fit");
  REQUIRE(run("simulate --n 100 --s 0 --out " + dir.path().string()) == 0);
  const std::string data = " --data " + dir.path().string();
  REQUIRE(run("fit --partition-file " + (dir.path() / "truth.txt").string() + data + " --out " + dir.path().string()) == 0);
  const json m = io::read_json(dir.path() / "model.json");
  CHECK(m["model"]["training_rmse"].get<double>() < 1e-6);
  const Eigen::VectorXd fitted = io::read_responses_csv(dir.path() / "fitted.csv");
  const Eigen::VectorXd y = io::read_responses_csv(dir.path() / "responses.csv");
  CHECK((fitted - y).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(run("fit --partition \"1,2,3;4,5\"" + data) == 2);
  CHECK(run("fit" + data) == 2);
}

TEST_CASE("cv") {
  testing::TempDir dir("cv");
  REQUIRE(run("simulate --n 150 --seed 3 --out " + dir.path().string()) == 0);
  const std::string data = " --data " + dir.path().string();

  SUBCASE("single candidate, single replicate") {
    REQUIRE(run("cv --reps 1 --candidate \"1,2,3;4,5,6,7;8,9,10\"" + data + " --out " + (dir.path() / "c.json").string()) == 0);
    const json j = io::read_json(dir.path() / "c.json");
    CHECK(j["report"]["candidates"].size() == 1);
    CHECK(j["report"]["candidates"][0]["mccv"]["replicate_rmse"].size() == 1);
  }
  SUBCASE("grouped beats ordinary and matrix") {
    REQUIRE(run("cv --reps 30 --candidate \"1;2;3;4;5;6;7;8;9;10\" --candidate \"1,2,3,4,5,6,7,8,9,10\" "
                "--candidate \"1,2,3;4,5,6,7;8,9,10\"" + data + " --out " + (dir.path() / "c.json").string()) == 0);
    const json j = io::read_json(dir.path() / "c.json");
    CHECK(j["report"]["selected"]["groups"] == json::parse("[[1,2,3],[4,5,6,7],[8,9,10]]"));
  }
  SUBCASE("fixed seed gives an identical report") {
    const std::string args = "cv --reps 5 --grid-size 8 --jobs 2" + data + " --out ";
    REQUIRE(run(args + (dir.path() / "a.json").string()) == 0);
    REQUIRE(run(args + (dir.path() / "b.json").string()) == 0);
    const json a = io::read_json(dir.path() / "a.json"), b = io::read_json(dir.path() / "b.json");
    CHECK(strip_manifest(a).dump() == strip_manifest(b).dump());
    CHECK(a["manifest"]["config"] == b["manifest"]["config"]);
  }
}

TEST_CASE("baselines") {
  testing::TempDir dir("base");
  REQUIRE(run("simulate --n 90 --s 0 --templates v,v,v --scales 1,2,3 --out " + dir.path().string()) == 0);
  const std::string data = " --data " + dir.path().string();
  CHECK(run("baselines --oracle" + data) == 2);
  REQUIRE(run("baselines --reps 5 --grid-size 6 --truth " + (dir.path() / "truth.txt").string() + data + " --out " +
              (dir.path() / "b.json").string()) == 0);
  const json j = io::read_json(dir.path() / "b.json");
  REQUIRE(j["report"]["methods"].size() == 4);
  for (const auto& m : j["report"]["methods"]) CHECK(m["mccv"]["mean_rmse"].get<double>() < 1e-6);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
  CHECK(run("simulate --n abc") == 2);
}

}  // TEST_SUITE
