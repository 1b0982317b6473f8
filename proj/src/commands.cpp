#include "gmfr/commands.hpp"

#include <cstdlib>
#include <fstream>

#include <omp.h>

#include "gmfr/errors.hpp"
#include "gmfr/io.hpp"
#include "gmfr/rng.hpp"

namespace gmfr::cmd {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path default_output_dir() {
  const char* env = std::getenv("GMFR_OUT_DIR");
  return env && *env ? fs::path(env) : fs::path(".");
}

namespace {

fs::path pick(const fs::path& explicit_path, const fs::path& dir, const char* name) {
  if (!explicit_path.empty()) return explicit_path;
  if (dir.empty()) throw ConfigError(std::string("no data given: pass --data or the path to ") + name);
  return dir / name;
}

fs::path output_file(const fs::path& out, const char* name) { return out.empty() ? default_output_dir() / name : out; }

json penalty_json(const PenaltySpec& p) {
  return json{{"kind", std::string(to_string(p.kind))}, {"lambda", p.lambda}, {"gamma", p.gamma}};
}

json detect_config_json(const DetectConfig& c) {
  return json{{"penalty", penalty_json(c.penalty)},
              {"theta", c.theta},
              {"tilde_lambda", c.tilde_lambda},
              {"max_iter", c.max_iter},
              {"tol_primal", c.tol_primal},
              {"tol_change", c.tol_change},
              {"warm_start", c.warm_start},
              {"backend", c.backend == kernels::Backend::Serial ? "serial" : "parallel"}};
}

json cv_config_json(const CVConfig& c) {
  return json{{"reps", c.reps},
              {"train_fraction", c.train_fraction},
              {"seed", c.seed},
              {"lambda_grid", c.lambda_grid},
              {"tilde_lambda_grid", c.tilde_lambda_grid},
              {"jobs", c.jobs}};
}

std::vector<double> resolve_grid(const std::vector<double>& given, const ScoreMatrix& scores, const Eigen::VectorXd& y,
                                 const DetectConfig& detect, std::size_t count, double min_ratio) {
  if (!given.empty()) return given;
  if (count < 2) throw ConfigError("lambda grid size must be >= 2");
  if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw ConfigError("lambda grid ratio must be in (0,1)");
  return default_lambda_grid(scores, y, detect.theta, count, min_ratio, true);
}

}  // namespace

LoadedData load_data(const DataOptions& o) {
  LoadedData out;
  const fs::path responses = pick(o.responses_path, o.data_dir, "responses.csv");
  out.y = io::read_responses_csv(responses);
  out.inputs.emplace_back(responses.string(), io::file_checksum(responses));
  if (o.source == ScoreSource::Scores) {
    const fs::path path = pick(o.scores_path, o.data_dir, "scores.csv");
    out.scores = io::read_scores_csv(path);
    out.inputs.emplace_back(path.string(), io::file_checksum(path));
    out.description = {{"source", "scores"}};
  } else {
    const fs::path path = pick(o.curves_path, o.data_dir, "curves.csv");
    io::CurveTable table = io::read_curves_csv(path);
    out.inputs.emplace_back(path.string(), io::file_checksum(path));
    if (table.num_samples != static_cast<std::size_t>(out.y.size()))
      throw InvalidInput("curves have " + std::to_string(table.num_samples) + " samples but responses have " +
                         std::to_string(out.y.size()));
    const CurveSet curves = io::make_curve_set(std::move(table), out.y);
    if (o.source == ScoreSource::Fourier) {
      out.scores = project_scores(curves, build_fourier_basis(o.dimension, curves.grid()));
      out.description = {{"source", "fourier"}, {"dimension", o.dimension}};
    } else {
      const EigenbasisResult eb = build_eigenbasis(curves, o.var_threshold);
      out.scores = project_scores(curves, eb.basis);
      out.description = {{"source", "eigen"}, {"var_threshold", o.var_threshold}, {"dimension", eb.dimension}};
    }
  }
  if (out.scores.num_samples() != static_cast<std::size_t>(out.y.size()))
    throw InvalidInput("scores have " + std::to_string(out.scores.num_samples()) + " samples but responses have " +
                       std::to_string(out.y.size()));
  out.description["num_samples"] = out.scores.num_samples();
  out.description["num_covariates"] = out.scores.num_covariates();
  out.description["dimension"] = out.scores.dimension();
  return out;
}

void simulate(const SimulateOptions& o) {
  const SimDataset data = gen_dataset(o.sim);
  const fs::path dir = o.out_dir.empty() ? default_output_dir() : o.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create " + dir.string() + ": " + ec.message());

  io::write_curves_csv(dir / "curves.csv", data.curves);
  io::write_scores_csv(dir / "scores.csv", data.scores);
  io::write_responses_csv(dir / "responses.csv", data.y);
  io::write_partition(dir / "truth.txt", data.truth);

  json templates = json::array();
  for (auto t : o.sim.templates) templates.push_back(std::string(to_string(t)));
  io::Manifest m{"simulate",
                 {{"num_samples", o.sim.num_samples},
                  {"num_covariates", o.sim.num_covariates},
                  {"dimension", o.sim.dimension},
                  {"noise_sd", o.sim.noise_sd},
                  {"grid_points", o.sim.grid_points},
                  {"templates", templates},
                  {"scales", o.sim.scales}},
                 o.sim.seed,
                 true,
                 {}};
  io::write_result(dir / "manifest.json", m,
                   {{"files", {"curves.csv", "scores.csv", "responses.csv", "truth.txt"}},
                    {"truth", io::grouping_to_json(data.truth)},
                    {"coefficients", io::matrix_to_json(data.B_true)}});
}

void detect(const DetectOptions& o) {
  o.detect.validate();
  if (o.jobs < 0) throw ConfigError("jobs must be >= 0");
  const LoadedData data = load_data(o.data);
  const std::vector<double> grid =
      resolve_grid(o.lambda_grid, data.scores, data.y, o.detect, o.grid_size, o.grid_min_ratio);
  if (o.jobs > 0) omp_set_num_threads(o.jobs);
  const std::vector<PathPoint> path = detect_path(data.scores, data.y, grid, o.detect);

  json points = json::array();
  std::size_t failed = 0;
  for (const auto& pt : path) {
    points.push_back(io::to_json(pt));
    failed += !pt.ok;
  }
  if (failed == path.size()) throw SolverFailure("detection failed at every lambda");
  io::Manifest m{"detect", {{"detect", detect_config_json(o.detect)}, {"data", data.description}}, 0, false, data.inputs};
  io::write_result(output_file(o.out, "path.json"), m, {{"lambda_grid", grid}, {"path", points}});
}

void fit(const FitCommandOptions& o) {
  if (o.partition.empty() == o.partition_path.empty())
    throw ConfigError("give exactly one of --partition or --partition-file");
  if (o.fit.max_iter < 1 || !(o.fit.tol >= 0.0)) throw ConfigError("fit needs max_iter >= 1 and tol >= 0");
  const LoadedData data = load_data(o.data);
  const std::size_t p = data.scores.num_covariates();
  const GroupingStructure delta =
      o.partition.empty() ? io::read_partition(o.partition_path, p) : io::parse_partition(o.partition, p);

  const GroupedModel model = fit_grouped(data.scores, data.y, delta, o.fit);
  const Eigen::VectorXd fitted = predict(model, data.scores);

  const fs::path dir = o.out_dir.empty() ? default_output_dir() : o.out_dir;
  auto inputs = data.inputs;
  if (!o.partition_path.empty()) inputs.emplace_back(o.partition_path.string(), io::file_checksum(o.partition_path));
  io::Manifest m{"fit",
                 {{"partition", io::grouping_to_json(delta)},
                  {"max_iter", o.fit.max_iter},
                  {"tol", o.fit.tol},
                  {"data", data.description}},
                 0,
                 false,
                 inputs};
  json body = io::to_json(model);
  body["training_rmse"] = rmse(fitted, data.y);
  io::write_result(dir / "model.json", m, {{"model", body}});
  io::write_responses_csv(dir / "fitted.csv", fitted);
}

void cv(const CvOptions& o) {
  o.detect.validate();
  o.cv.validate();
  const LoadedData data = load_data(o.data);
  CVConfig cv = o.cv;
  CVReport report;
  if (!o.candidates.empty()) {
    std::vector<CandidateScore> cands;
    for (const auto& text : o.candidates) {
      CandidateScore c;
      c.delta = io::parse_partition(text, data.scores.num_covariates());
      cands.push_back(std::move(c));
    }
    std::sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) { return a.delta < b.delta; });
    for (std::size_t i = 1; i < cands.size(); ++i)
      if (cands[i].delta == cands[i - 1].delta) throw ConfigError("duplicate candidate " + cands[i].delta.to_string());
    report = score_candidates(std::move(cands), data.scores, data.y, cv);
  } else {
    cv.lambda_grid = resolve_grid(cv.lambda_grid, data.scores, data.y, o.detect, o.grid_size, o.grid_min_ratio);
    report = select_model(data.scores, data.y, cv, o.detect);
  }
  json path = json::array();
  for (const auto& pt : report.path) {
    json jp{{"lambda", pt.lambda}, {"ok", pt.ok}};
    if (pt.ok) jp["groups"] = io::grouping_to_json(pt.grouping);
    path.push_back(std::move(jp));
  }
  io::Manifest m{"cv",
                 {{"cv", cv_config_json(cv)}, {"detect", detect_config_json(o.detect)}, {"data", data.description}},
                 cv.seed,
                 true,
                 data.inputs};
  json body = io::to_json(report);
  body["path"] = path;
  io::write_result(output_file(o.out, "cv.json"), m, {{"report", body}});
}

void baselines(const BaselineOptions& o) {
  if (o.oracle && o.truth_path.empty()) throw ConfigError("the Oracle method needs a truth partition file (--truth)");
  o.detect.validate();
  o.cv.validate();
  const LoadedData data = load_data(o.data);
  std::optional<GroupingStructure> truth;
  auto inputs = data.inputs;
  if (!o.truth_path.empty()) {
    truth = io::read_partition(o.truth_path, data.scores.num_covariates());
    inputs.emplace_back(o.truth_path.string(), io::file_checksum(o.truth_path));
  }
  CVConfig cv = o.cv;
  cv.lambda_grid = resolve_grid(cv.lambda_grid, data.scores, data.y, o.detect, o.grid_size, o.grid_min_ratio);
  const BaselineReport report =
      compare_methods(data.scores, data.y, cv, o.detect, o.evaluation_seed, truth, !o.fixed_partition);
  io::Manifest m{"baselines",
                 {{"cv", cv_config_json(cv)},
                  {"detect", detect_config_json(o.detect)},
                  {"evaluation_seed", o.evaluation_seed},
                  {"nested_selection", !o.fixed_partition},
                  {"data", data.description}},
                 cv.seed,
                 true,
                 inputs};
  io::write_result(output_file(o.out, "baselines.json"), m, {{"report", io::to_json(report)}});
}

}  // namespace gmfr::cmd
