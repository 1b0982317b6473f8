// gmfr: grouped multiple functional regression from the command line.
//
//   gmfr simulate  --out DIR [--n 300 --s 1 --seed 1]
//   gmfr detect    --data DIR [--penalty mcp --gamma 2.1 --lambda-grid ...]
//   gmfr fit       --data DIR --partition "1,2,3;4,5,6,7;8,9,10"
//   gmfr cv        --data DIR [--reps 100 --seed 1]
//   gmfr baselines --data DIR [--truth DIR/truth.txt --oracle]
//
// Exit codes: 0 success, 2 input or configuration error, 3 solver failure.
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gmfr/commands.hpp"
#include "gmfr/errors.hpp"
#include "gmfr/io.hpp"

namespace {

using namespace gmfr;

struct Raw {
  std::string penalty = "mcp";
  std::string source = "scores";
  std::string backend = "serial";
  std::vector<std::string> templates;
  bool no_warm_start = false;
};

void add_data(CLI::App* app, cmd::DataOptions& d, Raw& raw) {
  app->add_option("--data", d.data_dir, "Directory with scores.csv/curves.csv and responses.csv");
  app->add_option("--scores", d.scores_path, "Scores CSV (sample_id,covariate_id,d,score)");
  app->add_option("--curves", d.curves_path, "Curves CSV (sample_id,covariate_id,t,value)");
  app->add_option("--responses", d.responses_path, "Responses CSV (sample_id,y)");
  app->add_option("--basis", raw.source, "Where scores come from: scores, fourier or eigen")
      ->check(CLI::IsMember({"scores", "fourier", "eigen"}))
      ->capture_default_str();
  app->add_option("--dim", d.dimension, "Fourier basis dimension")->capture_default_str();
  app->add_option("--var-threshold", d.var_threshold, "Explained-variance share for the eigenbasis")
      ->capture_default_str();
}

void add_detect(CLI::App* app, DetectConfig& c, Raw& raw) {
  app->add_option("--penalty", raw.penalty, "tlasso, mcp or scad")->capture_default_str();
  app->add_option("--gamma", c.penalty.gamma, "Penalty shape parameter")->capture_default_str();
  app->add_option("--theta", c.theta, "Augmented Lagrangian parameter")->capture_default_str();
  app->add_option("--tilde-lambda", c.tilde_lambda, "Grouping threshold on normalized misalignment")
      ->capture_default_str();
  app->add_option("--max-iter", c.max_iter, "ADMM iteration cap")->capture_default_str();
  app->add_option("--tol-primal", c.tol_primal, "ADMM primal residual tolerance")->capture_default_str();
  app->add_option("--tol-change", c.tol_change, "ADMM coefficient change tolerance")->capture_default_str();
  app->add_flag("--no-warm-start", raw.no_warm_start, "Solve each lambda from the initial estimate");
  app->add_option("--backend", raw.backend, "Kernel implementation: serial or parallel")
      ->check(CLI::IsMember({"serial", "parallel"}))
      ->capture_default_str();
}

void add_grid(CLI::App* app, std::vector<double>& grid, std::size_t& size, double& ratio) {
  app->add_option("--lambda-grid", grid, "Comma-separated ascending lambda values (default: automatic)")
      ->delimiter(',');
  app->add_option("--grid-size", size, "Points in the automatic lambda grid")->capture_default_str();
  app->add_option("--grid-min-ratio", ratio, "Smallest positive lambda as a share of the largest")
      ->capture_default_str();
}

void add_cv(CLI::App* app, CVConfig& c) {
  app->add_option("--reps", c.reps, "Monte-Carlo cross-validation replicates")->capture_default_str();
  app->add_option("--train-fraction", c.train_fraction, "Training share of each split")->capture_default_str();
  app->add_option("--seed", c.seed, "Seed of the splits")->capture_default_str();
  app->add_option("--tilde-lambda-grid", c.tilde_lambda_grid, "Comma-separated grouping thresholds")
      ->delimiter(',')
      ->capture_default_str();
  app->add_option("--jobs", c.jobs, "Threads for replicate loops (0: runtime default)")->capture_default_str();
}

void resolve(cmd::DataOptions& d, DetectConfig* c, const Raw& raw) {
  d.source = raw.source == "fourier" ? cmd::ScoreSource::Fourier
             : raw.source == "eigen" ? cmd::ScoreSource::Eigen
                                     : cmd::ScoreSource::Scores;
  if (c) {
    c->penalty.kind = parse_penalty_kind(raw.penalty);
    c->warm_start = !raw.no_warm_start;
    c->backend = raw.backend == "parallel" ? kernels::Backend::Parallel : kernels::Backend::Serial;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grouped multiple functional regression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(io::kVersion));

  Raw raw;

  cmd::SimulateOptions sim;
  auto* s = app.add_subcommand("simulate", "Generate a seeded synthetic dataset");
  s->add_option("--n", sim.sim.num_samples, "Samples")->capture_default_str();
  s->add_option("--s", sim.sim.noise_sd, "Noise standard deviation")->capture_default_str();
  s->add_option("--seed", sim.sim.seed, "Generator seed")->capture_default_str();
  s->add_option("--dim", sim.sim.dimension, "Basis dimension D")->capture_default_str();
  s->add_option("--grid-points", sim.sim.grid_points, "Points of the [0,1] grid")->capture_default_str();
  s->add_option("--templates", raw.templates, "Per-covariate templates: v-shape, fast-decay, slow-decay")
      ->delimiter(',');
  s->add_option("--scales", sim.sim.scales, "Per-covariate scale coefficients")->delimiter(',');
  s->add_option("--out", sim.out_dir, "Output directory (default $GMFR_OUT_DIR or .)");

  cmd::DetectOptions det;
  Raw det_raw;
  auto* d = app.add_subcommand("detect", "Compute the grouping path over a lambda grid");
  add_data(d, det.data, det_raw);
  add_detect(d, det.detect, det_raw);
  add_grid(d, det.lambda_grid, det.grid_size, det.grid_min_ratio);
  d->add_option("--jobs", det.jobs, "Threads (0: runtime default)")->capture_default_str();
  d->add_option("--out", det.out, "Path file (default $GMFR_OUT_DIR/path.json)");

  cmd::FitCommandOptions fit;
  Raw fit_raw;
  auto* f = app.add_subcommand("fit", "Fit the grouped model for a given partition");
  add_data(f, fit.data, fit_raw);
  f->add_option("--partition", fit.partition, "Inline partition, e.g. \"1,2,3;4,5\"");
  f->add_option("--partition-file", fit.partition_path, "Partition file, one group per line");
  f->add_option("--max-iter", fit.fit.max_iter, "Block relaxation iteration cap")->capture_default_str();
  f->add_option("--tol", fit.fit.tol, "Relative objective change tolerance")->capture_default_str();
  f->add_option("--out", fit.out_dir, "Output directory for model.json and fitted.csv");

  cmd::CvOptions cvo;
  Raw cv_raw;
  auto* c = app.add_subcommand("cv", "Select the grouping structure by cross-validation");
  add_data(c, cvo.data, cv_raw);
  add_detect(c, cvo.detect, cv_raw);
  add_grid(c, cvo.cv.lambda_grid, cvo.grid_size, cvo.grid_min_ratio);
  add_cv(c, cvo.cv);
  c->add_option("--candidate", cvo.candidates, "Score this partition instead of detecting (repeatable)");
  c->add_option("--out", cvo.out, "Report file (default $GMFR_OUT_DIR/cv.json)");

  cmd::BaselineOptions base;
  Raw base_raw;
  auto* b = app.add_subcommand("baselines", "Compare Ordinary, Matrix, Grouped and Oracle models");
  add_data(b, base.data, base_raw);
  add_detect(b, base.detect, base_raw);
  add_grid(b, base.cv.lambda_grid, base.grid_size, base.grid_min_ratio);
  add_cv(b, base.cv);
  b->add_option("--evaluation-seed", base.evaluation_seed, "Seed of the comparison splits")->capture_default_str();
  b->add_flag("--fixed-partition", base.fixed_partition,
              "Evaluate the full-data selection instead of reselecting in every split");
  b->add_option("--truth", base.truth_path, "True partition file; adds the Oracle method");
  b->add_flag("--oracle", base.oracle, "Require the Oracle method");
  b->add_option("--out", base.out, "Report file (default $GMFR_OUT_DIR/baselines.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s) {
      if (!raw.templates.empty()) {
        sim.sim.templates.clear();
        for (const auto& t : raw.templates) sim.sim.templates.push_back(parse_template_kind(t));
        sim.sim.num_covariates = sim.sim.templates.size();
      }
      cmd::simulate(sim);
    } else if (*d) {
      resolve(det.data, &det.detect, det_raw);
      cmd::detect(det);
    } else if (*f) {
      resolve(fit.data, nullptr, fit_raw);
      cmd::fit(fit);
    } else if (*c) {
      resolve(cvo.data, &cvo.detect, cv_raw);
      cmd::cv(cvo);
    } else if (*b) {
      resolve(base.data, &base.detect, base_raw);
      cmd::baselines(base);
    }
  } catch (const SolverFailure& e) {
    std::cerr << "gmfr: solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "gmfr: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gmfr: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
