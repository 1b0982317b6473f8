#include "gmfr/select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <omp.h>

#include "gmfr/errors.hpp"
#include "gmfr/rng.hpp"

namespace gmfr {

void CVConfig::validate() const {
  if (reps < 1) throw ConfigError("MCCV needs reps >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train fraction must be in (0,1)");
  if (jobs < 0) throw ConfigError("jobs must be >= 0");
  for (double t : tilde_lambda_grid)
    if (!(t >= 0.0)) throw ConfigError("tilde lambda values must be >= 0");
}

std::size_t train_size(std::size_t n, double train_fraction) {
  return static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
}

Split mccv_split(std::size_t n, double train_fraction, std::uint64_t seed, int rep) {
  const std::size_t ntrain = train_size(n, train_fraction);
  if (ntrain == 0 || ntrain >= n) throw InvalidInput("MCCV split leaves an empty train or test set");
  Rng rng = Rng::derived(seed, static_cast<std::uint64_t>(rep));
  std::vector<std::size_t> perm = rng.permutation(n);
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(ntrain));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(ntrain), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

namespace {

Eigen::VectorXd take(const Eigen::VectorXd& y, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = y[static_cast<Eigen::Index>(idx[i])];
  return out;
}

}  // namespace

MccvResult mccv_evaluate(const ScoreMatrix& scores, const Eigen::VectorXd& y, const CVConfig& cv,
                         const Predictor& predictor) {
  cv.validate();
  const std::size_t n = scores.num_samples();
  if (static_cast<std::size_t>(y.size()) != n) throw InvalidInput("responses length must equal N");
  if (n < 6) throw InvalidInput("MCCV needs N >= 6");

  MccvResult res;
  res.replicate_rmse.assign(static_cast<std::size_t>(cv.reps), std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(static_cast<std::size_t>(cv.reps));
  const int threads = cv.jobs > 0 ? cv.jobs : 0;

#pragma omp parallel for schedule(dynamic) num_threads(threads > 0 ? threads : omp_get_max_threads())
  for (int rep = 0; rep < cv.reps; ++rep) {
    try {
      const Split split = mccv_split(n, cv.train_fraction, cv.seed, rep);
      const ScoreMatrix train = scores.rows(split.train);
      const ScoreMatrix test = scores.rows(split.test);
      const Eigen::VectorXd pred = predictor(train, take(y, split.train), test);
      res.replicate_rmse[static_cast<std::size_t>(rep)] = rmse(pred, take(y, split.test));
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(rep)] = e.what();
    }
  }

  double sum = 0.0;
  int used = 0;
  for (int rep = 0; rep < cv.reps; ++rep) {
    const double r = res.replicate_rmse[static_cast<std::size_t>(rep)];
    if (std::isfinite(r)) {
      sum += r;
      ++used;
    } else {
      ++res.skipped;
      const auto& msg = errors[static_cast<std::size_t>(rep)];
      res.warnings.push_back("replicate " + std::to_string(rep) + " skipped" + (msg.empty() ? "" : ": " + msg));
    }
  }
  if (used == 0 || static_cast<double>(res.skipped) > 0.1 * static_cast<double>(cv.reps))
    throw SolverFailure("MCCV: " + std::to_string(res.skipped) + " of " + std::to_string(cv.reps) +
                        " replicates failed");
  res.mean = sum / used;
  double ss = 0.0;
  for (double r : res.replicate_rmse)
    if (std::isfinite(r)) ss += (r - res.mean) * (r - res.mean);
  res.sd = used > 1 ? std::sqrt(ss / (used - 1)) : 0.0;
  return res;
}

Predictor grouped_predictor(const GroupingStructure& delta, FitOptions options) {
  return [delta, options](const ScoreMatrix& train, const Eigen::VectorXd& y_train, const ScoreMatrix& test) {
    return predict(fit_grouped(train, y_train, delta, options), test);
  };
}

Predictor ordinary_predictor() {
  return [](const ScoreMatrix& train, const Eigen::VectorXd& y_train, const ScoreMatrix& test) {
    return predict(fit_ordinary(train, y_train), test);
  };
}

MccvResult mccv_rmse(const GroupingStructure& delta, const ScoreMatrix& scores, const Eigen::VectorXd& y,
                     const CVConfig& cv) {
  if (delta.num_covariates() != scores.num_covariates())
    throw InvalidInput("grouping does not cover the p covariates of the data");
  return mccv_evaluate(scores, y, cv, grouped_predictor(delta));
}

std::size_t select_best(const std::vector<CandidateScore>& candidates) {
  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.failed) continue;
    if (best == candidates.size()) {
      best = i;
      continue;
    }
    const auto& b = candidates[best];
    const bool better = c.cv.mean < b.cv.mean ||
                        (c.cv.mean == b.cv.mean && (c.delta.num_groups() < b.delta.num_groups() ||
                                                    (c.delta.num_groups() == b.delta.num_groups() && c.lambda < b.lambda)));
    if (better) best = i;
  }
  if (best == candidates.size()) throw SolverFailure("all candidate grouping structures failed");
  return best;
}

std::vector<CandidateScore> enumerate_candidates(const std::vector<PathPoint>& path,
                                                 const std::vector<double>& tilde_lambda_grid) {
  std::map<GroupingStructure, CandidateScore> found;
  std::vector<double> tildes = tilde_lambda_grid;
  std::sort(tildes.begin(), tildes.end());
  for (const auto& pt : path) {
    if (!pt.ok) continue;
    for (double t : tildes) {
      GroupingStructure g = partition_by_threshold(pt.normalized, t);
      auto [it, inserted] = found.try_emplace(g);
      auto& c = it->second;
      if (inserted) {
        c.delta = g;
        c.lambda = pt.lambda;
        c.tilde_lambda = t;
      } else if (pt.lambda < c.lambda || (pt.lambda == c.lambda && t < c.tilde_lambda)) {
        c.lambda = pt.lambda;
        c.tilde_lambda = t;
      }
      c.sources.emplace_back(pt.lambda, t);
    }
  }
  std::vector<CandidateScore> out;
  out.reserve(found.size());
  for (auto& [g, c] : found) out.push_back(std::move(c));
  return out;
}

CVReport score_candidates(std::vector<CandidateScore> candidates, const ScoreMatrix& scores, const Eigen::VectorXd& y,
                          const CVConfig& cv) {
  cv.validate();
  if (candidates.empty()) throw ConfigError("no candidate grouping structures");
  CVReport rep;
  rep.reps = cv.reps;
  rep.seed = cv.seed;
  rep.train_size = train_size(scores.num_samples(), cv.train_fraction);
  rep.test_size = scores.num_samples() - rep.train_size;
  for (auto& c : candidates) {
    try {
      c.cv = mccv_rmse(c.delta, scores, y, cv);
    } catch (const SolverFailure& e) {
      c.failed = true;
      c.error = e.what();
      rep.warnings.push_back("candidate " + c.delta.to_string() + " failed: " + e.what());
    }
  }
  rep.candidates = std::move(candidates);
  rep.selected = select_best(rep.candidates);
  return rep;
}

CVReport select_model(const ScoreMatrix& scores, const Eigen::VectorXd& y, const CVConfig& cv,
                      const DetectConfig& detect_config) {
  cv.validate();
  if (cv.lambda_grid.empty() || cv.tilde_lambda_grid.empty()) throw ConfigError("lambda grids must be nonempty");
  std::vector<PathPoint> path = detect_path(scores, y, cv.lambda_grid, detect_config);
  std::vector<std::string> path_warnings;
  for (const auto& pt : path)
    if (!pt.ok) path_warnings.push_back("lambda " + std::to_string(pt.lambda) + ": " + pt.error);
  std::vector<CandidateScore> candidates = enumerate_candidates(path, cv.tilde_lambda_grid);
  if (candidates.empty()) throw SolverFailure("detection failed at every lambda");
  CVReport rep = score_candidates(std::move(candidates), scores, y, cv);
  rep.path = std::move(path);
  rep.warnings.insert(rep.warnings.begin(), path_warnings.begin(), path_warnings.end());
  return rep;
}

Predictor selection_predictor(const CVConfig& cv, const DetectConfig& detect_config) {
  return [cv, detect_config](const ScoreMatrix& train, const Eigen::VectorXd& y_train, const ScoreMatrix& test) {
    const CVReport inner = select_model(train, y_train, cv, detect_config);
    return predict(fit_grouped(train, y_train, inner.best().delta), test);
  };
}

BaselineReport compare_methods(const ScoreMatrix& scores, const Eigen::VectorXd& y, const CVConfig& cv,
                               const DetectConfig& detect_config, std::uint64_t evaluation_seed,
                               const std::optional<GroupingStructure>& truth, bool nested) {
  BaselineReport out;
  out.selection = select_model(scores, y, cv, detect_config);
  out.evaluation_seed = evaluation_seed;
  out.nested = nested;
  CVConfig eval = cv;
  eval.seed = evaluation_seed;
  const std::size_t p = scores.num_covariates();

  out.methods.push_back({"Ordinary", std::nullopt, mccv_evaluate(scores, y, eval, ordinary_predictor())});
  const GroupingStructure all = GroupingStructure::single_group(p);
  out.methods.push_back({"Matrix", all, mccv_evaluate(scores, y, eval, grouped_predictor(all))});
  const GroupingStructure& chosen = out.selection.best().delta;
  const Predictor grouped = nested ? selection_predictor(cv, detect_config) : grouped_predictor(chosen);
  out.methods.push_back({"Grouped", chosen, mccv_evaluate(scores, y, eval, grouped)});
  if (truth) {
    if (truth->num_covariates() != p) throw InvalidInput("oracle grouping does not cover the p covariates");
    out.methods.push_back({"Oracle", *truth, mccv_evaluate(scores, y, eval, grouped_predictor(*truth))});
  }
  return out;
}

}  // namespace gmfr
