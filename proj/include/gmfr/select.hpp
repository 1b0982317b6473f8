#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmfr/detect.hpp"
#include "gmfr/fit.hpp"
#include "gmfr/funcdata.hpp"
#include "gmfr/grouping.hpp"

namespace gmfr {

struct CVConfig {
  int reps = 100;
  double train_fraction = 2.0 / 3.0;
  std::uint64_t seed = 1;
  std::vector<double> lambda_grid;
  std::vector<double> tilde_lambda_grid{0.2};
  // OpenMP threads for replicate loops; 0 uses the runtime default.
  int jobs = 0;

  void validate() const;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

std::size_t train_size(std::size_t n, double train_fraction);

// Replicate rep of the Monte-Carlo splits; depends only on (n, fraction, seed, rep),
// so every candidate sees the same splits.
Split mccv_split(std::size_t n, double train_fraction, std::uint64_t seed, int rep);

struct MccvResult {
  double mean = 0.0;
  double sd = 0.0;
  std::vector<double> replicate_rmse;  // NaN for skipped replicates
  int skipped = 0;
  std::vector<std::string> warnings;
};

// Fits on the training rows and predicts the test rows.
using Predictor = std::function<Eigen::VectorXd(const ScoreMatrix& train, const Eigen::VectorXd& y_train,
                                                const ScoreMatrix& test)>;

// Average test RMSE over cv.reps splits. A replicate whose fit throws is
// skipped; more than 10% skipped is an error.
MccvResult mccv_evaluate(const ScoreMatrix& scores, const Eigen::VectorXd& y, const CVConfig& cv,
                         const Predictor& predictor);

MccvResult mccv_rmse(const GroupingStructure& delta, const ScoreMatrix& scores, const Eigen::VectorXd& y,
                     const CVConfig& cv);

Predictor grouped_predictor(const GroupingStructure& delta, FitOptions options = {});
Predictor ordinary_predictor();

struct CandidateScore {
  GroupingStructure delta;
  // Smallest lambda (then tilde lambda) producing this partition.
  double lambda = 0.0;
  double tilde_lambda = 0.0;
  std::vector<std::pair<double, double>> sources;
  MccvResult cv;
  bool failed = false;
  std::string error;
};

struct CVReport {
  std::vector<CandidateScore> candidates;  // sorted by canonical partition
  std::size_t selected = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<PathPoint> path;
  std::vector<std::string> warnings;

  const CandidateScore& best() const { return candidates.at(selected); }
};

// Index of the winner: minimum mean RMSE, then fewer groups, then smaller lambda.
std::size_t select_best(const std::vector<CandidateScore>& candidates);

// Candidate partitions from thresholding a detection path at each tilde lambda.
std::vector<CandidateScore> enumerate_candidates(const std::vector<PathPoint>& path,
                                                 const std::vector<double>& tilde_lambda_grid);

// Detection path on the full data, dedup of partitions over the (lambda,
// tilde lambda) grid, MCCV scoring of each distinct partition.
CVReport select_model(const ScoreMatrix& scores, const Eigen::VectorXd& y, const CVConfig& cv,
                      const DetectConfig& detect_config);

// Scores a fixed candidate list (no detection).
CVReport score_candidates(std::vector<CandidateScore> candidates, const ScoreMatrix& scores, const Eigen::VectorXd& y,
                          const CVConfig& cv);

struct MethodScore {
  std::string name;
  std::optional<GroupingStructure> delta;
  MccvResult cv;
};

// Runs detection and selection on the training rows only, then predicts with
// the selected partition. The inner MCCV uses cv as given.
Predictor selection_predictor(const CVConfig& cv, const DetectConfig& detect_config);

struct BaselineReport {
  std::vector<MethodScore> methods;  // Ordinary, Matrix, Grouped, [Oracle]
  CVReport selection;
  std::uint64_t evaluation_seed = 0;
  bool nested = true;
};

// Ordinary / Matrix / Grouped / Oracle(truth) compared on MCCV splits drawn
// from evaluation_seed. With nested set, Grouped repeats detection and
// selection inside every training split, so its error includes the cost of
// not knowing the partition; otherwise the full-data selection is refitted.
BaselineReport compare_methods(const ScoreMatrix& scores, const Eigen::VectorXd& y, const CVConfig& cv,
                               const DetectConfig& detect_config, std::uint64_t evaluation_seed,
                               const std::optional<GroupingStructure>& truth, bool nested = true);

}  // namespace gmfr
