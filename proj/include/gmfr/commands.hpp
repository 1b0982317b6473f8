#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gmfr/detect.hpp"
#include "gmfr/fit.hpp"
#include "gmfr/funcdata.hpp"
#include "gmfr/select.hpp"
#include "gmfr/simgen.hpp"

// The pipeline steps behind the gmfr executable. Each command reads its
// inputs, runs the library, and writes result files; errors surface as the
// exception types in errors.hpp, which the executable maps to exit codes.
namespace gmfr::cmd {

// Directory for outputs when --out is not given: $GMFR_OUT_DIR, else ".".
std::filesystem::path default_output_dir();

enum class ScoreSource { Scores, Fourier, Eigen };

struct DataOptions {
  // A directory holding scores.csv / curves.csv and responses.csv; individual
  // paths below override it.
  std::filesystem::path data_dir;
  std::filesystem::path scores_path;
  std::filesystem::path curves_path;
  std::filesystem::path responses_path;
  ScoreSource source = ScoreSource::Scores;
  std::size_t dimension = 5;      // fourier
  double var_threshold = 0.99;    // eigen
};

struct LoadedData {
  ScoreMatrix scores;
  Eigen::VectorXd y;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, checksum
  nlohmann::json description;
};

LoadedData load_data(const DataOptions& options);

struct SimulateOptions {
  SimConfig sim = SimConfig::reference();
  std::filesystem::path out_dir;
};
void simulate(const SimulateOptions& options);

struct DetectOptions {
  DataOptions data;
  DetectConfig detect;
  std::vector<double> lambda_grid;  // empty: default_lambda_grid
  std::size_t grid_size = 40;
  double grid_min_ratio = 1e-3;
  int jobs = 1;
  std::filesystem::path out;
};
void detect(const DetectOptions& options);

struct FitCommandOptions {
  DataOptions data;
  std::string partition;  // inline "1,2,3;4,5"
  std::filesystem::path partition_path;
  FitOptions fit;
  std::filesystem::path out_dir;
};
void fit(const FitCommandOptions& options);

struct CvOptions {
  DataOptions data;
  DetectConfig detect;
  CVConfig cv;
  std::size_t grid_size = 40;
  double grid_min_ratio = 1e-3;
  // Candidate partitions to score directly, skipping detection when nonempty.
  std::vector<std::string> candidates;
  std::filesystem::path out;
};
void cv(const CvOptions& options);

struct BaselineOptions {
  DataOptions data;
  DetectConfig detect;
  CVConfig cv;
  std::size_t grid_size = 40;
  double grid_min_ratio = 1e-3;
  std::uint64_t evaluation_seed = 2;
  // Refit the full-data selection in each split instead of reselecting.
  bool fixed_partition = false;
  bool oracle = false;
  std::filesystem::path truth_path;
  std::filesystem::path out;
};
void baselines(const BaselineOptions& options);

}  // namespace gmfr::cmd
