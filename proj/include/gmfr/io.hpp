#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "gmfr/detect.hpp"
#include "gmfr/fit.hpp"
#include "gmfr/funcdata.hpp"
#include "gmfr/grouping.hpp"
#include "gmfr/select.hpp"

// File formats. Ids in files are 1-based; numbers are written with 17
// significant digits so that parsing an emitted file reproduces every value.
//
//   curves.csv     sample_id,covariate_id,t,value
//   scores.csv     sample_id,covariate_id,d,score
//   responses.csv  sample_id,y
//   partition      one group per line, comma-separated covariate ids
//   results        JSON objects carrying "schema_version" and "manifest"
namespace gmfr::io {

inline constexpr int kSchemaVersion = 1;
inline constexpr std::string_view kVersion = "1.0.0";

std::string format_double(double v);

void write_curves_csv(const std::filesystem::path& path, const CurveSet& curves);
// Curves without responses; pair with read_responses_csv.
struct CurveTable {
  Eigen::VectorXd grid;
  std::size_t num_samples = 0;
  std::size_t num_covariates = 0;
  Eigen::MatrixXd values;  // (N*p) x T
};
CurveTable read_curves_csv(const std::filesystem::path& path);
CurveSet make_curve_set(CurveTable table, Eigen::VectorXd responses);

void write_scores_csv(const std::filesystem::path& path, const ScoreMatrix& scores);
ScoreMatrix read_scores_csv(const std::filesystem::path& path);

void write_responses_csv(const std::filesystem::path& path, const Eigen::VectorXd& y);
Eigen::VectorXd read_responses_csv(const std::filesystem::path& path);

void write_partition(const std::filesystem::path& path, const GroupingStructure& g);
GroupingStructure read_partition(const std::filesystem::path& path, std::size_t p);
// "1,2,3;4,5;6" (groups separated by ';' or newlines).
GroupingStructure parse_partition(std::string_view text, std::size_t p);

// FNV-1a 64-bit digest of a file's bytes, as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json grouping_to_json(const GroupingStructure& g);
GroupingStructure grouping_from_json(const nlohmann::json& j, std::size_t p);

nlohmann::json to_json(const GroupedModel& model);
GroupedModel grouped_model_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PathPoint& pt);
nlohmann::json to_json(const MccvResult& r);
nlohmann::json to_json(const CVReport& report);
nlohmann::json to_json(const BaselineReport& report);

struct Manifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  bool has_seed = false;
  std::vector<std::pair<std::string, std::string>> inputs;  // path, checksum

  nlohmann::json to_json() const;
};

// Writes {"schema_version", "manifest", <body fields>} with 2-space indentation.
void write_result(const std::filesystem::path& path, const Manifest& manifest, const nlohmann::json& body);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace gmfr::io
