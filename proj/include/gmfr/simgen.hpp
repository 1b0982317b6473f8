#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "gmfr/funcdata.hpp"
#include "gmfr/grouping.hpp"

namespace gmfr {

enum class TemplateKind { VShape, FastDecay, SlowDecay };

std::string_view to_string(TemplateKind kind);
TemplateKind parse_template_kind(std::string_view name);

// V-shape: f * ((D+1)/2, ..., 2, 1, 2, ..., (D+1)/2)
// fast-decay: f * 2^{-d};  slow-decay: f * 1.2^{-d};  d = 1..D
Eigen::VectorXd template_scores(TemplateKind kind, double f, std::size_t dim);

struct SimConfig {
  std::size_t num_samples = 300;
  std::size_t num_covariates = 10;
  std::size_t dimension = 5;
  double noise_sd = 1.0;
  std::uint64_t seed = 1;
  std::size_t grid_points = 201;
  // Template of each covariate; defaults to the reference 3/4/3 layout.
  std::vector<TemplateKind> templates;
  std::vector<double> scales;

  static SimConfig reference();
  void validate() const;
  GroupingStructure truth() const;
};

// Reference scale coefficients of the 10-covariate design.
const std::vector<double>& reference_scales();
const std::vector<TemplateKind>& reference_templates();

struct SimDataset {
  ScoreMatrix scores;
  CurveSet curves;
  Eigen::VectorXd y;
  GroupingStructure truth;
  Eigen::MatrixXd B_true;  // p x D
};

// xi_{nj,d} ~ N(0, d^{-1.2}); y_n = sum_j <xi_nj, B_j> + N(0, s^2); curves
// synthesized from the Fourier basis on a uniform grid.
SimDataset gen_dataset(const SimConfig& config);

double correct_grouping_rate(const std::vector<GroupingStructure>& detected, const GroupingStructure& truth);

}  // namespace gmfr
