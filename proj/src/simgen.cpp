#include "gmfr/simgen.hpp"

#include <cmath>
#include <map>
#include <string>

#include "gmfr/errors.hpp"
#include "gmfr/rng.hpp"

namespace gmfr {

std::string_view to_string(TemplateKind kind) {
  switch (kind) {
    case TemplateKind::VShape: return "v-shape";
    case TemplateKind::FastDecay: return "fast-decay";
    case TemplateKind::SlowDecay: return "slow-decay";
  }
  return "unknown";
}

TemplateKind parse_template_kind(std::string_view name) {
  if (name == "v-shape" || name == "v") return TemplateKind::VShape;
  if (name == "fast-decay" || name == "fast") return TemplateKind::FastDecay;
  if (name == "slow-decay" || name == "slow") return TemplateKind::SlowDecay;
  throw ConfigError("unknown template '" + std::string(name) + "'");
}

Eigen::VectorXd template_scores(TemplateKind kind, double f, std::size_t dim) {
  if (dim == 0) throw InvalidInput("template dimension must be positive");
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  const double mid = (static_cast<double>(dim) + 1.0) / 2.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = static_cast<double>(i + 1);
    switch (kind) {
      case TemplateKind::VShape: v[static_cast<Eigen::Index>(i)] = std::abs(d - mid) + 1.0; break;
      case TemplateKind::FastDecay: v[static_cast<Eigen::Index>(i)] = std::pow(2.0, -d); break;
      case TemplateKind::SlowDecay: v[static_cast<Eigen::Index>(i)] = std::pow(1.2, -d); break;
    }
  }
  return f * v;
}

const std::vector<double>& reference_scales() {
  static const std::vector<double> f{0.57, 0.75, 0.92, 5.20, 6.76, 8.32, 6.24, 2.17, 2.83, 3.48};
  return f;
}

const std::vector<TemplateKind>& reference_templates() {
  using T = TemplateKind;
  static const std::vector<T> t{T::VShape,    T::VShape,    T::VShape,    T::FastDecay, T::FastDecay,
                                T::FastDecay, T::FastDecay, T::SlowDecay, T::SlowDecay, T::SlowDecay};
  return t;
}

SimConfig SimConfig::reference() {
  SimConfig c;
  c.templates = reference_templates();
  c.scales = reference_scales();
  return c;
}

void SimConfig::validate() const {
  if (num_samples < 1) throw ConfigError("N must be >= 1");
  if (num_covariates < 1) throw ConfigError("p must be >= 1");
  if (dimension < 1) throw ConfigError("D must be >= 1");
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw ConfigError("noise sd must be finite and >= 0");
  if (grid_points < 2) throw ConfigError("grid needs at least 2 points");
  if (templates.size() != num_covariates) throw ConfigError("one template per covariate is required");
  if (scales.size() != num_covariates) throw ConfigError("one scale coefficient per covariate is required");
}

GroupingStructure SimConfig::truth() const {
  std::vector<std::size_t> labels(templates.size());
  for (std::size_t j = 0; j < templates.size(); ++j) labels[j] = static_cast<std::size_t>(templates[j]);
  return GroupingStructure::from_labels(labels);
}

SimDataset gen_dataset(const SimConfig& config) {
  config.validate();
  const std::size_t n = config.num_samples;
  const std::size_t p = config.num_covariates;
  const std::size_t dim = config.dimension;

  Eigen::MatrixXd B(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < p; ++j)
    B.row(static_cast<Eigen::Index>(j)) = template_scores(config.templates[j], config.scales[j], dim).transpose();

  Eigen::VectorXd sd(static_cast<Eigen::Index>(dim));
  for (std::size_t d = 0; d < dim; ++d) sd[static_cast<Eigen::Index>(d)] = std::pow(static_cast<double>(d + 1), -0.6);

  // Draw order: sample-major scores, then noise, so changing s leaves scores fixed.
  Rng rng(config.seed);
  Eigen::MatrixXd flat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p * dim));
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < p; ++j)
      for (std::size_t d = 0; d < dim; ++d)
        flat(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j * dim + d)) = sd[static_cast<Eigen::Index>(d)] * rng.normal();

  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < p; ++j)
    y.noalias() += flat.middleCols(static_cast<Eigen::Index>(j * dim), static_cast<Eigen::Index>(dim)) *
                   B.row(static_cast<Eigen::Index>(j)).transpose();
  for (std::size_t s = 0; s < n; ++s) y[static_cast<Eigen::Index>(s)] += config.noise_sd * rng.normal();

  const Eigen::VectorXd grid = uniform_grid(config.grid_points);
  const BasisSystem basis = build_fourier_basis(dim, grid);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(n * p), grid.size());
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t j = 0; j < p; ++j)
      values.row(static_cast<Eigen::Index>(s * p + j)) =
          flat.block(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j * dim), 1, static_cast<Eigen::Index>(dim)) * basis.eval;

  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("X" + std::to_string(j + 1));

  return SimDataset{ScoreMatrix(p, dim, std::move(flat)), CurveSet(grid, n, p, std::move(values), y, std::move(names)),
                    y, config.truth(), std::move(B)};
}

double correct_grouping_rate(const std::vector<GroupingStructure>& detected, const GroupingStructure& truth) {
  if (detected.empty()) throw InvalidInput("grouping list is empty");
  std::size_t hits = 0;
  for (const auto& g : detected) hits += (g == truth);
  return static_cast<double>(hits) / static_cast<double>(detected.size());
}

}  // namespace gmfr
