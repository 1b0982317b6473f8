#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace gmfr {

enum class PenaltyKind { TLasso, Mcp, Scad };

std::string_view to_string(PenaltyKind kind);
PenaltyKind parse_penalty_kind(std::string_view name);

struct PenaltySpec {
  PenaltyKind kind = PenaltyKind::Mcp;
  double lambda = 0.0;
  double gamma = 2.1;

  // Domain of (lambda, gamma) on its own.
  void validate() const;
  // Whether the group prox is well posed for this augmented-Lagrangian weight.
  void validate_with_theta(double theta) const;
};

// J_lambda(x) for x >= 0.
double evaluate(const PenaltySpec& spec, double x);

// argmin_M (theta/2)||M - a||^2 + J_lambda(||M||), closed form per penalty.
//
// Ties at a branch boundary go to the later branch. Writes into out, which
// may alias a.
void prox_update(const PenaltySpec& spec, const Eigen::Ref<const Eigen::VectorXd>& a, double theta,
                 Eigen::Ref<Eigen::VectorXd> out);

Eigen::VectorXd prox_update(const PenaltySpec& spec, const Eigen::VectorXd& a, double theta);

// Radial factor s with prox(a) = s * a, for ||a|| = norm.
double prox_scale(const PenaltySpec& spec, double norm, double theta);

}  // namespace gmfr
