#include "gmfr/penalty.hpp"

#include <algorithm>
#include <cmath>

#include "gmfr/errors.hpp"

namespace gmfr {

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::TLasso: return "tlasso";
    case PenaltyKind::Mcp: return "mcp";
    case PenaltyKind::Scad: return "scad";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view name) {
  if (name == "tlasso" || name == "TLASSO") return PenaltyKind::TLasso;
  if (name == "mcp" || name == "MCP") return PenaltyKind::Mcp;
  if (name == "scad" || name == "SCAD") return PenaltyKind::Scad;
  throw ConfigError("unknown penalty '" + std::string(name) + "' (expected tlasso, mcp or scad)");
}

void PenaltySpec::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw ConfigError("penalty lambda must be finite and >= 0");
  if (!std::isfinite(gamma)) throw ConfigError("penalty gamma must be finite");
  if (kind == PenaltyKind::Scad) {
    if (!(gamma > 2.0)) throw ConfigError("SCAD requires gamma > 2");
  } else if (!(gamma > 0.0)) {
    throw ConfigError(std::string(to_string(kind)) + " requires gamma > 0");
  }
}

void PenaltySpec::validate_with_theta(double theta) const {
  validate();
  if (!std::isfinite(theta) || !(theta > 0.0)) throw ConfigError("theta must be finite and > 0");
  if (kind == PenaltyKind::Mcp && !(gamma * theta > 1.0))
    throw ConfigError("MCP prox requires gamma * theta > 1");
  if (kind == PenaltyKind::Scad && !(theta * (gamma - 1.0) > 1.0))
    throw ConfigError("SCAD prox requires theta * (gamma - 1) > 1");
}

double evaluate(const PenaltySpec& spec, double x) {
  if (!(x >= 0.0)) throw InvalidInput("penalty argument must be >= 0");
  const double lam = spec.lambda;
  const double g = spec.gamma;
  switch (spec.kind) {
    case PenaltyKind::TLasso:
      return std::min(lam * x, g * lam * lam);
    case PenaltyKind::Mcp:
      return x <= g * lam ? lam * x - x * x / (2.0 * g) : 0.5 * g * lam * lam;
    case PenaltyKind::Scad:
      if (x <= lam) return lam * x;
      if (x <= g * lam) return (2.0 * g * lam * x - x * x - lam * lam) / (2.0 * (g - 1.0));
      return 0.5 * lam * lam * (g + 1.0);
  }
  return 0.0;
}

namespace {

inline double soft_factor(double shrink, double norm) {
  return std::max(0.0, 1.0 - shrink / norm);
}

}  // namespace

double prox_scale(const PenaltySpec& spec, double norm, double theta) {
  if (!(norm > 0.0)) return 0.0;
  const double lam = spec.lambda;
  const double g = spec.gamma;
  switch (spec.kind) {
    case PenaltyKind::TLasso:
      if (norm < lam * (g + 0.5 / theta)) return soft_factor(lam / theta, norm);
      return 1.0;
    case PenaltyKind::Mcp:
      if (norm < g * lam) return soft_factor(lam / theta, norm) / (1.0 - 1.0 / (g * theta));
      return 1.0;
    case PenaltyKind::Scad:
      if (norm < lam * (1.0 + 1.0 / theta)) return soft_factor(lam / theta, norm);
      if (norm < g * lam) {
        const double tg = theta * (g - 1.0);
        return soft_factor(g * lam / tg, norm) / (1.0 - 1.0 / tg);
      }
      return 1.0;
  }
  return 1.0;
}

void prox_update(const PenaltySpec& spec, const Eigen::Ref<const Eigen::VectorXd>& a, double theta,
                 Eigen::Ref<Eigen::VectorXd> out) {
  const double norm = a.norm();
  const double s = prox_scale(spec, norm, theta);
  if (s == 0.0) {
    out.setZero();
  } else {
    out = s * a;
  }
}

Eigen::VectorXd prox_update(const PenaltySpec& spec, const Eigen::VectorXd& a, double theta) {
  if (!(theta > 0.0)) throw ConfigError("theta must be > 0");
  Eigen::VectorXd out(a.size());
  prox_update(spec, a, theta, out);
  return out;
}

}  // namespace gmfr
