#pragma once

#include <cmath>
#include <string>
#include <variant>

#include "bel/dataset.hpp"
#include "bel/error.hpp"

namespace bel {

enum class PriorKind { laplace, scad };

inline const char* to_string(PriorKind k) { return k == PriorKind::laplace ? "laplace" : "scad"; }

// How the shrinkage rate gamma is handled across iterations.
struct GammaFixed {
  double gamma = 1.0;
};
struct GammaEM {};
struct GammaHyperprior {
  double r = 1.0;            // shape of the Gamma prior on gamma^2
  double delta_prime = 1.0;  // rate of the Gamma prior on gamma^2
};
using GammaMode = std::variant<GammaFixed, GammaEM, GammaHyperprior>;

struct PriorSpec {
  PriorKind kind = PriorKind::laplace;
  GammaMode gamma_mode = GammaEM{};
  double scad_a = 3.7;

  void validate() const {
    if (!(scad_a > 2.0)) throw UsageError("prior.scad_a must exceed 2");
    if (auto* f = std::get_if<GammaFixed>(&gamma_mode); f && !(f->gamma > 0.0))
      throw UsageError("prior.gamma must be positive");
    if (auto* h = std::get_if<GammaHyperprior>(&gamma_mode);
        h && !(h->r > 0.0 && h->delta_prime > 0.0))
      throw UsageError("prior.r and prior.delta_prime must be positive");
  }
};

// Prior variances tau_j^2 of the normal scale mixture.
struct MixtureScales {
  Vector tau_sq;

  void validate() const {
    if (!tau_sq.allFinite() || (tau_sq.array() <= 0.0).any())
      throw NumericalError("mixture scales must be finite and positive");
  }
};

// Variance used for coordinates whose local SCAD rate is zero.
inline constexpr double kFlatPriorVariance = 1e6;

// Derivative of the SCAD penalty. At theta == gamma the first branch is used.
inline double scad_derivative(double theta_abs, double gamma, double a = 3.7) {
  if (theta_abs <= gamma) return gamma;
  const double slack = a * gamma - theta_abs;
  return slack > 0.0 ? slack / (a - 1.0) : 0.0;
}

inline double scad_penalty(double theta_abs, double gamma, double a = 3.7) {
  if (theta_abs <= gamma) return gamma * theta_abs;
  if (theta_abs <= a * gamma)
    return (2.0 * a * gamma * theta_abs - theta_abs * theta_abs - gamma * gamma) / (2.0 * (a - 1.0));
  return 0.5 * (a + 1.0) * gamma * gamma;
}

// Per-coordinate Laplace rates for the next sweep, linearizing SCAD at the
// previous state.
inline Vector local_linear_weights(const Vector& theta_prev, double gamma, double a = 3.7) {
  Vector w(theta_prev.size());
  for (Eigen::Index j = 0; j < theta_prev.size(); ++j)
    w(j) = scad_derivative(std::abs(theta_prev(j)), gamma, a);
  return w;
}

// Normal log density N(theta; 0, diag(tau_sq)) without the -p/2 log(2 pi)
// constant.
inline double log_conditional_prior(const Vector& theta, const MixtureScales& scales) {
  return -0.5 * (theta.array().square() / scales.tau_sq.array()).sum() -
         0.5 * scales.tau_sq.array().log().sum();
}

}  // namespace bel
