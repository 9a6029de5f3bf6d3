#pragma once

#include "gebridge/kernels.hpp"
#include "gebridge/special_functions.hpp"

namespace gebridge {

/// Thresholds beyond this many standard deviations are rejected: Phi(-s)
/// underflows toward the double epsilon and p10 loses all meaning.
inline constexpr double kMaxThreshold = 8.0;

/// Slot duration and normalized threshold s = S / sigma.
struct LinkConfig {
  double d = 1.0;
  double s_norm = 0.0;

  void validate() const;
};

/// Two-state Gilbert-Elliott parameters matched to the thresholded process.
/// State 0 is "below threshold", state 1 is "at or above threshold".
struct GeParams {
  double p01 = 0.0;          // Pr(B(n+1)=1 | B(n)=0)
  double p10 = 0.0;          // Pr(B(n+1)=0 | B(n)=1)
  double pi0 = 0.0;          // stationary Pr(B=0) = Phi(s)
  double pi1 = 0.0;          // stationary Pr(B=1) = Phi(-s)
  double dwell0 = 0.0;       // d / p01
  double dwell1 = 0.0;       // d / p10
  double persistence = 0.0;  // steady-state expected time to next state change
  double q = 0.0;            // Phi(s)
  double n_cross = 0.0;      // Pr(Z0 < s, Z1 >= s) = 2 T(s, a)
  double rho = 0.0;          // one-step correlation the parameters were built from
};

/// Canonical entry point: GE parameters from a raw one-step correlation.
/// Throws DomainError for rho outside [0, 1 - 1e-12] ("frozen channel").
GeParams ge_params_from_rho(Correlation rho, const LinkConfig& cfg);

/// ge_params_from_rho(one_step_correlation(kernel, cfg.d), cfg).
GeParams ge_params(const KernelSpec& kernel, const LinkConfig& cfg);

/// Symmetric-threshold persistence 2d / (1 - (2/pi) asin(rho)).
double persistence_symmetric(Correlation rho, double d);

/// Leading-order crossing probability phi(s) sqrt((1 - rho) / pi).
double asymptotic_crossing(double s, Correlation rho);

/// sqrt(pi) (Phi(s)^2 + Phi(-s)^2) / phi(s), the common prefactor of the
/// large-t_c persistence laws.
double asymptotic_coefficient(double s);

/// Large-t_c persistence: coefficient * t_c for the squared-exponential
/// kernel, coefficient * sqrt(d * t_c) for the exponential kernel.
double asymptotic_persistence(const KernelSpec& kernel, const LinkConfig& cfg);

}  // namespace gebridge
