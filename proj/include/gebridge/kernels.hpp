#pragma once

#include <string>
#include <string_view>

#include "gebridge/special_functions.hpp"

namespace gebridge {

enum class KernelFamily {
  SquaredExponential,  // sigma2 * exp(-tau^2 / t_c^2)
  Exponential,         // sigma2 * exp(-|tau| / t_c), Ornstein-Uhlenbeck
};

/// Stationary covariance kernel. Time units are abstract; only ratios to the
/// slot duration matter downstream.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  double sigma2 = 1.0;
  double t_c = 1.0;

  /// Throws DomainError unless sigma2 > 0 and t_c > 0 (both finite).
  void validate() const;
};

std::string_view to_string(KernelFamily family);

/// Accepts "sqexp"/"squared-exponential"/"se" and "exp"/"exponential"/"ou".
KernelFamily parse_kernel_family(std::string_view name);

/// K(tau).
double evaluate(const KernelSpec& k, double tau);

/// rho = K(d) / K(0). The value is returned even when it rounds to 1; the
/// bridge rejects frozen channels itself.
Correlation one_step_correlation(const KernelSpec& k, double d);

/// rho_lag = K(lag * d) / K(0).
Correlation lag_k_correlation(const KernelSpec& k, double d, int lag);

/// rho_2 - rho_1^2: how far the sampled Gaussian sequence is from being
/// first-order Markov. Zero for the exponential kernel.
double gaussian_non_markovity(const KernelSpec& k, double d);

}  // namespace gebridge
