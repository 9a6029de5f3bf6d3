#include "gebridge/kernels.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace gebridge {

void KernelSpec::validate() const {
  if (!(std::isfinite(sigma2) && sigma2 > 0.0)) throw DomainError("kernel: sigma2 must be > 0");
  if (!(std::isfinite(t_c) && t_c > 0.0)) throw DomainError("kernel: t_c must be > 0");
}

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::SquaredExponential:
      return "sqexp";
    case KernelFamily::Exponential:
      return "exp";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  std::string lower(name);
  for (auto& ch : lower) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (lower == "sqexp" || lower == "squared-exponential" || lower == "se" || lower == "gaussian")
    return KernelFamily::SquaredExponential;
  if (lower == "exp" || lower == "exponential" || lower == "ou")
    return KernelFamily::Exponential;
  throw DomainError("unknown kernel family '" + std::string(name) + "'");
}

namespace {

// K(tau) / K(0)
double normalized(const KernelSpec& k, double tau) {
  const double x = std::abs(tau) / k.t_c;
  switch (k.family) {
    case KernelFamily::SquaredExponential:
      return std::exp(-x * x);
    case KernelFamily::Exponential:
      return std::exp(-x);
  }
  return 0.0;
}

}  // namespace

double evaluate(const KernelSpec& k, double tau) {
  k.validate();
  if (!std::isfinite(tau)) throw DomainError("kernel: tau must be finite");
  return k.sigma2 * normalized(k, tau);
}

Correlation one_step_correlation(const KernelSpec& k, double d) {
  return lag_k_correlation(k, d, 1);
}

Correlation lag_k_correlation(const KernelSpec& k, double d, int lag) {
  k.validate();
  if (!(std::isfinite(d) && d > 0.0)) throw DomainError("slot duration d must be > 0");
  if (lag < 1) throw DomainError("lag must be >= 1");
  if (k.family == KernelFamily::Exponential) {
    // exp(-lag d / t_c) == exp(-d / t_c)^lag up to rounding; keep the power
    // form so the Markov identity holds exactly.
    return Correlation(std::pow(normalized(k, d), lag));
  }
  return Correlation(normalized(k, static_cast<double>(lag) * d));
}

double gaussian_non_markovity(const KernelSpec& k, double d) {
  const double r1 = one_step_correlation(k, d).value();
  const double r2 = lag_k_correlation(k, d, 2).value();
  if (k.family == KernelFamily::SquaredExponential) {
    // exp(-4x) - exp(-2x) without cancellation for small x = d^2/t_c^2
    const double x = (d / k.t_c) * (d / k.t_c);
    return std::exp(-2.0 * x) * std::expm1(-2.0 * x);
  }
  return r2 - r1 * r1;
}

}  // namespace gebridge
