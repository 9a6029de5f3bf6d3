#include "gebridge/ge_bridge.hpp"

#include <cmath>
#include <numbers>

namespace gebridge {

void LinkConfig::validate() const {
  if (!(std::isfinite(d) && d > 0.0)) throw DomainError("slot duration d must be > 0");
  if (!std::isfinite(s_norm)) throw DomainError("threshold s must be finite");
  if (std::abs(s_norm) > kMaxThreshold)
    throw DomainError("threshold |s| > 8 is outside the supported range");
}

GeParams ge_params_from_rho(Correlation rho, const LinkConfig& cfg) {
  cfg.validate();
  const double r = rho.value();
  if (r >= kMaxCorrelation) throw DomainError("frozen channel; use asymptotics");
  if (r < 0.0) throw DomainError("rho must be >= 0");

  const double s = cfg.s_norm;
  const double a = std::sqrt((1.0 - r) / (1.0 + r));
  const double n_cross = 2.0 * owens_t(s, a);
  const double q = normal_cdf(s);
  const double q_upper = normal_cdf(-s);

  GeParams g;
  g.rho = r;
  g.q = q;
  g.n_cross = n_cross;
  g.pi0 = q;
  g.pi1 = q_upper;
  g.p01 = n_cross / q;
  g.p10 = n_cross / q_upper;
  g.dwell0 = cfg.d / g.p01;
  g.dwell1 = cfg.d / g.p10;
  g.persistence = cfg.d * (q * q + q_upper * q_upper) / n_cross;
  return g;
}

GeParams ge_params(const KernelSpec& kernel, const LinkConfig& cfg) {
  cfg.validate();
  return ge_params_from_rho(one_step_correlation(kernel, cfg.d), cfg);
}

double persistence_symmetric(Correlation rho, double d) {
  if (!(std::isfinite(d) && d > 0.0)) throw DomainError("slot duration d must be > 0");
  const double r = rho.value();
  if (r >= kMaxCorrelation) throw DomainError("frozen channel; use asymptotics");
  if (r < 0.0) throw DomainError("rho must be >= 0");
  return 2.0 * d / (1.0 - (2.0 / std::numbers::pi) * std::asin(r));
}

double asymptotic_crossing(double s, Correlation rho) {
  const double r = rho.value();
  if (r < 0.0) throw DomainError("rho must be >= 0");
  return normal_pdf(s) * std::sqrt((1.0 - r) / std::numbers::pi);
}

double asymptotic_coefficient(double s) {
  const double q = normal_cdf(s);
  const double q_upper = normal_cdf(-s);
  return std::sqrt(std::numbers::pi) * (q * q + q_upper * q_upper) / normal_pdf(s);
}

double asymptotic_persistence(const KernelSpec& kernel, const LinkConfig& cfg) {
  kernel.validate();
  cfg.validate();
  const double coeff = asymptotic_coefficient(cfg.s_norm);
  switch (kernel.family) {
    case KernelFamily::SquaredExponential:
      return coeff * kernel.t_c;
    case KernelFamily::Exponential:
      return coeff * std::sqrt(cfg.d * kernel.t_c);
  }
  return 0.0;
}

}  // namespace gebridge
