#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace gebridge {

/// Raised when an argument falls outside the mathematical domain of an
/// operation (non-finite input, correlation outside the supported range,
/// non-positive slot duration, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Correlation coefficient between two standardized Gaussian samples.
///
/// The type only guarantees a finite value in [-1, 1]. Each operation that
/// consumes a Correlation narrows the accepted range itself; most of the
/// closed forms here need 0 <= rho < 1.
class Correlation {
 public:
  explicit Correlation(double rho);
  [[nodiscard]] double value() const noexcept { return rho_; }

 private:
  double rho_;
};

/// Largest correlation accepted by the orthant routines. Anything closer to
/// one is treated as a frozen channel and rejected instead of clamped.
inline constexpr double kMaxCorrelation = 1.0 - 1e-12;

double normal_pdf(double x);
double normal_cdf(double x);

/// Inverse of normal_cdf on the open interval (0, 1).
double normal_quantile(double p);

/// Owen's T-function T(h, a) = (1/2pi) int_0^a exp(-h^2 (1+t^2)/2) / (1+t^2) dt.
///
/// Evaluated without subtractive cancellation: a > 1 is folded onto 1/a with
/// the reflection identity, and the remaining integral (with exp(-h^2/2)
/// factored out) is summed by composite Gauss-Legendre on panels scaled to
/// 1/|h|, truncated where the integrand drops below e^-40 of its peak.
/// Relative accuracy is near machine precision for |h| up to ~37.
double owens_t(double h, double a);

/// Equal-threshold bivariate normal CDF P(Z0 < s, Z1 < s) for unit
/// variances and correlation rho, via Phi(s) - 2 T(s, sqrt((1-rho)/(1+rho))).
/// Requires 0 <= rho <= kMaxCorrelation.
double bivariate_orthant_cdf(double s, Correlation rho);

/// P(Z0 < t0, Z1 < t1, Z2 < t2) for three consecutive samples of a
/// stationary unit-variance Gaussian sequence: corr(Z0,Z1) = corr(Z1,Z2) =
/// rho1 and corr(Z0,Z2) = rho2.
///
/// Integrates phi(z) * P(Z0 < t0, Z2 < t2 | Z1 = z) over z in [-8, min(t1, 8)]
/// with adaptive Gauss-Kronrod (absolute tolerance 1e-10). Throws DomainError
/// unless the 3x3 correlation matrix is positive definite.
double trivariate_orthant(const std::array<double, 3>& thresholds, Correlation rho1,
                          Correlation rho2);

namespace detail {

/// General bivariate normal CDF P(X < x, Y < y) with correlation r in (-1, 1),
/// through Owen's reduction to two T-function evaluations.
double bivariate_normal_cdf(double x, double y, double r);

}  // namespace detail

}  // namespace gebridge
