#include "gebridge/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "quadrature.hpp"

namespace gebridge {

namespace {

constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
constexpr double kInvTwoPi = 0.5 / std::numbers::pi;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite argument");
}

// Upper normal tail Q(x) = 1 - Phi(x), accurate in the right tail.
double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// T(h, a) for h >= 0 and 0 <= a <= 1. exp(-h^2/2) is pulled out of the
// integral so every summand is positive.
double owens_t_core(double h, double a) {
  const double upper = h > 0.0 ? std::min(a, 9.0 / h) : a;
  if (!(upper > 0.0)) return 0.0;
  const double step = h > 2.0 ? 1.0 / h : 0.5;
  const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil(upper / step)));
  const double width = upper / static_cast<double>(panels);
  const double half_h2 = 0.5 * h * h;

  const auto& rule = detail::gauss_legendre<20>();
  double sum = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double mid = width * (static_cast<double>(p) + 0.5);
    double panel = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double t = mid + 0.5 * width * rule.nodes[i];
      panel += rule.weights[i] * std::exp(-half_h2 * t * t) / (1.0 + t * t);
    }
    sum += panel;
  }
  return std::exp(-half_h2) * 0.5 * width * sum * kInvTwoPi;
}

// T(h, a) for h >= 0, a >= 0 (a may be +inf).
double owens_t_nonneg(double h, double a) {
  if (a == 0.0) return 0.0;
  if (h == 0.0) return std::atan(a) / (2.0 * std::numbers::pi);
  if (a <= 1.0) return owens_t_core(h, a);
  if (std::isinf(a)) return 0.5 * upper_tail(h);
  // T(h,a) + T(ah,1/a) = Q(h)/2 + Q(ah)/2 - Q(h) Q(ah)
  const double ah = a * h;
  const double qh = upper_tail(h);
  const double qah = upper_tail(ah);
  return 0.5 * qh + 0.5 * qah - qh * qah - owens_t_core(ah, 1.0 / a);
}

double owens_t_signed(double h, double a) {
  const double t = owens_t_nonneg(std::abs(h), std::abs(a));
  return a < 0.0 ? -t : t;
}

}  // namespace

Correlation::Correlation(double rho) : rho_(rho) {
  if (!std::isfinite(rho) || rho < -1.0 || rho > 1.0)
    throw DomainError("correlation must be a finite value in [-1, 1]");
}

double normal_pdf(double x) {
  require_finite(x, "normal_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double normal_cdf(double x) {
  require_finite(x, "normal_cdf");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
  if (p > 0.5) return -normal_quantile(1.0 - p);

  // Rational approximation (Acklam) followed by one Halley step.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

double owens_t(double h, double a) {
  require_finite(h, "owens_t");
  require_finite(a, "owens_t");
  return owens_t_signed(h, a);
}

double bivariate_orthant_cdf(double s, Correlation rho) {
  require_finite(s, "bivariate_orthant_cdf");
  const double r = rho.value();
  if (r < 0.0 || r > kMaxCorrelation)
    throw DomainError("bivariate_orthant_cdf: rho must lie in [0, 1 - 1e-12]");
  const double a = std::sqrt((1.0 - r) / (1.0 + r));
  return normal_cdf(s) - 2.0 * owens_t_nonneg(std::abs(s), a);
}

namespace detail {

double bivariate_normal_cdf(double x, double y, double r) {
  if (!(r > -1.0 && r < 1.0)) throw DomainError("bivariate_normal_cdf: |r| must be < 1");
  if (r == 0.0) return normal_cdf(x) * normal_cdf(y);
  if (x == 0.0 && y == 0.0) return 0.25 + std::asin(r) * kInvTwoPi;

  const double sr = std::sqrt((1.0 - r) * (1.0 + r));
  // A zero threshold is taken as the +0 limit; the CDF is continuous there.
  auto t_term = [&](double u, double v) {
    if (u == 0.0) return v > 0.0 ? 0.25 : -0.25;
    return owens_t_signed(u, (v - r * u) / (u * sr));
  };
  const bool x_pos = x >= 0.0;
  const bool y_pos = y >= 0.0;
  const double beta = (x_pos == y_pos) ? 0.0 : 0.5;
  return 0.5 * (normal_cdf(x) + normal_cdf(y)) - t_term(x, y) - t_term(y, x) - beta;
}

}  // namespace detail

double trivariate_orthant(const std::array<double, 3>& thresholds, Correlation rho1,
                          Correlation rho2) {
  for (double t : thresholds) {
    if (std::isnan(t)) throw DomainError("trivariate_orthant: NaN threshold");
  }
  const double r1 = rho1.value();
  const double r2 = rho2.value();
  const double det_factor = 1.0 + r2 - 2.0 * r1 * r1;
  if (!(std::abs(r1) < 1.0 && std::abs(r2) < 1.0 && det_factor > 0.0))
    throw DomainError("trivariate_orthant: correlation matrix is not positive definite");

  const double cond_var = (1.0 - r1) * (1.0 + r1);
  const double cond_sd = std::sqrt(cond_var);
  const double partial = (r2 - r1 * r1) / cond_var;
  if (!(std::abs(partial) < 1.0))
    throw DomainError("trivariate_orthant: correlation matrix is not positive definite");

  constexpr double kLimit = 8.0;
  const double lo = -kLimit;
  const double hi = std::min(thresholds[1], kLimit);
  if (!(hi > lo)) return 0.0;

  const double t0 = thresholds[0];
  const double t2 = thresholds[2];
  auto integrand = [&](double z) {
    const double x = std::isinf(t0) ? t0 : (t0 - r1 * z) / cond_sd;
    const double y = std::isinf(t2) ? t2 : (t2 - r1 * z) / cond_sd;
    double cond;
    if (x == -INFINITY || y == -INFINITY) {
      cond = 0.0;
    } else if (x == INFINITY) {
      cond = normal_cdf(y);
    } else if (y == INFINITY) {
      cond = normal_cdf(x);
    } else {
      cond = detail::bivariate_normal_cdf(x, y, partial);
    }
    return kInvSqrt2Pi * std::exp(-0.5 * z * z) * cond;
  };
  const auto panels =
      static_cast<std::size_t>(std::clamp(std::ceil((hi - lo) / cond_sd), 16.0, 4096.0));
  const double value = detail::integrate_adaptive(integrand, lo, hi, 1e-10, panels);
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace gebridge
