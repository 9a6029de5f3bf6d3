#include "gebridge/scaling.hpp"

#include <cmath>
#include <limits>

namespace gebridge {

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("least squares: x and y differ in length");
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (x.size() < 2 || !(sxx > 0.0)) throw DomainError("least squares needs two distinct abscissae");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

std::vector<ScalingPoint> scaling_curve(KernelFamily family, double sigma2, const LinkConfig& cfg,
                                        std::span<const double> tc_grid) {
  cfg.validate();
  std::vector<ScalingPoint> out;
  out.reserve(tc_grid.size());
  for (double tc : tc_grid) {
    const KernelSpec k{family, sigma2, tc};
    k.validate();
    ScalingPoint p;
    p.t_c = tc;
    p.rho = one_step_correlation(k, cfg.d).value();
    p.asymptote = asymptotic_persistence(k, cfg);
    if (p.rho > kMaxCorrelation) {
      p.frozen = true;
      p.exact = std::numeric_limits<double>::quiet_NaN();
    } else {
      p.exact = ge_params(k, cfg).persistence;
    }
    out.push_back(p);
  }
  return out;
}

namespace {

template <class Tx, class Ty>
LineFit fit_points(std::span<const ScalingPoint> points, Tx tx, Ty ty) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (p.frozen) continue;
    x.push_back(tx(p.t_c));
    y.push_back(ty(p.exact));
  }
  return least_squares(x, y);
}

}  // namespace

LineFit linear_fit(std::span<const ScalingPoint> points) {
  return fit_points(points, [](double v) { return v; }, [](double v) { return v; });
}

LineFit loglog_fit(std::span<const ScalingPoint> points) {
  return fit_points(points, [](double v) { return std::log(v); }, [](double v) { return std::log(v); });
}

}  // namespace gebridge
