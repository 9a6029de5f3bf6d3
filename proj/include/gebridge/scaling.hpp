#pragma once

#include <span>
#include <vector>

#include "gebridge/ge_bridge.hpp"
#include "gebridge/kernels.hpp"

namespace gebridge {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LineFit least_squares(std::span<const double> x, std::span<const double> y);

/// Closed-form persistence against its large-t_c asymptote at one t_c.
struct ScalingPoint {
  double t_c = 0.0;
  double rho = 0.0;
  double exact = 0.0;  // NaN when the channel is frozen at double precision
  double asymptote = 0.0;
  bool frozen = false;
};

/// Evaluates the closed forms along a t_c grid. Grid points whose one-step
/// correlation is numerically 1 are flagged instead of aborting the curve.
std::vector<ScalingPoint> scaling_curve(KernelFamily family, double sigma2, const LinkConfig& cfg,
                                        std::span<const double> tc_grid);

/// Slope of persistence against t_c, and the exponent of a power law fitted
/// in log-log coordinates, over the non-frozen points.
LineFit linear_fit(std::span<const ScalingPoint> points);
LineFit loglog_fit(std::span<const ScalingPoint> points);

}  // namespace gebridge
