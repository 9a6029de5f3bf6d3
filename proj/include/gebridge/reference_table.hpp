#pragma once

#include <span>

#include "gebridge/kernels.hpp"

namespace gebridge {

/// Reference fidelity values for one configuration of the standard grid
/// (250 replications of 1200 slots, unit variance and slot duration).
struct ReferenceRow {
  double tc_over_d;
  double s_over_sigma;
  KernelFamily family;
  double max_gap;
  double dtv_ge;
  double dtv_second;
  double err_pct;
};

/// The 30 rows of the standard grid: t_c / d in {2, 5, 8, 10, 15},
/// s in {0, 0.5, 1}, both kernels.
std::span<const ReferenceRow> reference_table();

/// Looks up a grid point; nullptr when it is not part of the table.
const ReferenceRow* find_reference(double tc_over_d, double s_over_sigma, KernelFamily family);

/// Run-length TV before and after the order-2 correction at t_c / d = 8, s = 0.
struct ReferenceAnchor {
  KernelFamily family;
  double dtv_ge;
  double dtv_second;
};

std::span<const ReferenceAnchor> reference_anchors();

}  // namespace gebridge
