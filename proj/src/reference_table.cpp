#include "gebridge/reference_table.hpp"

#include <array>
#include <cmath>

namespace gebridge {

namespace {

constexpr auto SE = KernelFamily::SquaredExponential;
constexpr auto EX = KernelFamily::Exponential;

constexpr std::array<ReferenceRow, 30> kRows = {{
    {2, 0, SE, 0.0959, 0.1156, 0.0268, 0.19},   {2, 0, EX, 0.0568, 0.0715, 0.0171, 0.15},
    {2, 0.5, SE, 0.1136, 0.1388, 0.0219, 0.71}, {2, 0.5, EX, 0.0672, 0.0524, 0.0100, 0.12},
    {2, 1, SE, 0.1203, 0.1516, 0.0172, 0.33},   {2, 1, EX, 0.0657, 0.0408, 0.0062, 0.16},
    {5, 0, SE, 0.0697, 0.1555, 0.1090, 0.20},   {5, 0, EX, 0.1232, 0.1535, 0.0627, 0.74},
    {5, 0.5, SE, 0.0922, 0.1915, 0.1308, 0.83}, {5, 0.5, EX, 0.1316, 0.1253, 0.0413, 0.36},
    {5, 1, SE, 0.1177, 0.2093, 0.1399, 0.53},   {5, 1, EX, 0.1273, 0.1106, 0.0320, 0.78},
    {8, 0, SE, 0.0503, 0.1674, 0.1372, 0.80},   {8, 0, EX, 0.1545, 0.2038, 0.0882, 0.17},
    {8, 0.5, SE, 0.0656, 0.1910, 0.1540, 0.85}, {8, 0.5, EX, 0.1564, 0.1664, 0.0676, 2.01},
    {8, 1, SE, 0.0849, 0.2246, 0.1757, 1.83},   {8, 1, EX, 0.1563, 0.1473, 0.0517, 1.79},
    {10, 0, SE, 0.0396, 0.1635, 0.1378, 0.14},  {10, 0, EX, 0.1661, 0.2269, 0.1024, 0.20},
    {10, 0.5, SE, 0.0559, 0.2026, 0.1716, 2.18}, {10, 0.5, EX, 0.1721, 0.1881, 0.0848, 0.07},
    {10, 1, SE, 0.0738, 0.2307, 0.1909, 0.09},  {10, 1, EX, 0.1717, 0.1669, 0.0621, 1.46},
    {15, 0, SE, 0.0288, 0.1831, 0.1639, 0.89},  {15, 0, EX, 0.1850, 0.2551, 0.1300, 0.91},
    {15, 0.5, SE, 0.0390, 0.2076, 0.1873, 0.78}, {15, 0.5, EX, 0.1901, 0.2284, 0.1058, 0.37},
    {15, 1, SE, 0.0519, 0.2271, 0.2007, 0.42},  {15, 1, EX, 0.1900, 0.1987, 0.0808, 1.16},
}};

constexpr std::array<ReferenceAnchor, 2> kAnchors = {{
    {EX, 0.196, 0.085},
    {SE, 0.175, 0.143},
}};

}  // namespace

std::span<const ReferenceRow> reference_table() { return kRows; }

const ReferenceRow* find_reference(double tc_over_d, double s_over_sigma, KernelFamily family) {
  for (const auto& r : kRows) {
    if (r.family == family && std::abs(r.tc_over_d - tc_over_d) < 1e-9 &&
        std::abs(r.s_over_sigma - s_over_sigma) < 1e-9)
      return &r;
  }
  return nullptr;
}

std::span<const ReferenceAnchor> reference_anchors() { return kAnchors; }

}  // namespace gebridge
