#pragma once

// Internal quadrature helpers shared by the special-function routines.

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace gebridge::detail {

template <std::size_t N>
struct GaussLegendreRule {
  std::array<double, N> nodes{};    // on [-1, 1]
  std::array<double, N> weights{};
};

// Newton iteration on P_N from the Chebyshev initial guess.
template <std::size_t N>
GaussLegendreRule<N> make_gauss_legendre() {
  GaussLegendreRule<N> rule;
  constexpr double n = static_cast<double>(N);
  for (std::size_t i = 0; i < (N + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= N; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-17) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[N - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[N - 1 - i] = w;
  }
  return rule;
}

template <std::size_t N>
const GaussLegendreRule<N>& gauss_legendre() {
  static const GaussLegendreRule<N> rule = make_gauss_legendre<N>();
  return rule;
}

struct KronrodResult {
  double value;
  double error;
};

template <class F>
KronrodResult gauss_kronrod_15(F&& f, double lo, double hi) {
  static constexpr std::array<double, 8> xgk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wgk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * wgk[7];
  double gauss = fc * wg[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const double fsum = f(center - dx) + f(center + dx);
    kronrod += wgk[j] * fsum;
    if (j % 2 == 1) gauss += wg[j / 2] * fsum;
  }
  return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

namespace adaptive {

template <class F>
double integrate_panel(F& f, double lo, double hi, double tol, int depth) {
  const auto r = gauss_kronrod_15(f, lo, hi);
  if (r.error <= tol || depth >= 40) return r.value;
  const double mid = 0.5 * (lo + hi);
  return integrate_panel(f, lo, mid, 0.5 * tol, depth + 1) +
         integrate_panel(f, mid, hi, 0.5 * tol, depth + 1);
}

}  // namespace adaptive

// Adaptive G7-K15 over [lo, hi], pre-split into `panels` equal pieces.
// The absolute tolerance is shared evenly between the initial panels.
template <class F>
double integrate_adaptive(F&& f, double lo, double hi, double abs_tol, std::size_t panels = 1) {
  if (!(hi > lo)) return 0.0;
  if (panels == 0) panels = 1;
  const double width = (hi - lo) / static_cast<double>(panels);
  const double tol = abs_tol / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t i = 0; i < panels; ++i) {
    const double a = lo + width * static_cast<double>(i);
    const double b = (i + 1 == panels) ? hi : a + width;
    sum += adaptive::integrate_panel(f, a, b, tol, 0);
  }
  return sum;
}

}  // namespace gebridge::detail
