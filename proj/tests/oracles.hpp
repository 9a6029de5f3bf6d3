#pragma once

// Reference computations used only by the tests. Nothing here calls into the
// library, so a bug in the library cannot hide behind a shared helper.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/owens_t.hpp>

namespace oracle {

inline double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double owens_t_boost(double h, double a) { return boost::math::owens_t(h, a); }

// Direct adaptive quadrature of the defining integral.
inline double owens_t_quadrature(double h, double a) {
  auto f = [h](double t) {
    const double u = 1.0 + t * t;
    return std::exp(-0.5 * h * h * u) / u;
  };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  return GK::integrate(f, 0.0, a, 15, 1e-14) / (2.0 * std::numbers::pi);
}

// P(X < x, Y < y) by a tensor-product Gauss-Legendre rule on [lo, x] x [lo, y].
inline double bvn_tensor(double x, double y, double r, double lo = -10.0, int panels = 60) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  const double det = 1.0 - r * r;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  const double hx = (x - lo) / panels;
  const double hy = (y - lo) / panels;
  const auto& abs = GL::abscissa();
  const auto& w = GL::weights();
  auto nodes = [&](double a, double h, auto&& fn) {
    for (int p = 0; p < panels; ++p) {
      const double mid = a + (p + 0.5) * h;
      for (std::size_t i = 0; i < abs.size(); ++i) {
        const double wi = w[i] * 0.5 * h;
        if (abs[i] == 0.0) {
          fn(mid, wi);
        } else {
          fn(mid - abs[i] * 0.5 * h, wi);
          fn(mid + abs[i] * 0.5 * h, wi);
        }
      }
    }
  };
  double total = 0.0;
  nodes(lo, hx, [&](double u, double wu) {
    double inner = 0.0;
    nodes(lo, hy, [&](double v, double wv) {
      inner += wv * std::exp(-(u * u - 2.0 * r * u * v + v * v) / (2.0 * det));
    });
    total += wu * inner;
  });
  return total * norm;
}

// Composite 20-point Gauss-Legendre on `panels` equal panels of [a, b].
template <class F>
double composite_gl(F&& f, double a, double b, int panels) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) total += GL::integrate(f, a + p * h, a + (p + 1) * h);
  return total;
}

// N = P(Z0 < s, Z1 >= s) by iterated quadrature in whitened coordinates
// Z0 = W1, Z1 = rho W1 + sqrt(1 - rho^2) W2. The inner integral over W2 is
// done numerically as well; the outer one is graded toward w1 = s, where the
// integrand has a front of width ~sqrt(1 - rho^2).
inline double crossing_quadrature(double s, double rho) {
  const double sr = std::sqrt(1.0 - rho * rho);
  constexpr double hi = 12.0;
  auto inner = [&](double w1) {
    const double c = (s - rho * w1) / sr;
    if (c >= hi) return 0.0;
    return composite_gl(phi, c, hi, static_cast<int>(std::ceil((hi - c) / 0.25)));
  };
  auto outer = [&](double w1) { return phi(w1) * inner(w1); };
  const double knee = std::max(-hi, s - 40.0 * sr);
  return composite_gl(outer, -hi, knee, static_cast<int>(std::ceil((knee + hi) / 0.25)) + 1) +
         composite_gl(outer, knee, s, 80);
}

struct McResult {
  double mean = 0.0;
  double se = 0.0;
};

// Monte Carlo P(Z0 < t0, Z1 < t1, Z2 < t2) for the stationary correlation
// structure (rho1, rho1, rho2), sampled through an explicit Cholesky factor.
inline McResult trivariate_mc(const std::array<double, 3>& t, double rho1, double rho2,
                              std::uint64_t n, std::uint64_t seed) {
  const double l10 = rho1;
  const double l11 = std::sqrt(1.0 - rho1 * rho1);
  const double l20 = rho2;
  const double l21 = (rho1 - rho2 * rho1) / l11;
  const double l22 = std::sqrt(1.0 - l20 * l20 - l21 * l21);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  std::uint64_t hits = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double a = nd(gen), b = nd(gen), c = nd(gen);
    const double z0 = a;
    const double z1 = l10 * a + l11 * b;
    const double z2 = l20 * a + l21 * b + l22 * c;
    if (z0 < t[0] && z1 < t[1] && z2 < t[2]) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

// Closed form of the zero-threshold trivariate orthant probability.
inline double trivariate_orthant_zero(double r01, double r12, double r02) {
  return 0.125 + (std::asin(r01) + std::asin(r12) + std::asin(r02)) / (4.0 * std::numbers::pi);
}

}  // namespace oracle
