#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "gebridge/ge_bridge.hpp"
#include "oracles.hpp"

using namespace gebridge;

namespace {

const std::vector<double> kRhoGrid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.9999};

void check_invariants(const GeParams& g, double d) {
  CHECK(g.p01 > 0.0);
  CHECK(g.p01 <= 1.0);
  CHECK(g.p10 > 0.0);
  CHECK(g.p10 <= 1.0);
  CHECK(std::abs(g.pi0 - g.q) <= 1e-12);
  CHECK(std::abs(g.pi1 - (1.0 - g.q)) <= 1e-12);
  CHECK(std::abs(g.pi0 * g.p01 - g.pi1 * g.p10) <= 1e-12);
  CHECK(std::abs(g.persistence * g.n_cross - d * (g.q * g.q + (1.0 - g.q) * (1.0 - g.q))) <= 1e-12);
  CHECK(g.dwell0 == doctest::Approx(d / g.p01).epsilon(1e-14));
  CHECK(g.dwell1 == doctest::Approx(d / g.p10).epsilon(1e-14));
}

}  // namespace

TEST_CASE("independent and half-correlated limits") {
  for (double d : {1.0, 2.5}) {
    const auto g0 = ge_params_from_rho(Correlation(0.0), {d, 0.0});
    CHECK(g0.p01 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g0.p10 == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::abs(g0.persistence - 2.0 * d) <= 1e-14 * d);
    const auto g5 = ge_params_from_rho(Correlation(0.5), {d, 0.0});
    CHECK(std::abs(g5.p01 - 1.0 / 3.0) <= 1e-15);
    CHECK(std::abs(g5.p10 - 1.0 / 3.0) <= 1e-15);
    CHECK(std::abs(g5.persistence - 3.0 * d) <= 1e-14 * d);
    check_invariants(g0, d);
    check_invariants(g5, d);
  }
}

TEST_CASE("asymmetric threshold against brute-force quadrature") {
  const auto g = ge_params_from_rho(Correlation(0.5), {1.0, 1.0});
  CHECK(std::abs(g.p01 - 0.11427082616376231374) <= 1e-15);
  CHECK(std::abs(g.p10 - 0.60597526296436769069) <= 1e-14);
  CHECK(std::abs(g.persistence - 7.6245437154145816982) <= 1e-13);
  const double n = oracle::crossing_quadrature(1.0, 0.5);
  CHECK(std::abs(g.p01 - n / oracle::Phi(1.0)) <= 1e-9);
  CHECK(std::abs(g.p10 - n / oracle::Phi(-1.0)) <= 1e-9);
  CHECK(g.p10 > g.p01);
}

TEST_CASE("Owen route matches quadrature across the grid") {
  for (double s : {0.5, 1.0, 2.0}) {
    for (double r : kRhoGrid) {
      CAPTURE(s);
      CAPTURE(r);
      const auto g = ge_params_from_rho(Correlation(r), {1.0, s});
      const double n = oracle::crossing_quadrature(s, r);
      CHECK(std::abs(g.p01 - n / oracle::Phi(s)) <= 1e-8);
      CHECK(std::abs(g.p10 - n / oracle::Phi(-s)) <= 1e-8);
      check_invariants(g, 1.0);
    }
  }
}

TEST_CASE("Owen route recovers the arcsine law at s = 0") {
  for (double r = 0.0; r <= 0.9999; r += 0.00999) {
    const auto g = ge_params_from_rho(Correlation(r), {1.0, 0.0});
    CHECK(std::abs(g.p01 - (0.5 - std::asin(r) / std::numbers::pi)) <= 1e-11);
  }
}

TEST_CASE("kernel composition") {
  const double ref = 0.38008390978757189942;
  const LinkConfig cfg{1.0, 0.0};
  const auto se = ge_params({KernelFamily::SquaredExponential, 1.0, 1.0}, cfg);
  const auto ex = ge_params({KernelFamily::Exponential, 1.0, 1.0}, cfg);
  CHECK(std::abs(se.p01 - ref) <= 1e-15);
  CHECK(std::abs(se.p01 - (0.5 - std::asin(std::exp(-1.0)) / std::numbers::pi)) <= 1e-15);
  CHECK(std::abs(ex.p01 - se.p01) <= 1e-15);
  CHECK(ge_params({KernelFamily::SquaredExponential, 1.0, 2.0}, cfg).p01 <
        ge_params({KernelFamily::Exponential, 1.0, 2.0}, cfg).p01);
  const KernelSpec k{KernelFamily::SquaredExponential, 4.0, 3.0};
  const auto a = ge_params(k, {1.0, 0.7});
  const auto b = ge_params_from_rho(one_step_correlation(k, 1.0), {1.0, 0.7});
  CHECK(a.p01 == b.p01);
  CHECK(a.persistence == b.persistence);
}

TEST_CASE("persistence_symmetric") {
  CHECK(persistence_symmetric(Correlation(0.0), 1.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(persistence_symmetric(Correlation(0.5), 1.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(std::abs(persistence_symmetric(Correlation(0.99), 1.0) - 22.195876385585007760) <= 1e-12);
  CHECK(std::abs(persistence_symmetric(Correlation(0.99), 1.0) -
                 ge_params_from_rho(Correlation(0.99), {1.0, 0.0}).persistence) <= 1e-10);
  for (double r : kRhoGrid)
    CHECK(std::abs(persistence_symmetric(Correlation(r), 1.5) -
                   ge_params_from_rho(Correlation(r), {1.5, 0.0}).persistence) <=
          1e-12 * persistence_symmetric(Correlation(r), 1.5));
  CHECK_THROWS_AS(persistence_symmetric(Correlation(1.0), 1.0), DomainError);
}

TEST_CASE("frozen channel and bad configuration") {
  try {
    (void)ge_params_from_rho(Correlation(1.0), {1.0, 0.0});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("frozen channel; use asymptotics") != std::string::npos);
  }
  CHECK_THROWS_AS(ge_params_from_rho(Correlation(1.0 - 1e-13), {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(ge_params({KernelFamily::SquaredExponential, 1.0, 1e9}, {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(ge_params_from_rho(Correlation(-0.2), {1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(ge_params_from_rho(Correlation(0.5), {1.0, 8.5}), DomainError);
  CHECK_THROWS_AS(ge_params_from_rho(Correlation(0.5), {0.0, 0.0}), DomainError);
  CHECK_NOTHROW(ge_params_from_rho(Correlation(0.5), {1.0, -8.0}));
}

TEST_CASE("threshold symmetry") {
  for (double s : {0.3, 1.0, 2.5}) {
    for (double r : kRhoGrid) {
      const auto a = ge_params_from_rho(Correlation(r), {1.0, s});
      const auto b = ge_params_from_rho(Correlation(r), {1.0, -s});
      CHECK(a.p01 == doctest::Approx(b.p10).epsilon(1e-13));
      CHECK(a.p10 == doctest::Approx(b.p01).epsilon(1e-13));
      CHECK(a.pi0 == doctest::Approx(b.pi1).epsilon(1e-13));
      CHECK(a.dwell0 == doctest::Approx(b.dwell1).epsilon(1e-13));
      CHECK(a.persistence == doctest::Approx(b.persistence).epsilon(1e-13));
    }
  }
}

TEST_CASE("monotonicity in rho") {
  for (double s : {-1.0, 0.0, 0.5, 2.0}) {
    double prev_p01 = 2.0, prev_pers = 0.0;
    for (double r = 0.0; r < 0.99999; r += 0.0005) {
      const auto g = ge_params_from_rho(Correlation(r), {1.0, s});
      CHECK(g.p01 < prev_p01);
      CHECK(g.persistence > prev_pers);
      prev_p01 = g.p01;
      prev_pers = g.persistence;
    }
  }
}

TEST_CASE("asymptotic crossing") {
  auto ratio = [](double s, double r) {
    return ge_params_from_rho(Correlation(r), {1.0, s}).n_cross / asymptotic_crossing(s, Correlation(r));
  };
  CHECK(ratio(0.0, 1.0 - 1e-4) >= 0.99);
  CHECK(ratio(0.0, 1.0 - 1e-4) <= 1.01);
  CHECK(ratio(1.0, 1.0 - 1e-6) >= 0.999);
  CHECK(ratio(1.0, 1.0 - 1e-6) <= 1.001);
  const double far = ratio(0.0, 0.5);
  CHECK(std::isfinite(far));
  CHECK(far > 0.0);
  MESSAGE("exact / asymptotic crossing at rho = 0.5, s = 0: " << far);
}

TEST_CASE("asymptotic persistence") {
  CHECK(std::abs(asymptotic_coefficient(0.0) - std::numbers::pi / std::numbers::sqrt2) <= 1e-14);
  const LinkConfig cfg{1.0, 0.0};
  const KernelSpec ex{KernelFamily::Exponential, 1.0, 100.0};
  CHECK(asymptotic_persistence(ex, cfg) == doctest::Approx(22.2144).epsilon(1e-4));
  const double rex = ge_params(ex, cfg).persistence / asymptotic_persistence(ex, cfg);
  CHECK(rex >= 0.9);
  CHECK(rex <= 1.1);
  const KernelSpec se{KernelFamily::SquaredExponential, 1.0, 100.0};
  CHECK(std::abs(ge_params(se, cfg).persistence / asymptotic_persistence(se, cfg) - 1.0) <= 0.02);

  double prev = 1.0;
  for (double tc : {20.0, 40.0, 80.0}) {
    const KernelSpec k{KernelFamily::SquaredExponential, 1.0, tc};
    const double exact = ge_params(k, cfg).persistence;
    const double err = std::abs(exact - asymptotic_persistence(k, cfg)) / exact;
    CHECK(err < prev);
    prev = err;
  }
}
