#include <doctest.h>

#include <cmath>

#include "gebridge/kernels.hpp"

using namespace gebridge;

TEST_CASE("evaluate") {
  CHECK(evaluate({KernelFamily::SquaredExponential, 1.0, 2.0}, 0.0) == 1.0);
  CHECK(evaluate({KernelFamily::SquaredExponential, 1.0, 1.0}, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(evaluate({KernelFamily::Exponential, 1.0, 1.0}, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  for (auto fam : {KernelFamily::SquaredExponential, KernelFamily::Exponential}) {
    const KernelSpec k{fam, 2.5, 3.0};
    CHECK(evaluate(k, 0.0) == 2.5);
    for (double tau : {0.1, 1.0, 4.0, 9.0}) {
      CHECK(evaluate(k, tau) == evaluate(k, -tau));
      CHECK(evaluate(k, tau) > 0.0);
      CHECK(evaluate(k, tau) <= 2.5);
    }
  }
}

TEST_CASE("KernelSpec validation") {
  CHECK_THROWS_AS((KernelSpec{KernelFamily::Exponential, 0.0, 1.0}.validate()), DomainError);
  CHECK_THROWS_AS((KernelSpec{KernelFamily::Exponential, 1.0, -1.0}.validate()), DomainError);
  CHECK_THROWS_AS((KernelSpec{KernelFamily::Exponential, 1.0, std::nan("")}.validate()), DomainError);
  CHECK_NOTHROW((KernelSpec{KernelFamily::Exponential, 1.0, 1.0}.validate()));
}

TEST_CASE("family names") {
  CHECK(parse_kernel_family("sqexp") == KernelFamily::SquaredExponential);
  CHECK(parse_kernel_family("exp") == KernelFamily::Exponential);
  CHECK(parse_kernel_family("ou") == KernelFamily::Exponential);
  CHECK(parse_kernel_family(to_string(KernelFamily::SquaredExponential)) == KernelFamily::SquaredExponential);
  CHECK_THROWS_AS(parse_kernel_family("matern"), DomainError);
}

TEST_CASE("one_step_correlation") {
  CHECK(one_step_correlation({KernelFamily::SquaredExponential, 1.0, 1.0}, 1.0).value() ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(one_step_correlation({KernelFamily::Exponential, 1.0, 1.0}, 1.0).value() ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  CHECK(one_step_correlation({KernelFamily::SquaredExponential, 1.0, 1e9}, 1.0).value() >= 1.0 - 1e-12);
  CHECK(one_step_correlation({KernelFamily::SquaredExponential, 7.0, 3.0}, 1.0).value() ==
        one_step_correlation({KernelFamily::SquaredExponential, 1.0, 3.0}, 1.0).value());
  CHECK_THROWS_AS(one_step_correlation({KernelFamily::Exponential, 1.0, 1.0}, 0.0), DomainError);

  for (auto fam : {KernelFamily::SquaredExponential, KernelFamily::Exponential}) {
    double prev = 0.0;
    for (double tc = 0.2; tc < 200.0; tc *= 1.3) {
      const double r = one_step_correlation({fam, 1.0, tc}, 1.0).value();
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("lag_k_correlation") {
  const KernelSpec ex{KernelFamily::Exponential, 1.0, 2.0};
  CHECK(lag_k_correlation(ex, 1.0, 2).value() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  for (int m = 1; m <= 6; ++m)
    CHECK(std::abs(lag_k_correlation(ex, 1.0, m).value() - std::pow(one_step_correlation(ex, 1.0).value(), m)) <=
          1e-15);
  const KernelSpec se{KernelFamily::SquaredExponential, 1.0, 3.0};
  CHECK(lag_k_correlation(se, 1.0, 1).value() == one_step_correlation(se, 1.0).value());
  CHECK_THROWS_AS(lag_k_correlation(se, 1.0, 0), DomainError);
}

TEST_CASE("gaussian_non_markovity") {
  const KernelSpec se10{KernelFamily::SquaredExponential, 1.0, 10.0};
  const double r1 = lag_k_correlation(se10, 1.0, 1).value();
  const double r2 = lag_k_correlation(se10, 1.0, 2).value();
  CHECK(gaussian_non_markovity(se10, 1.0) == doctest::Approx(r2 - r1 * r1).epsilon(1e-12));
  CHECK(std::abs(gaussian_non_markovity(se10, 1.0) / -0.02 - 1.0) <= 0.2);

  for (double tc = 0.1; tc < 1000.0; tc *= 1.5)
    CHECK(gaussian_non_markovity({KernelFamily::SquaredExponential, 1.0, tc}, 1.0) < 0.0);
  for (double tc : {0.5, 2.0, 30.0}) CHECK(gaussian_non_markovity({KernelFamily::Exponential, 1.0, tc}, 1.0) == 0.0);

  double prev_err = 0.0;
  for (double tc : {10.0, 20.0, 40.0}) {
    const double err = std::abs(gaussian_non_markovity({KernelFamily::SquaredExponential, 1.0, tc}, 1.0) +
                                2.0 / (tc * tc));
    if (prev_err > 0.0) {
      CHECK(prev_err / err >= 4.0);
      CHECK(prev_err / err == doctest::Approx(16.0).epsilon(0.05));
    }
    prev_err = err;
  }
}
