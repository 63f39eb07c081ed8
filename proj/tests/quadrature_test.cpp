#include "durasim/quadrature.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "durasim/errors.h"

namespace durasim {
namespace {

TEST(Integrate, Polynomial) {
  const auto r = integrate([](double x) { return x * x; }, 0.0, 3.0);
  EXPECT_NEAR(r.value, 9.0, 1e-13);
  EXPECT_EQ(r.subdivisions, 0);
}

TEST(Integrate, ReversedBoundsFlipSign) {
  const auto r = integrate([](double x) { return std::exp(x); }, 1.0, 0.0);
  EXPECT_NEAR(r.value, -(std::numbers::e - 1.0), 1e-13);
}

TEST(Integrate, EmptyInterval) {
  EXPECT_EQ(integrate([](double) { return 1.0; }, 2.0, 2.0).value, 0.0);
}

TEST(Integrate, EndpointSingularityConverges) {
  const auto r = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0,
                           1.0, {.abs_tol = 1e-9});
  EXPECT_NEAR(r.value, 2.0, 1e-8);
  EXPECT_GT(r.subdivisions, 0);
}

TEST(Integrate, KinkIsResolved) {
  const auto r = integrate([](double x) { return std::abs(x - 0.3); }, 0.0,
                           1.0, {.abs_tol = 1e-12});
  EXPECT_NEAR(r.value, 0.5 * (0.09 + 0.49), 1e-12);
}

TEST(Integrate, BudgetExhaustionCarriesEstimate) {
  try {
    integrate([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0,
              {.abs_tol = 1e-14, .max_subdivisions = 5});
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_GT(e.estimate(), 1e-14);
  }
}

TEST(Integrate, RejectsBadArguments) {
  auto f = [](double x) { return x; };
  EXPECT_THROW(integrate(f, 0.0, 1.0, {.abs_tol = 0.0}), ParameterError);
  EXPECT_THROW(integrate(f, 0.0, INFINITY), ParameterError);
}

}  // namespace
}  // namespace durasim
