#include "durasim/distributions.h"

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "durasim/errors.h"
#include "durasim/special_functions.h"

namespace durasim {
namespace {

TEST(GammaCdf, ShapeOneIsExponential) {
  EXPECT_NEAR(gamma_cdf(1.0, 1.0, 1.0), 1.0 - std::exp(-1.0), 1e-15);
}

TEST(GammaCdf, ZeroAtOrigin) { EXPECT_EQ(gamma_cdf(2.0, 1.0, 0.0), 0.0); }

TEST(GammaCdf, MatchesDensityQuadrature) {
  const double shape = 0.45;
  const double rate = 0.3;
  // Integrate the density in y = x^shape so the origin singularity vanishes:
  // int_0^x f(s) ds = rate^shape / Gamma(shape + 1) int_0^{x^shape} e^{-rate y^{1/shape}} dy.
  auto integrand = [&](double y) {
    return std::exp(-rate * std::pow(y, 1.0 / shape));
  };
  boost::math::quadrature::tanh_sinh<double> ts;
  const double oracle = std::pow(rate, shape) / std::tgamma(shape + 1.0) *
                        ts.integrate(integrand, 0.0, std::pow(5.0, shape));
  EXPECT_NEAR(gamma_cdf(shape, rate, 5.0), oracle, 1e-10);
  // 30-digit reference.
  EXPECT_NEAR(gamma_cdf(shape, rate, 5.0), 0.927949592704323618630803748793,
              1e-12);
}

TEST(GammaCdf, ShapeOneAgreesWithExpOnRandomArguments) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rate(0.01, 5.0);
  std::uniform_real_distribution<double> x(0.0, 40.0);
  for (int i = 0; i < 2000; ++i) {
    const double r = rate(rng);
    const double xv = x(rng);
    EXPECT_NEAR(gamma_cdf(1.0, r, xv), -std::expm1(-r * xv), 1e-12);
  }
}

TEST(GammaCdf, BothBranchesAgreeWithComplement) {
  for (double s : {0.3, 1.0, 2.5, 10.0}) {
    for (double x : {0.1, 1.0, s + 0.999, s + 1.001, 3.0 * s + 5.0}) {
      EXPECT_NEAR(gamma_p(s, x) + gamma_q(s, x), 1.0, 1e-14);
    }
  }
}

TEST(GammaCdf, RejectsBadParameters) {
  EXPECT_THROW(gamma_cdf(0.0, 1.0, 1.0), ParameterError);
  EXPECT_THROW(gamma_cdf(1.0, -1.0, 1.0), ParameterError);
  EXPECT_THROW(gamma_cdf(NAN, 1.0, 1.0), ParameterError);
  EXPECT_THROW(gamma_cdf(1.0, INFINITY, 1.0), ParameterError);
  EXPECT_THROW(gamma_cdf(1.0, 1.0, -0.5), ParameterError);
}

TEST(BinomialTail, SymmetricCase) {
  EXPECT_NEAR(binomial_upper_tail(3, 2, 0.5), 0.5, 1e-15);
}

TEST(BinomialTail, MatchesDirectSumForSmallN) {
  for (int n : {1, 5, 20}) {
    for (int d = 0; d <= n + 1; ++d) {
      for (double p : {0.0, 0.01, 0.3, 0.5, 0.97, 1.0}) {
        double direct = 0.0;
        for (int k = d; k <= n; ++k) {
          direct += std::tgamma(n + 1.0) /
                    (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0)) *
                    std::pow(p, k) * std::pow(1.0 - p, n - k);
        }
        if (d <= 0) direct = 1.0;
        EXPECT_NEAR(binomial_upper_tail(n, d, p), direct, 1e-12)
            << "n=" << n << " d=" << d << " p=" << p;
      }
    }
  }
}

TEST(ExponentialModel, MedianRoundTrip) {
  const auto m = ExponentialModel::from_median(10.0);
  EXPECT_NEAR(m.rate(), std::numbers::ln2 / 10.0, 1e-16);
  EXPECT_NEAR(m.median(), 10.0, 1e-12);
  EXPECT_NEAR(quantile(m, 0.5), 10.0, 1e-12);
}

TEST(ExponentialModel, RejectsNonPositiveRate) {
  EXPECT_THROW(ExponentialModel(0.0), ParameterError);
  EXPECT_THROW(ExponentialModel(-1.0), ParameterError);
  EXPECT_THROW(ExponentialModel{INFINITY}, ParameterError);
}

TEST(WeibullModel, QuantileAtScale) {
  const WeibullModel m(2.0, 5.0);
  EXPECT_NEAR(quantile(m, 1.0 - std::exp(-1.0)), 5.0, 1e-12);
  EXPECT_NEAR(quantile(m, 0.6321206), 5.0, 1e-6);
}

TEST(WeibullModel, ShapeOneIsExponential) {
  const double rate = 0.07;
  const WeibullModel w(1.0, 1.0 / rate);
  const ExponentialModel e(rate);
  for (double t = 0.0; t < 100.0; t += 0.37) {
    EXPECT_NEAR(survival(w, t), survival(e, t), 1e-14);
    EXPECT_NEAR(density(w, t), density(e, t), 1e-14);
  }
}

TEST(WeibullModel, RejectsBadParameters) {
  EXPECT_THROW(WeibullModel(0.0, 1.0), ParameterError);
  EXPECT_THROW(WeibullModel(1.0, -2.0), ParameterError);
}

TEST(EnrollmentBeta, UniformMidpoint) {
  const auto m = EnrollmentBeta::uniform(14.0);
  EXPECT_NEAR(quantile(m, 0.5), 7.0, 1e-12);
  EXPECT_NEAR(cdf(m, 3.5), 0.25, 1e-15);
}

TEST(EnrollmentBeta, CdfFormula) {
  const EnrollmentBeta m(14.0, 0.45);
  for (double u : {0.5, 3.0, 7.0, 13.9}) {
    EXPECT_NEAR(cdf(m, u), 1.0 - std::pow(1.0 - u / 14.0, 0.45), 1e-14);
  }
  EXPECT_EQ(cdf(m, 0.0), 0.0);
  EXPECT_EQ(cdf(m, 14.0), 1.0);
}

TEST(EnrollmentBeta, DensityIntegratesToOne) {
  // int_0^b f = 1 - (1 - b/a)^beta, which tends to 1 as b -> a.
  for (double beta : {0.45, 1.0, 1.25, 3.0}) {
    const EnrollmentBeta m(14.0, beta);
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double b : {1.0, 7.0, 13.0, 13.99}) {
      const double mass =
          ts.integrate([&](double u) { return density(m, u); }, 0.0, b);
      EXPECT_NEAR(mass, 1.0 - std::pow(1.0 - b / 14.0, beta), 1e-10)
          << "beta=" << beta << " b=" << b;
    }
    EXPECT_EQ(cdf(m, 14.0), 1.0);
  }
}

TEST(Quantile, RejectsOutOfRangeProbability) {
  EXPECT_THROW(quantile(ExponentialModel(1.0), 1.0), ParameterError);
  EXPECT_THROW(quantile(WeibullModel(1.0, 1.0), -0.1), ParameterError);
  EXPECT_THROW(quantile(EnrollmentBeta(1.0, 1.0), NAN), ParameterError);
  EXPECT_EQ(quantile(ExponentialModel(1.0), 0.0), 0.0);
  EXPECT_EQ(quantile(EnrollmentBeta(3.0, 2.0), 0.0), 0.0);
}

// Every CDF is nondecreasing, 0 at 0 and <= 1 on a fine grid; quantile is
// its numeric inverse.
TEST(DistributionProperties, CdfShapeAndQuantileInverse) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> param(0.2, 5.0);
  std::uniform_real_distribution<double> prob(0.0, 0.999999);
  for (int trial = 0; trial < 30; ++trial) {
    const SurvivalModel models[] = {
        ExponentialModel(param(rng) / 5.0),
        WeibullModel(param(rng), 3.0 * param(rng)),
    };
    const EnrollmentBeta enroll(4.0 * param(rng), param(rng));
    for (const auto& m : models) {
      EXPECT_EQ(cdf(m, 0.0), 0.0);
      double prev = 0.0;
      for (int i = 0; i <= 10000; ++i) {
        const double v = cdf(m, i * 0.01);
        ASSERT_GE(v, prev);
        ASSERT_LE(v, 1.0);
        prev = v;
      }
      for (int i = 0; i < 100; ++i) {
        const double p = prob(rng);
        EXPECT_LT(std::abs(cdf(m, quantile(m, p)) - p), 1e-9);
      }
    }
    double prev = 0.0;
    for (int i = 0; i <= 10000; ++i) {
      const double v = cdf(enroll, enroll.period() * i / 10000.0);
      ASSERT_GE(v, prev);
      ASSERT_LE(v, 1.0);
      prev = v;
    }
    for (int i = 0; i < 100; ++i) {
      const double p = prob(rng);
      EXPECT_LT(std::abs(cdf(enroll, quantile(enroll, p)) - p), 1e-9);
    }
  }
}

}  // namespace
}  // namespace durasim
