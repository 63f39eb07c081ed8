#include "durasim/event_time.h"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "durasim/errors.h"

namespace durasim {
namespace {

constexpr double kLn2 = std::numbers::ln2;

SubgroupArm exp_arm(double weight, double a, double beta, double event_rate,
                    double dropout_rate = 0.0) {
  std::optional<SurvivalModel> dropout;
  if (dropout_rate > 0.0) dropout = ExponentialModel(dropout_rate);
  return SubgroupArm(weight, EnrollmentBeta(a, beta),
                     ExponentialModel(event_rate), dropout);
}

// Direct simulation of U + V with V <= W, written independently of the
// library sampler.
double simulated_cdf(const std::vector<SubgroupArm>& arms,
                     const std::vector<double>& rates,
                     const std::vector<double>& dropout_rates, double a,
                     double t, int draws, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int hits = 0;
  for (int i = 0; i < draws; ++i) {
    double pick = unit(rng);
    std::size_t k = 0;
    while (k + 1 < arms.size() && pick > arms[k].weight()) {
      pick -= arms[k].weight();
      ++k;
    }
    const double u = a * unit(rng);
    std::exponential_distribution<double> event(rates[k]);
    const double v = event(rng);
    double w = INFINITY;
    if (dropout_rates[k] > 0.0) {
      w = std::exponential_distribution<double>(dropout_rates[k])(rng);
    }
    if (v <= w && u + v <= t) ++hits;
  }
  return static_cast<double>(hits) / draws;
}

TEST(ClosedForm, ZeroAtStudyStart) {
  EXPECT_EQ(cdf_closed_form(exp_arm(1, 14, 1, 0.1), 0.0), 0.0);
  EXPECT_EQ(cdf_quadrature(exp_arm(1, 14, 1, 0.1), 0.0), 0.0);
}

TEST(ClosedForm, NoCensoringReachesFullMass) {
  EXPECT_GT(cdf_closed_form(exp_arm(1, 14, 1, kLn2 / 10), 1e4), 1.0 - 1e-6);
}

TEST(ClosedForm, ScenarioOnePlaceboMatchesReferenceValues) {
  // 30-digit values of the defining double integral.
  const auto arm = exp_arm(1, 14, 1, kLn2 / 10);
  EXPECT_NEAR(cdf_closed_form(arm, 5), 0.0553174326484471959916817318074, 1e-13);
  EXPECT_NEAR(cdf_closed_form(arm, 14), 0.359988680418204349275923916219, 1e-13);
  EXPECT_NEAR(cdf_closed_form(arm, 20), 0.577750000413810836013417372761, 1e-13);
}

TEST(ClosedForm, ScenarioOnePlaceboAgreesWithQuadratureAndSimulation) {
  const auto arm = exp_arm(1, 14, 1, kLn2 / 10);
  for (double t : {5.0, 14.0, 20.0}) {
    const double closed = cdf_closed_form(arm, t);
    EXPECT_NEAR(cdf_quadrature(arm, t), closed, 1e-6);
    const double sim =
        simulated_cdf({arm}, {kLn2 / 10}, {0.0}, 14, t, 1000000, 99);
    EXPECT_NEAR(sim, closed, 3e-3) << "t=" << t;
  }
}

TEST(ClosedForm, NonUniformWithDropoutMatchesReferenceValues) {
  const auto back_loaded = exp_arm(1, 14, 0.45, kLn2 / 10, 0.02);
  const auto front_loaded = exp_arm(1, 36, 1.25, kLn2 / 5, 0.05);
  const double times[] = {3, 10, 25, 60};
  const double expected_back[] = {0.0095911273143459472821153926233,
                                  0.102109573379237072689016892288,
                                  0.56642529376223018152501555604,
                                  0.766870820960635907347353028519};
  const double expected_front[] = {0.017959783195153473424503904868,
                                   0.136490731730723967106301791952,
                                   0.459141125359453482524841746664,
                                   0.734110446824320743328989160419};
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(cdf_closed_form(back_loaded, times[i]), expected_back[i], 1e-12);
    EXPECT_NEAR(cdf_closed_form(front_loaded, times[i]), expected_front[i],
                1e-12);
    EXPECT_NEAR(cdf_quadrature(back_loaded, times[i], 1e-10), expected_back[i],
                1e-10);
    EXPECT_NEAR(cdf_quadrature(front_loaded, times[i], 1e-10),
                expected_front[i], 1e-10);
  }
}

TEST(ClosedForm, QuadratureAgreesOnRandomArms) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double a = 2.0 + 40.0 * unit(rng);
    const double beta = 0.2 + 3.0 * unit(rng);
    const double rate = 0.01 + 0.5 * unit(rng);
    const double dropout = unit(rng) < 0.3 ? 0.0 : 0.2 * unit(rng);
    const auto arm = exp_arm(1, a, beta, rate, dropout);
    const double t = 3.0 * a * unit(rng);
    EXPECT_NEAR(cdf_quadrature(arm, t), cdf_closed_form(arm, t),
                kDefaultQuadratureTol)
        << "a=" << a << " beta=" << beta << " t=" << t;
  }
}

TEST(ClosedForm, RejectsWeibullEvents) {
  const SubgroupArm arm(1.0, EnrollmentBeta::uniform(10), WeibullModel(2, 5));
  EXPECT_FALSE(has_closed_form(arm));
  EXPECT_THROW(cdf_closed_form(arm, 3.0), UnsupportedModelError);
}

TEST(ClosedForm, RejectsNegativeTime) {
  EXPECT_THROW(cdf_closed_form(exp_arm(1, 14, 1, 0.1), -1.0), ParameterError);
}

TEST(Quadrature, WeibullShapeOneMatchesExponential) {
  const double rate = kLn2 / 10;
  const SubgroupArm weibull(1.0, EnrollmentBeta(14, 0.8),
                            WeibullModel(1.0, 1.0 / rate),
                            ExponentialModel(0.03));
  const auto exponential = exp_arm(1, 14, 0.8, rate, 0.03);
  for (double t : {1.0, 5.0, 20.0}) {
    EXPECT_NEAR(cdf_quadrature(weibull, t), cdf_quadrature(exponential, t),
                2 * kDefaultQuadratureTol);
  }
}

TEST(Quadrature, WeibullArmMatchesReferenceValues) {
  const SubgroupArm arm(1.0, EnrollmentBeta(20, 0.7), WeibullModel(1.5, 12),
                        ExponentialModel(0.03));
  EXPECT_NEAR(cdf_quadrature(arm, 10), 0.0802654842560429936937797, 1e-8);
  EXPECT_NEAR(cdf_quadrature(arm, 30), 0.6266064362946211507944589, 1e-8);
  EXPECT_NEAR(cdf_quadrature(arm, 80), 0.7390170807210719370990432, 1e-8);
  EXPECT_NEAR(observed_event_probability(arm), 0.7390176034206653291604932,
              1e-10);
}

TEST(Quadrature, RejectsNonPositiveTolerance) {
  EXPECT_THROW(cdf_quadrature(exp_arm(1, 14, 1, 0.1), 1.0, 0.0),
               ParameterError);
}

TEST(Mixture, SingleArmIsThatArm) {
  const auto arm = exp_arm(1, 14, 1, kLn2 / 10);
  const std::vector<SubgroupArm> arms{arm};
  for (double t : {0.0, 3.0, 14.0, 40.0}) {
    EXPECT_EQ(mixture_cdf(arms, t), cdf_closed_form(arm, t));
  }
}

TEST(Mixture, TwoEqualHalvesAreOneArm) {
  const auto arm = exp_arm(1, 14, 0.7, kLn2 / 8, 0.01);
  const std::vector<SubgroupArm> arms{arm.with_weight(0.5),
                                      arm.with_weight(0.5)};
  for (double t : {1.0, 9.0, 14.0, 33.0}) {
    EXPECT_NEAR(mixture_cdf(arms, t), cdf_closed_form(arm, t), 1e-15);
  }
}

TEST(Mixture, ScenarioOneMatchesReferenceAndSimulation) {
  const std::vector<SubgroupArm> arms{exp_arm(0.5, 14, 1, kLn2 / 10),
                                      exp_arm(0.5, 14, 1, kLn2 / 20)};
  const double times[] = {7, 14, 28};
  const double reference[] = {0.079938936285895621925960102397,
                              0.283842860913722177017905911634,
                              0.63488068973304574464353803288};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(mixture_cdf(arms, times[i]), reference[i], 1e-13);
    const double sim = simulated_cdf(arms, {kLn2 / 10, kLn2 / 20}, {0, 0}, 14,
                                     times[i], 1000000, 1234 + i);
    EXPECT_NEAR(sim, reference[i], 3e-3);
  }
}

TEST(Mixture, RejectsBadWeights) {
  const std::vector<SubgroupArm> arms{exp_arm(0.5, 14, 1, 0.1),
                                      exp_arm(0.4, 14, 1, 0.2)};
  EXPECT_THROW(MixtureCdf{arms}, ConfigError);
  EXPECT_THROW(MixtureCdf{std::vector<SubgroupArm>{}}, ConfigError);
  EXPECT_THROW(exp_arm(1.2, 14, 1, 0.1), ParameterError);
}

TEST(Mixture, TotalMassIsNoCensoringProbability) {
  const std::vector<SubgroupArm> arms{exp_arm(0.3, 14, 1, 0.1, 0.05),
                                      exp_arm(0.7, 14, 1, 0.2)};
  const MixtureCdf mix(arms);
  EXPECT_NEAR(mix.total_mass(), 0.3 * 0.1 / 0.15 + 0.7, 1e-15);
  EXPECT_NEAR(mix(1e5), mix.total_mass(), 1e-12);
}

// F stays a valid sub-CDF below the enrollment end.
TEST(EventTimeProperties, ValidBelowEnrollmentEnd) {
  for (auto [a, m1, m2] : {std::tuple{14.0, 10.0, 20.0},
                           std::tuple{140.0 / 3.88, 5.0, 10.0}}) {
    const MixtureCdf mix({exp_arm(0.5, a, 1, kLn2 / m1),
                          exp_arm(0.5, a, 1, kLn2 / m2)});
    const double at_a = mix(a);
    double prev = 0.0;
    for (int i = 1; i < 2000; ++i) {
      const double v = mix(a * i / 2000.0);
      ASSERT_GE(v, prev);
      ASSERT_LE(v, at_a);
      prev = v;
    }
  }
}

TEST(EventTimeProperties, IncreasingInBeta) {
  const double betas[] = {0.3, 0.45, 0.8, 1.0, 1.25, 2.0, 4.0};
  for (double t : {0.5, 3.0, 10.0, 14.0, 20.0, 50.0}) {
    for (int i = 0; i + 1 < 7; ++i) {
      const double lo = cdf_closed_form(exp_arm(1, 14, betas[i], 0.07, 0.01), t);
      const double hi =
          cdf_closed_form(exp_arm(1, 14, betas[i + 1], 0.07, 0.01), t);
      EXPECT_LT(lo, hi) << "t=" << t << " beta=" << betas[i];
    }
  }
}

TEST(EventTimeProperties, DefectiveSupremum) {
  const double lv = kLn2 / 10;
  for (double lw : {0.01, 0.05, 0.3}) {
    const auto arm = exp_arm(1, 14, 0.6, lv, lw);
    EXPECT_NEAR(cdf_closed_form(arm, 1e4), lv / (lv + lw), 1e-6);
    EXPECT_NEAR(observed_event_probability(arm), lv / (lv + lw), 1e-15);
  }
}

TEST(EventTimeProperties, ContinuousAtEnrollmentEnd) {
  for (double beta : {0.45, 1.0, 1.25, 3.0}) {
    const auto arm = exp_arm(1, 14, beta, 0.09, 0.02);
    const double left = cdf_closed_form(arm, std::nextafter(14.0, 0.0));
    const double right = cdf_closed_form(arm, std::nextafter(14.0, 100.0));
    EXPECT_NEAR(left, right, 1e-9);
  }
}

}  // namespace
}  // namespace durasim
