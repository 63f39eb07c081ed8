#pragma once

#include <variant>

namespace durasim {

// Exponential time-to-event model; rate is the hazard per month.
class ExponentialModel {
 public:
  explicit ExponentialModel(double rate);

  static ExponentialModel from_median(double median_months);

  double rate() const noexcept { return rate_; }
  double median() const noexcept;

 private:
  double rate_;
};

// Weibull model with S(t) = exp(-(t / scale)^shape).
class WeibullModel {
 public:
  WeibullModel(double shape, double scale);

  double shape() const noexcept { return shape_; }
  double scale() const noexcept { return scale_; }
  double median() const noexcept;

 private:
  double shape_;
  double scale_;
};

// Enrollment time U with U / period_a ~ Beta(1, beta) on (0, period_a).
// beta = 1 is uniform accrual, beta < 1 back-loaded, beta > 1 front-loaded.
class EnrollmentBeta {
 public:
  EnrollmentBeta(double period_a, double beta);

  static EnrollmentBeta uniform(double period_a) { return {period_a, 1.0}; }

  double period() const noexcept { return period_a_; }
  double beta() const noexcept { return beta_; }

 private:
  double period_a_;
  double beta_;
};

using SurvivalModel = std::variant<ExponentialModel, WeibullModel>;

double cdf(const ExponentialModel& m, double t);
double survival(const ExponentialModel& m, double t);
double density(const ExponentialModel& m, double t);
double quantile(const ExponentialModel& m, double p);

double cdf(const WeibullModel& m, double t);
double survival(const WeibullModel& m, double t);
double density(const WeibullModel& m, double t);
double quantile(const WeibullModel& m, double p);

double cdf(const EnrollmentBeta& m, double u);
double survival(const EnrollmentBeta& m, double u);
double density(const EnrollmentBeta& m, double u);
double quantile(const EnrollmentBeta& m, double p);

double cdf(const SurvivalModel& m, double t);
double survival(const SurvivalModel& m, double t);
double density(const SurvivalModel& m, double t);
double quantile(const SurvivalModel& m, double p);
double median(const SurvivalModel& m);

}  // namespace durasim
