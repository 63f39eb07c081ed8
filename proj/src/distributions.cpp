#include "durasim/distributions.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "durasim/errors.h"

namespace durasim {
namespace {

double require_positive(double value, const char* what) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ParameterError(std::string(what) + " must be positive and finite");
  }
  return value;
}

void require_probability(double p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ParameterError("quantile: p must lie in [0, 1)");
  }
}

}  // namespace

ExponentialModel::ExponentialModel(double rate)
    : rate_(require_positive(rate, "exponential rate")) {}

ExponentialModel ExponentialModel::from_median(double median_months) {
  require_positive(median_months, "median survival");
  return ExponentialModel(std::numbers::ln2 / median_months);
}

double ExponentialModel::median() const noexcept {
  return std::numbers::ln2 / rate_;
}

WeibullModel::WeibullModel(double shape, double scale)
    : shape_(require_positive(shape, "Weibull shape")),
      scale_(require_positive(scale, "Weibull scale")) {}

double WeibullModel::median() const noexcept {
  return scale_ * std::pow(std::numbers::ln2, 1.0 / shape_);
}

EnrollmentBeta::EnrollmentBeta(double period_a, double beta)
    : period_a_(require_positive(period_a, "enrollment period")),
      beta_(require_positive(beta, "enrollment beta")) {}

double cdf(const ExponentialModel& m, double t) {
  if (t <= 0.0) return 0.0;
  return -std::expm1(-m.rate() * t);
}

double survival(const ExponentialModel& m, double t) {
  if (t <= 0.0) return 1.0;
  return std::exp(-m.rate() * t);
}

double density(const ExponentialModel& m, double t) {
  if (t < 0.0) return 0.0;
  return m.rate() * std::exp(-m.rate() * t);
}

double quantile(const ExponentialModel& m, double p) {
  require_probability(p);
  return -std::log1p(-p) / m.rate();
}

double cdf(const WeibullModel& m, double t) {
  if (t <= 0.0) return 0.0;
  return -std::expm1(-std::pow(t / m.scale(), m.shape()));
}

double survival(const WeibullModel& m, double t) {
  if (t <= 0.0) return 1.0;
  return std::exp(-std::pow(t / m.scale(), m.shape()));
}

double density(const WeibullModel& m, double t) {
  if (t < 0.0) return 0.0;
  if (t == 0.0) {
    if (m.shape() < 1.0) return std::numeric_limits<double>::infinity();
    return m.shape() == 1.0 ? 1.0 / m.scale() : 0.0;
  }
  const double z = t / m.scale();
  const double zk = std::pow(z, m.shape());
  return m.shape() / m.scale() * zk / z * std::exp(-zk);
}

double quantile(const WeibullModel& m, double p) {
  require_probability(p);
  return m.scale() * std::pow(-std::log1p(-p), 1.0 / m.shape());
}

double cdf(const EnrollmentBeta& m, double u) {
  if (u <= 0.0) return 0.0;
  if (u >= m.period()) return 1.0;
  return -std::expm1(m.beta() * std::log1p(-u / m.period()));
}

double survival(const EnrollmentBeta& m, double u) {
  if (u <= 0.0) return 1.0;
  if (u >= m.period()) return 0.0;
  return std::pow(1.0 - u / m.period(), m.beta());
}

double density(const EnrollmentBeta& m, double u) {
  if (u < 0.0 || u > m.period()) return 0.0;
  return m.beta() / m.period() *
         std::pow(1.0 - u / m.period(), m.beta() - 1.0);
}

double quantile(const EnrollmentBeta& m, double p) {
  require_probability(p);
  return -m.period() * std::expm1(std::log1p(-p) / m.beta());
}

double cdf(const SurvivalModel& m, double t) {
  return std::visit([t](const auto& x) { return cdf(x, t); }, m);
}

double survival(const SurvivalModel& m, double t) {
  return std::visit([t](const auto& x) { return survival(x, t); }, m);
}

double density(const SurvivalModel& m, double t) {
  return std::visit([t](const auto& x) { return density(x, t); }, m);
}

double quantile(const SurvivalModel& m, double p) {
  return std::visit([p](const auto& x) { return quantile(x, p); }, m);
}

double median(const SurvivalModel& m) {
  return std::visit([](const auto& x) { return x.median(); }, m);
}

}  // namespace durasim
