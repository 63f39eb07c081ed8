#include "durasim/event_time.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "durasim/errors.h"
#include "durasim/quadrature.h"
#include "durasim/special_functions.h"

namespace durasim {
namespace {

// Hazard of an exponential model, or 0 for an absent drop-out model.
std::optional<double> exponential_rate(const std::optional<SurvivalModel>& m) {
  if (!m) return 0.0;
  if (const auto* e = std::get_if<ExponentialModel>(&*m)) return e->rate();
  return std::nullopt;
}

void require_time(double t) {
  if (std::isnan(t) || t < 0.0) {
    throw ParameterError("event time CDF: t must be nonnegative");
  }
}

// int_0^{s} S_W(v) dF_V(v), with tolerance tol.
double observed_within(const SubgroupArm& arm, double s, double tol) {
  if (s <= 0.0) return 0.0;
  const double upper = cdf(arm.event(), s);
  if (!arm.dropout()) return upper;
  const auto& event = arm.event();
  const auto& dropout = *arm.dropout();
  auto integrand = [&](double p) {
    return survival(dropout, quantile(event, p));
  };
  return integrate(integrand, 0.0, upper, {.abs_tol = tol}).value;
}

}  // namespace

SubgroupArm::SubgroupArm(double weight, EnrollmentBeta enrollment,
                         SurvivalModel event,
                         std::optional<SurvivalModel> dropout,
                         std::string label)
    : weight_(weight),
      enrollment_(enrollment),
      event_(event),
      dropout_(std::move(dropout)),
      label_(std::move(label)) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw ParameterError("arm weight must lie in [0, 1]");
  }
}

SubgroupArm SubgroupArm::with_weight(double weight) const {
  return SubgroupArm(weight, enrollment_, event_, dropout_, label_);
}

bool has_closed_form(const SubgroupArm& arm) {
  return std::holds_alternative<ExponentialModel>(arm.event()) &&
         exponential_rate(arm.dropout()).has_value();
}

double cdf_closed_form(const SubgroupArm& arm, double t) {
  require_time(t);
  if (!has_closed_form(arm)) {
    throw UnsupportedModelError(
        "closed-form event CDF needs exponential event and drop-out models");
  }
  const double event_rate = std::get<ExponentialModel>(arm.event()).rate();
  const double lambda = event_rate + *exponential_rate(arm.dropout());
  const double prefactor = event_rate / lambda;
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return prefactor;

  const double a = arm.enrollment().period();
  const double beta = arm.enrollment().beta();
  const double x0 = std::max(0.0, a - t);
  const double head = 1.0 - std::pow(x0 / a, beta);

  // Gamma(beta, lambda) CDF difference over (x0, a). Upper regularized
  // values keep the difference accurate when both arguments are large.
  double diff = 0.0;
  if (x0 == 0.0) {
    diff = gamma_p(beta, lambda * a);
  } else if (lambda * x0 >= beta + 1.0) {
    diff = gamma_q(beta, lambda * x0) - gamma_q(beta, lambda * a);
  } else {
    diff = gamma_p(beta, lambda * a) - gamma_p(beta, lambda * x0);
  }
  double tail = 0.0;
  if (diff > 0.0) {
    const double log_coef = std::log(beta) + std::lgamma(beta) -
                            beta * std::log(a * lambda) - lambda * (t - a);
    tail = std::exp(log_coef + std::log(diff));
  }
  return std::clamp(prefactor * (head - tail), 0.0, prefactor);
}

double cdf_quadrature(const SubgroupArm& arm, double t, double tol) {
  require_time(t);
  if (!(tol > 0.0)) throw ParameterError("cdf_quadrature: tol must be > 0");
  if (t == 0.0) return 0.0;
  if (std::isinf(t)) return observed_event_probability(arm);

  const auto& enrollment = arm.enrollment();
  const double upper = cdf(enrollment, std::min(t, enrollment.period()));
  const double inner_tol = 0.5 * tol;
  auto integrand = [&](double p) {
    return observed_within(arm, t - quantile(enrollment, p), inner_tol);
  };
  return integrate(integrand, 0.0, upper, {.abs_tol = 0.5 * tol}).value;
}

double observed_event_probability(const SubgroupArm& arm) {
  if (!arm.dropout()) return 1.0;
  if (has_closed_form(arm)) {
    const double event_rate = std::get<ExponentialModel>(arm.event()).rate();
    return event_rate / (event_rate + *exponential_rate(arm.dropout()));
  }
  const auto& event = arm.event();
  const auto& dropout = *arm.dropout();
  auto integrand = [&](double p) {
    return survival(dropout, quantile(event, p));
  };
  return integrate(integrand, 0.0, 1.0, {.abs_tol = 1e-12, .max_subdivisions = 400})
      .value;
}

double arm_cdf(const SubgroupArm& arm, double t) {
  return has_closed_form(arm) ? cdf_closed_form(arm, t)
                              : cdf_quadrature(arm, t);
}

void validate_weights(std::span<const SubgroupArm> arms) {
  if (arms.empty()) throw ConfigError("mixture needs at least one arm");
  double sum = 0.0;
  for (const auto& arm : arms) sum += arm.weight();
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw ConfigError("arm weights sum to " + std::to_string(sum) +
                      ", expected 1");
  }
}

MixtureCdf::MixtureCdf(std::vector<SubgroupArm> arms)
    : arms_(std::move(arms)), total_mass_(0.0), enrollment_end_(0.0) {
  validate_weights(arms_);
  closed_form_.reserve(arms_.size());
  for (const auto& arm : arms_) {
    closed_form_.push_back(has_closed_form(arm));
    total_mass_ += arm.weight() * observed_event_probability(arm);
    enrollment_end_ = std::max(enrollment_end_, arm.enrollment().period());
  }
}

double MixtureCdf::operator()(double t) const {
  require_time(t);
  if (std::isinf(t)) return total_mass_;
  double value = 0.0;
  for (std::size_t i = 0; i < arms_.size(); ++i) {
    const auto& arm = arms_[i];
    if (arm.weight() == 0.0) continue;
    value += arm.weight() * (closed_form_[i] ? cdf_closed_form(arm, t)
                                             : cdf_quadrature(arm, t));
  }
  return std::min(value, total_mass_);
}

double mixture_cdf(std::span<const SubgroupArm> arms, double t) {
  return MixtureCdf(std::vector<SubgroupArm>(arms.begin(), arms.end()))(t);
}

}  // namespace durasim
