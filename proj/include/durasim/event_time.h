#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "durasim/distributions.h"

namespace durasim {

// One (treatment, subgroup) cell: its share of the enrolled population and
// the enrollment, event and drop-out models of its patients. A missing
// drop-out model means patients never drop out.
class SubgroupArm {
 public:
  SubgroupArm(double weight, EnrollmentBeta enrollment, SurvivalModel event,
              std::optional<SurvivalModel> dropout = std::nullopt,
              std::string label = {});

  double weight() const noexcept { return weight_; }
  const EnrollmentBeta& enrollment() const noexcept { return enrollment_; }
  const SurvivalModel& event() const noexcept { return event_; }
  const std::optional<SurvivalModel>& dropout() const noexcept {
    return dropout_;
  }
  const std::string& label() const noexcept { return label_; }

  SubgroupArm with_weight(double weight) const;

 private:
  double weight_;
  EnrollmentBeta enrollment_;
  SurvivalModel event_;
  std::optional<SurvivalModel> dropout_;
  std::string label_;
};

inline constexpr double kDefaultQuadratureTol = 1e-8;

// True when the event model is exponential and drop-out is exponential or
// absent, i.e. when cdf_closed_form applies.
bool has_closed_form(const SubgroupArm& arm);

// Closed-form P(U + V <= t, V <= W) for exponential event and drop-out
// times with Beta(1, beta) enrollment. Throws UnsupportedModelError for
// other families.
double cdf_closed_form(const SubgroupArm& arm, double t);

// Same quantity by nested adaptive quadrature; works for any model family.
// The drop-out density is integrated out analytically, leaving
//   F(t) = int_0^{min(t,a)} [ int_0^{t-u} S_W(v) dF_V(v) ] dF_U(u),
// and both remaining integrals are taken in probability scale so that
// density singularities at the endpoints disappear.
double cdf_quadrature(const SubgroupArm& arm, double t,
                      double tol = kDefaultQuadratureTol);

// P(V <= W): the finite mass of the arm's event-time distribution.
double observed_event_probability(const SubgroupArm& arm);

// Closed form where available, quadrature otherwise.
double arm_cdf(const SubgroupArm& arm, double t);

// Defective CDF of the time from study start to an observed event for the
// whole enrolled population, F_T(t) = sum_k r_k F_k(t). The atom at +inf
// (events lost to drop-out) is excluded from the evaluator and reported by
// total_mass().
class MixtureCdf {
 public:
  explicit MixtureCdf(std::vector<SubgroupArm> arms);

  double operator()(double t) const;
  double total_mass() const noexcept { return total_mass_; }
  // Latest enrollment completion time across arms.
  double enrollment_end() const noexcept { return enrollment_end_; }
  std::span<const SubgroupArm> arms() const noexcept { return arms_; }

 private:
  std::vector<SubgroupArm> arms_;
  std::vector<bool> closed_form_;
  double total_mass_;
  double enrollment_end_;
};

inline constexpr double kWeightSumTolerance = 1e-9;

// Throws ConfigError unless the weights sum to one.
void validate_weights(std::span<const SubgroupArm> arms);

double mixture_cdf(std::span<const SubgroupArm> arms, double t);

}  // namespace durasim
