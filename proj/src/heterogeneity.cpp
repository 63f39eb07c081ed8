#include "durasim/heterogeneity.h"

#include <cmath>
#include <numbers>
#include <string>

#include "durasim/errors.h"

namespace durasim {
namespace {

constexpr int kMaxBracketSteps = 200;

void require_positive(double value, const char* what) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ParameterError(std::string(what) + " must be positive and finite");
  }
}

void require_trial_size(std::int64_t n, std::int64_t d) {
  if (n < 1 || d < 1 || d > n) {
    throw ConfigError("need 1 <= d <= n");
  }
}

}  // namespace

BiomarkerSpec::BiomarkerSpec(double prevalence_q, double hr_pos)
    : prevalence_(prevalence_q), hr_pos_(hr_pos) {
  if (!(prevalence_q > 0.0 && prevalence_q <= 1.0)) {
    throw ParameterError("biomarker prevalence must lie in (0, 1]");
  }
  require_positive(hr_pos, "biomarker hazard ratio");
}

double median_residual(double overall_mst, double mst_neg,
                       const BiomarkerSpec& biomarker) {
  const double q = biomarker.prevalence();
  const double x = std::numbers::ln2 * overall_mst / mst_neg;
  return q * std::exp(-biomarker.hazard_ratio() * x) +
         (1.0 - q) * std::exp(-x) - 0.5;
}

SubgroupMedians solve_subgroup_medians(double overall_mst,
                                       const BiomarkerSpec& biomarker) {
  require_positive(overall_mst, "overall median survival");
  const double hr = biomarker.hazard_ratio();
  if (hr == 1.0) return {overall_mst, overall_mst};

  // Residual is increasing in mst_neg; bisect in log space.
  double lo = std::log(overall_mst * 1e-3);
  double hi = std::log(overall_mst * 1e3);
  auto residual = [&](double log_m) {
    return median_residual(overall_mst, std::exp(log_m), biomarker);
  };
  int steps = 0;
  while (residual(lo) > 0.0) {
    lo -= std::log(1e3);
    if (++steps > kMaxBracketSteps) {
      throw NumericError("subgroup median bracket expansion failed", lo);
    }
  }
  while (residual(hi) < 0.0) {
    hi += std::log(1e3);
    if (++steps > kMaxBracketSteps) {
      throw NumericError("subgroup median bracket expansion failed", hi);
    }
  }
  while (true) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double mst_neg =
      std::abs(residual(lo)) < std::abs(residual(hi)) ? std::exp(lo)
                                                      : std::exp(hi);
  return {mst_neg, mst_neg / hr};
}

TrialSpec build_allcomers_spec(std::int64_t n, std::int64_t d,
                               double enroll_rate, double overall_mst_pbo,
                               double treatment_hr,
                               const BiomarkerSpec& biomarker) {
  require_trial_size(n, d);
  require_positive(enroll_rate, "enrollment rate");
  require_positive(treatment_hr, "treatment hazard ratio");
  const auto pbo = solve_subgroup_medians(overall_mst_pbo, biomarker);
  const auto enrollment =
      EnrollmentBeta::uniform(static_cast<double>(n) / enroll_rate);
  const double q = biomarker.prevalence();
  auto arm = [&](double weight, double median, const char* label) {
    return SubgroupArm(weight, enrollment,
                       ExponentialModel::from_median(median), std::nullopt,
                       label);
  };
  std::vector<SubgroupArm> arms;
  arms.push_back(arm(0.5 * q, pbo.mst_pos, "placebo/positive"));
  arms.push_back(arm(0.5 * (1.0 - q), pbo.mst_neg, "placebo/negative"));
  arms.push_back(arm(0.5 * q, pbo.mst_pos / treatment_hr, "treatment/positive"));
  arms.push_back(
      arm(0.5 * (1.0 - q), pbo.mst_neg / treatment_hr, "treatment/negative"));
  return TrialSpec(n, d, std::move(arms));
}

TrialSpec build_enrichment_spec(std::int64_t n, std::int64_t d,
                                double enroll_rate, double overall_mst_pbo,
                                double treatment_hr,
                                const BiomarkerSpec& biomarker) {
  require_trial_size(n, d);
  require_positive(enroll_rate, "enrollment rate");
  require_positive(treatment_hr, "treatment hazard ratio");
  const auto pbo = solve_subgroup_medians(overall_mst_pbo, biomarker);
  const double period =
      static_cast<double>(n) / enroll_rate / biomarker.prevalence();
  const auto enrollment = EnrollmentBeta::uniform(period);
  std::vector<SubgroupArm> arms;
  arms.emplace_back(0.5, enrollment, ExponentialModel::from_median(pbo.mst_pos),
                    std::nullopt, "placebo/positive");
  arms.emplace_back(0.5, enrollment,
                    ExponentialModel::from_median(pbo.mst_pos / treatment_hr),
                    std::nullopt, "treatment/positive");
  return TrialSpec(n, d, std::move(arms));
}

TrialSpec build_allcomers_spec(const ScenarioParams& p) {
  return build_allcomers_spec(p.n, p.d, p.enroll_rate, p.mst_pbo,
                              p.treatment_hr,
                              BiomarkerSpec(p.prevalence, p.biomarker_hr));
}

TrialSpec build_enrichment_spec(const ScenarioParams& p) {
  return build_enrichment_spec(p.n, p.d, p.enroll_rate, p.mst_pbo,
                               p.treatment_hr,
                               BiomarkerSpec(p.prevalence, p.biomarker_hr));
}

}  // namespace durasim
