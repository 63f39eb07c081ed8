#pragma once

#include <cstdint>

#include "durasim/duration.h"

namespace durasim {

// Prognostic biomarker: positive patients have hazard hr_pos times that of
// negative patients, in every treatment arm.
class BiomarkerSpec {
 public:
  BiomarkerSpec(double prevalence_q, double hr_pos);

  double prevalence() const noexcept { return prevalence_; }
  double hazard_ratio() const noexcept { return hr_pos_; }

 private:
  double prevalence_;
  double hr_pos_;
};

struct SubgroupMedians {
  double mst_neg;
  double mst_pos;
};

// Survival at `overall_mst` of the exponential biomarker mixture whose
// negative subgroup has median `mst_neg`, minus one half.
double median_residual(double overall_mst, double mst_neg,
                       const BiomarkerSpec& biomarker);

// Subgroup medians whose prevalence-weighted exponential mixture has median
// overall_mst. Solved by bisection on log(mst_neg) to full double precision.
SubgroupMedians solve_subgroup_medians(double overall_mst,
                                       const BiomarkerSpec& biomarker);

// Population-level parameters of a two-arm (1:1) placebo-controlled trial.
struct ScenarioParams {
  std::int64_t n = 140;
  std::int64_t d = 88;
  double enroll_rate = 10.0;    // patients per month, whole population
  double mst_pbo = 10.0;        // overall placebo median survival, months
  double treatment_hr = 0.5;    // treatment vs placebo
  double prevalence = 0.5;      // biomarker-positive fraction q
  double biomarker_hr = 1.0;    // positive vs negative hazard ratio
};

// Four arms (placebo/treatment x positive/negative), uniform enrollment over
// n / enroll_rate months, no drop-out.
TrialSpec build_allcomers_spec(std::int64_t n, std::int64_t d,
                               double enroll_rate, double overall_mst_pbo,
                               double treatment_hr,
                               const BiomarkerSpec& biomarker);

// Biomarker-positive patients only: two arms enrolled uniformly over
// (n / enroll_rate) / q months.
TrialSpec build_enrichment_spec(std::int64_t n, std::int64_t d,
                                double enroll_rate, double overall_mst_pbo,
                                double treatment_hr,
                                const BiomarkerSpec& biomarker);

TrialSpec build_allcomers_spec(const ScenarioParams& p);
TrialSpec build_enrichment_spec(const ScenarioParams& p);

}  // namespace durasim
