#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "durasim/distributions.h"
#include "durasim/duration.h"

namespace durasim {

struct CensoredTime {
  double time;  // months from enrollment
  bool event;   // false = right censored
};

// Right-censored Weibull log-likelihood:
// sum over events of log f(t) plus sum over censored of log S(t).
double weibull_log_likelihood(std::span<const CensoredTime> data,
                              const WeibullModel& model);

// Maximum likelihood Weibull fit under right censoring. The scale is
// profiled out in closed form and the shape is found by safeguarded Newton
// iteration on the profile score, starting from shape 1.
WeibullModel fit_weibull_censored(std::span<const CensoredTime> data);

// Closed-form MLE of beta for U / a ~ Beta(1, beta):
// beta = -n / sum log(1 - u_i / a).
EnrollmentBeta fit_enrollment_beta(std::span<const double> enroll_times,
                                   double period_a);

// Same with a = max(u_i) (n + 1) / n, the unbiased endpoint for uniform
// enrollment starting at 0.
EnrollmentBeta fit_enrollment_beta(std::span<const double> enroll_times);

struct PatientRecord {
  double enroll_time = 0.0;    // months since study start
  double followup_time = 0.0;  // months from enrollment
  bool event = false;
  std::string arm;
  std::string subgroup;
};

// First n records by enrollment time, after keeping only `subgroup` when
// given. Ties keep input order.
std::vector<PatientRecord> select_first_n(
    std::span<const PatientRecord> records,
    const std::optional<std::string>& subgroup, std::int64_t n);

struct FittedCell {
  std::string arm;
  std::string subgroup;
  WeibullModel survival;
  double weight;
  std::int64_t patients;
  std::int64_t events;
};

struct FittedDesign {
  std::vector<FittedCell> cells;
  EnrollmentBeta enrollment;
  std::int64_t n_used;
  // Enrollment time of the first patient; fitted enrollment times are
  // measured from here.
  double origin;

  TrialSpec trial(std::int64_t d) const;
};

// Weibull survival per (arm, subgroup) cell and a Beta(1, beta) enrollment
// model, all from the given records.
FittedDesign fit_design(std::span<const PatientRecord> records,
                        std::optional<double> period_a = std::nullopt);

nlohmann::json to_json(const FittedDesign& design);

struct ReassessRow {
  std::int64_t d;
  // kUnreachable in actual_months means fewer than d events were observed.
  double actual_months;
  double calculated_months;

  bool observed() const noexcept { return !is_unreachable(actual_months); }
  // "ok", "unobserved", "unreachable" or "unobserved+unreachable".
  std::string flag() const;
};

struct ReassessResult {
  FittedDesign design;
  std::vector<ReassessRow> rows;
};

// Actual duration (first enrollment to the d-th observed event among the
// first n patients) next to the exact-median duration of a model fitted to
// those same patients, for each d.
ReassessResult reassess(std::span<const PatientRecord> records,
                        const std::optional<std::string>& subgroup,
                        std::int64_t n, std::span<const std::int64_t> d_values);

}  // namespace durasim
