#include "durasim/fitting.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "durasim/errors.h"

namespace durasim {
namespace {

constexpr double kScoreTolerance = 1e-10;
constexpr int kMaxNewtonIterations = 500;
constexpr double kMaxShape = 1e4;

// Profile score in the Weibull shape k for log times x (max x = 0) and
// event indicators; see fit_weibull_censored.
struct ProfileScore {
  std::span<const double> log_times;
  std::span<const CensoredTime> data;
  double events;
  double event_log_sum;

  // Returns {score, derivative}.
  std::pair<double, double> operator()(double k) const {
    double s0 = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
    for (double x : log_times) {
      const double w = std::exp(k * x);
      s0 += w;
      s1 += w * x;
      s2 += w * x * x;
    }
    const double mean = s1 / s0;
    const double var = std::max(0.0, s2 / s0 - mean * mean);
    const double score = events / k + event_log_sum - events * mean;
    const double slope = -events / (k * k) - events * var;
    return {score, slope};
  }
};

}  // namespace

double weibull_log_likelihood(std::span<const CensoredTime> data,
                              const WeibullModel& model) {
  const double k = model.shape();
  const double sigma = model.scale();
  double ll = 0.0;
  for (const auto& obs : data) {
    const double z = obs.time / sigma;
    const double zk = std::pow(z, k);
    ll -= zk;
    if (obs.event) ll += std::log(k / sigma) + (k - 1.0) * std::log(z);
  }
  return ll;
}

WeibullModel fit_weibull_censored(std::span<const CensoredTime> data) {
  std::size_t events = 0;
  double max_time = 0.0;
  for (const auto& obs : data) {
    if (!std::isfinite(obs.time) || obs.time <= 0.0) {
      throw DomainError("Weibull fit: all times must be positive and finite");
    }
    events += obs.event ? 1 : 0;
    max_time = std::max(max_time, obs.time);
  }
  if (events < 3) {
    throw InsufficientDataError("Weibull fit needs at least 3 events, got " +
                                std::to_string(events));
  }

  // Work with t / max(t) so every weight exp(k log t) lies in (0, 1].
  std::vector<double> log_times;
  log_times.reserve(data.size());
  double event_log_sum = 0.0;
  for (const auto& obs : data) {
    const double x = std::log(obs.time / max_time);
    log_times.push_back(x);
    if (obs.event) event_log_sum += x;
  }
  const ProfileScore score{log_times, data, static_cast<double>(events),
                           event_log_sum};

  // The score decreases in k from +inf at k -> 0.
  double lo = 0.0;
  double hi = 1.0;
  while (score(hi).first > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxShape) {
      throw NumericError("Weibull fit: shape diverges (degenerate data)", hi);
    }
  }

  double k = 1.0;
  bool converged = false;
  for (int it = 0; it < kMaxNewtonIterations; ++it) {
    const auto [g, slope] = score(k);
    if (std::abs(g) < kScoreTolerance) {
      converged = true;
      break;
    }
    if (g > 0.0) {
      lo = k;
    } else {
      hi = k;
    }
    if (hi - lo <= 1e-15 * hi) {
      converged = true;
      break;
    }
    double next = k - g / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    k = next;
  }
  if (!converged) {
    throw NumericError("Weibull fit: shape iteration did not converge", k);
  }

  double s0 = 0.0;
  for (double x : log_times) s0 += std::exp(k * x);
  const double scale =
      max_time * std::pow(s0 / static_cast<double>(events), 1.0 / k);
  return WeibullModel(k, scale);
}

EnrollmentBeta fit_enrollment_beta(std::span<const double> enroll_times,
                                   double period_a) {
  if (enroll_times.size() < 2) {
    throw InsufficientDataError("enrollment fit needs at least 2 times");
  }
  if (!std::isfinite(period_a) || period_a <= 0.0) {
    throw ParameterError("enrollment period must be positive and finite");
  }
  double log_sum = 0.0;
  for (double u : enroll_times) {
    if (!(u >= 0.0 && u < period_a)) {
      throw DomainError("enrollment time " + std::to_string(u) +
                        " outside [0, " + std::to_string(period_a) + ")");
    }
    log_sum += std::log1p(-u / period_a);
  }
  if (log_sum == 0.0) {
    throw DomainError("enrollment fit: all enrollment times are zero");
  }
  return EnrollmentBeta(period_a,
                        -static_cast<double>(enroll_times.size()) / log_sum);
}

EnrollmentBeta fit_enrollment_beta(std::span<const double> enroll_times) {
  if (enroll_times.empty()) {
    throw InsufficientDataError("enrollment fit needs at least 2 times");
  }
  const double latest =
      *std::max_element(enroll_times.begin(), enroll_times.end());
  if (!(latest > 0.0)) {
    throw DomainError("enrollment fit: all enrollment times are zero");
  }
  const auto n = static_cast<double>(enroll_times.size());
  return fit_enrollment_beta(enroll_times, latest * (n + 1.0) / n);
}

std::vector<PatientRecord> select_first_n(
    std::span<const PatientRecord> records,
    const std::optional<std::string>& subgroup, std::int64_t n) {
  if (n < 1) throw ParameterError("n must be positive");
  std::vector<PatientRecord> kept;
  for (const auto& r : records) {
    if (!subgroup || r.subgroup == *subgroup) kept.push_back(r);
  }
  if (static_cast<std::int64_t>(kept.size()) < n) {
    throw InsufficientDataError(
        "only " + std::to_string(kept.size()) + " records" +
        (subgroup ? " in subgroup '" + *subgroup + "'" : std::string()) +
        ", need n = " + std::to_string(n));
  }
  std::stable_sort(kept.begin(), kept.end(),
                   [](const PatientRecord& a, const PatientRecord& b) {
                     return a.enroll_time < b.enroll_time;
                   });
  kept.resize(static_cast<std::size_t>(n));
  return kept;
}

TrialSpec FittedDesign::trial(std::int64_t d) const {
  std::vector<SubgroupArm> arms;
  arms.reserve(cells.size());
  for (const auto& cell : cells) {
    arms.emplace_back(cell.weight, enrollment, cell.survival, std::nullopt,
                      cell.arm + "/" + cell.subgroup);
  }
  return TrialSpec(n_used, d, std::move(arms));
}

FittedDesign fit_design(std::span<const PatientRecord> records,
                        std::optional<double> period_a) {
  if (records.size() < 2) {
    throw InsufficientDataError("fit needs at least 2 patient records");
  }
  double origin = records.front().enroll_time;
  for (const auto& r : records) origin = std::min(origin, r.enroll_time);

  std::vector<double> enroll;
  enroll.reserve(records.size());
  // Cells in order of first appearance.
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::vector<CensoredTime>>
      by_cell;
  for (const auto& r : records) {
    enroll.push_back(r.enroll_time - origin);
    auto key = std::make_pair(r.arm, r.subgroup);
    auto [it, inserted] = by_cell.try_emplace(key);
    if (inserted) keys.push_back(key);
    it->second.push_back({r.followup_time, r.event});
  }

  // Times are measured from the first enrollee, so the observed range
  // spans n - 1 spacings of the n + 1 that make up the period.
  const double range = *std::max_element(enroll.begin(), enroll.end());
  const auto n = static_cast<double>(enroll.size());
  const EnrollmentBeta enrollment = fit_enrollment_beta(
      enroll, period_a.value_or(range * (n + 1.0) / (n - 1.0)));

  std::vector<FittedCell> cells;
  const auto total = static_cast<double>(records.size());
  for (const auto& key : keys) {
    const auto& data = by_cell.at(key);
    const auto events = std::count_if(data.begin(), data.end(),
                                      [](const CensoredTime& c) { return c.event; });
    WeibullModel model = [&] {
      try {
        return fit_weibull_censored(data);
      } catch (const InsufficientDataError& e) {
        throw InsufficientDataError("cell " + key.first + "/" + key.second +
                                    ": " + e.what());
      }
    }();
    cells.push_back({key.first, key.second, model,
                     static_cast<double>(data.size()) / total,
                     static_cast<std::int64_t>(data.size()),
                     static_cast<std::int64_t>(events)});
  }
  return {std::move(cells), enrollment,
          static_cast<std::int64_t>(records.size()), origin};
}

nlohmann::json to_json(const FittedDesign& design) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : design.cells) {
    cells.push_back({{"arm", c.arm},
                     {"subgroup", c.subgroup},
                     {"weight", c.weight},
                     {"patients", c.patients},
                     {"events", c.events},
                     {"weibull",
                      {{"shape", c.survival.shape()},
                       {"scale", c.survival.scale()},
                       {"median", c.survival.median()}}}});
  }
  return {{"n_used", design.n_used},
          {"origin", design.origin},
          {"enrollment",
           {{"period_a", design.enrollment.period()},
            {"beta", design.enrollment.beta()}}},
          {"cells", std::move(cells)}};
}

std::string ReassessRow::flag() const {
  const bool unreachable = is_unreachable(calculated_months);
  if (observed()) return unreachable ? "unreachable" : "ok";
  return unreachable ? "unobserved+unreachable" : "unobserved";
}

ReassessResult reassess(std::span<const PatientRecord> records,
                        const std::optional<std::string>& subgroup,
                        std::int64_t n, std::span<const std::int64_t> d_values) {
  const auto chosen = select_first_n(records, subgroup, n);
  FittedDesign design = fit_design(chosen);

  std::vector<double> event_times;
  for (const auto& r : chosen) {
    if (r.event) event_times.push_back(r.enroll_time + r.followup_time);
  }
  std::sort(event_times.begin(), event_times.end());

  // The mixture does not depend on d; build it once.
  const MixtureCdf mixture = design.trial(1).mixture();
  std::vector<ReassessRow> rows;
  rows.reserve(d_values.size());
  for (std::int64_t d : d_values) {
    if (d < 1 || d > n) {
      throw ConfigError("d = " + std::to_string(d) + " outside [1, n]");
    }
    const double actual =
        d <= static_cast<std::int64_t>(event_times.size())
            ? event_times[static_cast<std::size_t>(d - 1)] - design.origin
            : kUnreachable;
    rows.push_back({d, actual, order_statistic_quantile(mixture, n, d, 0.5)});
  }
  return {std::move(design), std::move(rows)};
}

}  // namespace durasim
