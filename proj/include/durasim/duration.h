#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

#include "durasim/event_time.h"

namespace durasim {

// Sample size n, target event count d and the population mixture.
class TrialSpec {
 public:
  TrialSpec(std::int64_t n, std::int64_t d, std::vector<SubgroupArm> arms);

  std::int64_t n() const noexcept { return n_; }
  std::int64_t d() const noexcept { return d_; }
  const std::vector<SubgroupArm>& arms() const noexcept { return arms_; }
  MixtureCdf mixture() const { return MixtureCdf(arms_); }

 private:
  std::int64_t n_;
  std::int64_t d_;
  std::vector<SubgroupArm> arms_;
};

// A duration that is never reached (the d-th event is censored away).
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

inline bool is_unreachable(double months) { return months == kUnreachable; }

enum class DurationMethod { kPercentile, kExactMedian, kMonteCarlo };

std::string_view to_string(DurationMethod method);
// Accepts "percentile", "exact" / "exact-median", "mc" / "monte-carlo".
DurationMethod parse_method(std::string_view name);

struct DurationDiagnostics {
  std::int64_t replicates = 0;
  int bisection_iterations = 0;
  // Estimated P(T_(d) = +inf); exact for the order-statistic method.
  double unreachable_probability = 0.0;

  bool operator==(const DurationDiagnostics&) const = default;
};

struct DurationEstimate {
  double point = kUnreachable;
  double interval_low = kUnreachable;
  double interval_high = kUnreachable;
  DurationMethod method = DurationMethod::kExactMedian;
  // Nominal coverage of [interval_low, interval_high]; 0 for percentile.
  double confidence = 0.0;
  DurationDiagnostics diagnostics;

  bool reachable() const noexcept { return !is_unreachable(point); }
  bool operator==(const DurationEstimate&) const = default;
};

inline constexpr double kBisectionTolerance = 1e-6;

// F_T^{-1}(d/n), the large-sample limit of the d-th order statistic.
DurationEstimate duration_percentile(const TrialSpec& spec);

// P(T_(d) <= t) = P(Binomial(n, F_T(t)) >= d).
double order_statistic_cdf(const TrialSpec& spec, double t);
double order_statistic_cdf(const MixtureCdf& mixture, std::int64_t n,
                           std::int64_t d, double t);

// Smallest t with P(T_(d) <= t) >= p, or kUnreachable when the order
// statistic never reaches probability p.
double order_statistic_quantile(const MixtureCdf& mixture, std::int64_t n,
                                std::int64_t d, double p);

// Median and (level/2, 1 - level/2) quantiles of T_(d) from its exact
// distribution.
DurationEstimate duration_exact_median(const TrialSpec& spec,
                                       double level = 0.05);

struct MonteCarloOptions {
  std::int64_t reps = 10000;
  double level = 0.05;
  std::uint64_t seed = 20240101;
  unsigned threads = 0;  // 0 = worker_count()
};

// Replicate engine for stream `index` of `seed`; streams are independent of
// the number of worker threads.
std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t index);

// Uniform on [0, 1) built from the top 53 bits of one engine draw.
double uniform01(std::mt19937_64& engine);

// One draw of T: U + V when V <= W, +inf otherwise.
double sample_event_time(const SubgroupArm& arm, std::mt19937_64& engine);

// d-th order statistic for each of `reps` simulated trials.
std::vector<double> simulate_order_statistics(const TrialSpec& spec,
                                              const MonteCarloOptions& options);

DurationEstimate duration_montecarlo(const TrialSpec& spec,
                                     const MonteCarloOptions& options = {});

struct EstimateOptions {
  DurationMethod method = DurationMethod::kExactMedian;
  double level = 0.05;
  std::int64_t reps = 10000;
  std::uint64_t seed = 20240101;
};

DurationEstimate estimate_duration(const TrialSpec& spec,
                                   const EstimateOptions& options = {});

}  // namespace durasim
