#include "durasim/duration.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "durasim/errors.h"
#include "durasim/parallel.h"
#include "durasim/special_functions.h"

namespace durasim {
namespace {

constexpr double kMassMargin = 1e-12;
constexpr int kMaxBracketDoublings = 60;
constexpr int kMaxBisections = 200;

struct Root {
  double value = kUnreachable;
  int iterations = 0;
};

// Smallest t with f(t) >= target for nondecreasing f with f(0) = 0 and
// supremum `sup`. The bracket starts at [0, initial_hi] and doubles.
Root solve_increasing(const std::function<double(double)>& f, double target,
                      double sup, double initial_hi) {
  if (target <= 0.0) return {0.0, 0};
  if (target > sup - kMassMargin) return {kUnreachable, 0};

  double lo = 0.0;
  double hi = std::max(initial_hi, kBisectionTolerance);
  int iterations = 0;
  int doublings = 0;
  while (f(hi) < target) {
    lo = hi;
    hi *= 2.0;
    ++iterations;
    if (++doublings > kMaxBracketDoublings) {
      throw NumericError("bisection bracket could not be expanded", hi);
    }
  }
  while (hi - lo > kBisectionTolerance) {
    if (++iterations > kMaxBisections + kMaxBracketDoublings) {
      throw NumericError("bisection did not converge", 0.5 * (lo + hi));
    }
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {0.5 * (lo + hi), iterations};
}

void require_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw ParameterError("confidence level must lie in (0, 1)");
  }
}

// Type-7 (linear interpolation) sample quantile of sorted values; any
// interpolation that touches +inf yields +inf.
double sorted_quantile(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0 || lo + 1 >= sorted.size()) return sorted[lo];
  const double a = sorted[lo];
  const double b = sorted[lo + 1];
  if (is_unreachable(a) || is_unreachable(b)) return kUnreachable;
  return a + frac * (b - a);
}

}  // namespace

TrialSpec::TrialSpec(std::int64_t n, std::int64_t d,
                     std::vector<SubgroupArm> arms)
    : n_(n), d_(d), arms_(std::move(arms)) {
  if (n_ < 1) throw ConfigError("sample size n must be positive");
  if (d_ < 1 || d_ > n_) {
    throw ConfigError("target events d must satisfy 1 <= d <= n (d = " +
                      std::to_string(d_) + ", n = " + std::to_string(n_) +
                      ")");
  }
  validate_weights(arms_);
}

std::string_view to_string(DurationMethod method) {
  switch (method) {
    case DurationMethod::kPercentile:
      return "percentile";
    case DurationMethod::kExactMedian:
      return "exact-median";
    case DurationMethod::kMonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

DurationMethod parse_method(std::string_view name) {
  if (name == "percentile") return DurationMethod::kPercentile;
  if (name == "exact" || name == "exact-median") {
    return DurationMethod::kExactMedian;
  }
  if (name == "mc" || name == "monte-carlo") return DurationMethod::kMonteCarlo;
  throw ParameterError("unknown duration method '" + std::string(name) + "'");
}

DurationEstimate duration_percentile(const TrialSpec& spec) {
  const MixtureCdf mixture = spec.mixture();
  const double target =
      static_cast<double>(spec.d()) / static_cast<double>(spec.n());
  const Root root = solve_increasing(std::cref(mixture), target,
                                     mixture.total_mass(),
                                     mixture.enrollment_end());
  DurationEstimate est;
  est.point = est.interval_low = est.interval_high = root.value;
  est.method = DurationMethod::kPercentile;
  est.confidence = 0.0;
  est.diagnostics.bisection_iterations = root.iterations;
  est.diagnostics.unreachable_probability = root.value == kUnreachable;
  return est;
}

double order_statistic_cdf(const MixtureCdf& mixture, std::int64_t n,
                           std::int64_t d, double t) {
  return binomial_upper_tail(n, d, std::clamp(mixture(t), 0.0, 1.0));
}

double order_statistic_cdf(const TrialSpec& spec, double t) {
  return order_statistic_cdf(spec.mixture(), spec.n(), spec.d(), t);
}

double order_statistic_quantile(const MixtureCdf& mixture, std::int64_t n,
                                std::int64_t d, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ParameterError("order statistic quantile: p must lie in (0, 1)");
  }
  const double sup = binomial_upper_tail(n, d, mixture.total_mass());
  auto cdf_d = [&](double t) { return order_statistic_cdf(mixture, n, d, t); };
  return solve_increasing(cdf_d, p, sup, mixture.enrollment_end()).value;
}

DurationEstimate duration_exact_median(const TrialSpec& spec, double level) {
  require_level(level);
  const MixtureCdf mixture = spec.mixture();
  const std::int64_t n = spec.n();
  const std::int64_t d = spec.d();
  const double sup = binomial_upper_tail(n, d, mixture.total_mass());
  auto cdf_d = [&](double t) { return order_statistic_cdf(mixture, n, d, t); };

  DurationEstimate est;
  est.method = DurationMethod::kExactMedian;
  est.confidence = 1.0 - level;
  est.diagnostics.unreachable_probability = 1.0 - sup;
  const double start = mixture.enrollment_end();
  const Root mid = solve_increasing(cdf_d, 0.5, sup, start);
  const Root low = solve_increasing(cdf_d, 0.5 * level, sup, start);
  const Root high = solve_increasing(cdf_d, 1.0 - 0.5 * level, sup, start);
  est.point = mid.value;
  est.interval_low = low.value;
  est.interval_high = high.value;
  est.diagnostics.bisection_iterations =
      mid.iterations + low.iterations + high.iterations;
  return est;
}

std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

double sample_event_time(const SubgroupArm& arm, std::mt19937_64& engine) {
  const double u = quantile(arm.enrollment(), uniform01(engine));
  const double v = quantile(arm.event(), uniform01(engine));
  const double w = arm.dropout() ? quantile(*arm.dropout(), uniform01(engine))
                                 : kUnreachable;
  return v <= w ? u + v : kUnreachable;
}

std::vector<double> simulate_order_statistics(
    const TrialSpec& spec, const MonteCarloOptions& options) {
  if (options.reps < 1) throw ParameterError("reps must be positive");
  const auto& arms = spec.arms();
  std::vector<double> cumulative;
  cumulative.reserve(arms.size());
  double running = 0.0;
  for (const auto& arm : arms) {
    running += arm.weight();
    cumulative.push_back(running);
  }
  cumulative.back() = std::max(cumulative.back(), 1.0);

  const auto n = static_cast<std::size_t>(spec.n());
  const auto rank = static_cast<std::size_t>(spec.d() - 1);
  std::vector<double> result(static_cast<std::size_t>(options.reps));
  parallel_for(
      result.size(),
      [&](std::size_t rep) {
        auto engine = replicate_engine(options.seed, rep);
        std::vector<double> times(n);
        for (auto& time : times) {
          const double pick = uniform01(engine);
          const auto cell = static_cast<std::size_t>(
              std::upper_bound(cumulative.begin(), cumulative.end(), pick) -
              cumulative.begin());
          time = sample_event_time(arms[std::min(cell, arms.size() - 1)],
                                   engine);
        }
        std::nth_element(times.begin(),
                         times.begin() + static_cast<std::ptrdiff_t>(rank),
                         times.end());
        result[rep] = times[rank];
      },
      options.threads);
  return result;
}

DurationEstimate duration_montecarlo(const TrialSpec& spec,
                                     const MonteCarloOptions& options) {
  if (options.reps < 100) throw ParameterError("reps must be at least 100");
  require_level(options.level);
  std::vector<double> draws = simulate_order_statistics(spec, options);
  std::sort(draws.begin(), draws.end());

  DurationEstimate est;
  est.method = DurationMethod::kMonteCarlo;
  est.confidence = 1.0 - options.level;
  est.point = sorted_quantile(draws, 0.5);
  est.interval_low = sorted_quantile(draws, 0.5 * options.level);
  est.interval_high = sorted_quantile(draws, 1.0 - 0.5 * options.level);
  est.diagnostics.replicates = options.reps;
  const auto infinite = std::count_if(draws.begin(), draws.end(),
                                      [](double x) { return is_unreachable(x); });
  est.diagnostics.unreachable_probability =
      static_cast<double>(infinite) / static_cast<double>(draws.size());
  return est;
}

DurationEstimate estimate_duration(const TrialSpec& spec,
                                   const EstimateOptions& options) {
  switch (options.method) {
    case DurationMethod::kPercentile:
      return duration_percentile(spec);
    case DurationMethod::kExactMedian:
      return duration_exact_median(spec, options.level);
    case DurationMethod::kMonteCarlo:
      return duration_montecarlo(
          spec, {.reps = options.reps, .level = options.level,
                 .seed = options.seed});
  }
  throw ParameterError("unknown duration method");
}

}  // namespace durasim
