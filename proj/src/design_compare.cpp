#include "durasim/design_compare.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <string>

#include "durasim/errors.h"
#include "durasim/parallel.h"

namespace durasim {
namespace {

void require_positive(double value, const char* what) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw ParameterError(std::string(what) + " must be positive and finite");
  }
}

void require_time(double t) {
  if (std::isnan(t) || t < 0.0) {
    throw ParameterError("t must be nonnegative");
  }
}

// Share of a uniformly enrolled subgroup with hazard `rate` that enrolled
// over (0, period) and has an event by t, omitting the enrollment factor:
// e^{-rate t} (e^{rate min(period, t)} - 1) / rate.
double pending_mass(double rate, double period, double t) {
  const double m = std::min(period, t);
  return std::exp(-rate * (t - m)) * -std::expm1(-rate * m) / rate;
}

// (e^{-rate (t - a)} - e^{-rate t}) / rate for t >= a.
double enrolled_tail(double rate, double a, double t) {
  return std::exp(-rate * (t - a)) * -std::expm1(-rate * a) / rate;
}

}  // namespace

CompareScenario::CompareScenario(double prevalence_r1, double lambda_pos,
                                 double lambda_neg, double period_a,
                                 std::int64_t n, std::int64_t d)
    : r1_(prevalence_r1),
      lambda_pos_(lambda_pos),
      lambda_neg_(lambda_neg),
      period_a_(period_a),
      n_(n),
      d_(d) {
  if (!(prevalence_r1 > 0.0 && prevalence_r1 <= 1.0)) {
    throw ParameterError("prevalence r1 must lie in (0, 1]");
  }
  require_positive(lambda_pos, "lambda_pos");
  require_positive(lambda_neg, "lambda_neg");
  require_positive(period_a, "enrollment period");
  if (n < 1 || d < 1 || d > n) throw ConfigError("need 1 <= d <= n");
}

double cdf_allcomers(const CompareScenario& s, double t) {
  require_time(t);
  const double a = s.period();
  const double r1 = s.prevalence();
  return 1.0 - std::max(0.0, 1.0 - t / a) -
         r1 / a * pending_mass(s.lambda_pos(), a, t) -
         (1.0 - r1) / a * pending_mass(s.lambda_neg(), a, t);
}

double cdf_enrichment(const CompareScenario& s, double t) {
  require_time(t);
  const double a = s.period();
  const double r1 = s.prevalence();
  return 1.0 - std::max(0.0, 1.0 - r1 * t / a) -
         r1 / a * pending_mass(s.lambda_pos(), a / r1, t);
}

double cdf_difference_piecewise(const CompareScenario& s, double t) {
  require_time(t);
  const double a = s.period();
  const double r1 = s.prevalence();
  const double l1 = s.lambda_pos();
  const double l2 = s.lambda_neg();
  if (t == 0.0) return 0.0;
  if (t <= a) {
    return (1.0 - r1) / a * (-std::expm1(-l2 * t) / l2 - t);
  }
  const double negative_part = (1.0 - r1) / a * enrolled_tail(l2, a, t);
  if (t <= a / r1) {
    return -(1.0 - r1) +
           r1 / a * ((t - a) + std::expm1(-l1 * (t - a)) / l1) +
           negative_part;
  }
  const double positive_part = std::exp(-l1 * (t - a / r1)) *
                               std::expm1(-l1 * a * (1.0 / r1 - 1.0)) / l1;
  return r1 / a * positive_part + negative_part;
}

TrialSpec allcomers_trial(const CompareScenario& s) {
  const auto enrollment = EnrollmentBeta::uniform(s.period());
  std::vector<SubgroupArm> arms;
  arms.emplace_back(s.prevalence(), enrollment, ExponentialModel(s.lambda_pos()),
                    std::nullopt, "positive");
  arms.emplace_back(1.0 - s.prevalence(), enrollment,
                    ExponentialModel(s.lambda_neg()), std::nullopt, "negative");
  return TrialSpec(s.n(), s.d(), std::move(arms));
}

TrialSpec enrichment_trial(const CompareScenario& s) {
  std::vector<SubgroupArm> arms;
  arms.emplace_back(1.0, EnrollmentBeta::uniform(s.period() / s.prevalence()),
                    ExponentialModel(s.lambda_pos()), std::nullopt, "positive");
  return TrialSpec(s.n(), s.d(), std::move(arms));
}

DurationComparison duration_difference(const TrialSpec& allcomers,
                                       const TrialSpec& enrichment,
                                       const EstimateOptions& options) {
  if (allcomers.n() != enrichment.n() || allcomers.d() != enrichment.d()) {
    throw ConfigError("compared designs must share n and d");
  }
  DurationComparison result{estimate_duration(allcomers, options),
                            estimate_duration(enrichment, options),
                            std::nullopt};
  if (result.allcomers.reachable() && result.enrichment.reachable()) {
    result.difference = result.allcomers.point - result.enrichment.point;
  }
  return result;
}

std::string_view to_string(ScenarioParam param) {
  switch (param) {
    case ScenarioParam::kPrevalence:
      return "prevalence";
    case ScenarioParam::kHazardRatio:
      return "hazard_ratio";
    case ScenarioParam::kEnrollRate:
      return "enroll_rate";
    case ScenarioParam::kMstPbo:
      return "mst_pbo";
  }
  return "unknown";
}

ScenarioParam parse_scenario_param(std::string_view name) {
  for (auto p : {ScenarioParam::kPrevalence, ScenarioParam::kHazardRatio,
                 ScenarioParam::kEnrollRate, ScenarioParam::kMstPbo}) {
    if (name == to_string(p)) return p;
  }
  throw ParameterError("unknown heatmap parameter '" + std::string(name) +
                       "' (expected prevalence, hazard_ratio, enroll_rate or "
                       "mst_pbo)");
}

ScenarioParams with_param(ScenarioParams base, ScenarioParam param,
                          double value) {
  switch (param) {
    case ScenarioParam::kPrevalence:
      base.prevalence = value;
      break;
    case ScenarioParam::kHazardRatio:
      base.biomarker_hr = value;
      break;
    case ScenarioParam::kEnrollRate:
      base.enroll_rate = value;
      break;
    case ScenarioParam::kMstPbo:
      base.mst_pbo = value;
      break;
  }
  return base;
}

DurationComparison compare_designs(const ScenarioParams& params,
                                   const EstimateOptions& options) {
  return duration_difference(build_allcomers_spec(params),
                             build_enrichment_spec(params), options);
}

HeatmapGrid heatmap(const ScenarioParams& base, const HeatmapAxis& x_axis,
                    const HeatmapAxis& y_axis, const EstimateOptions& options) {
  if (x_axis.values.empty() || y_axis.values.empty()) {
    throw ParameterError("heatmap axes must be nonempty");
  }
  if (x_axis.param == y_axis.param) {
    throw ParameterError("heatmap axes must vary different parameters");
  }
  HeatmapGrid grid{x_axis, y_axis, {}, {}, options.method};
  const std::size_t nx = x_axis.values.size();
  grid.cells.resize(nx * y_axis.values.size());
  parallel_for(grid.cells.size(), [&](std::size_t cell) {
    const std::size_t ix = cell % nx;
    const std::size_t iy = cell / nx;
    ScenarioParams p = with_param(base, x_axis.param, x_axis.values[ix]);
    p = with_param(p, y_axis.param, y_axis.values[iy]);
    grid.cells[cell] = compare_designs(p, options).difference;
  });
  grid.boundary = extract_boundary(grid);
  return grid;
}

std::vector<BoundaryPoint> extract_boundary(const HeatmapGrid& grid) {
  std::vector<BoundaryPoint> boundary;
  const auto& xs = grid.x_axis.values;
  const auto& ys = grid.y_axis.values;
  for (std::size_t ix = 0; ix < xs.size(); ++ix) {
    for (std::size_t iy = 0; iy + 1 < ys.size(); ++iy) {
      const auto& lo = grid.at(ix, iy);
      const auto& hi = grid.at(ix, iy + 1);
      if (!lo || !hi) continue;
      if (*lo == 0.0) {
        boundary.push_back({xs[ix], ys[iy]});
        break;
      }
      if ((*lo < 0.0) != (*hi < 0.0)) {
        const double frac = *lo / (*lo - *hi);
        boundary.push_back({xs[ix], ys[iy] + frac * (ys[iy + 1] - ys[iy])});
        break;
      }
    }
  }
  return boundary;
}

void write_csv(std::ostream& out, const HeatmapGrid& grid) {
  out << std::setprecision(12);
  out << to_string(grid.x_axis.param) << ',' << to_string(grid.y_axis.param)
      << ",diff_months,status\n";
  for (std::size_t iy = 0; iy < grid.y_axis.values.size(); ++iy) {
    for (std::size_t ix = 0; ix < grid.x_axis.values.size(); ++ix) {
      out << grid.x_axis.values[ix] << ',' << grid.y_axis.values[iy] << ',';
      if (const auto& cell = grid.at(ix, iy)) {
        out << *cell << ",ok\n";
      } else {
        out << ",incomparable\n";
      }
    }
  }
}

nlohmann::json to_json(const HeatmapGrid& grid) {
  nlohmann::json cells = nlohmann::json::array();
  for (std::size_t iy = 0; iy < grid.y_axis.values.size(); ++iy) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t ix = 0; ix < grid.x_axis.values.size(); ++ix) {
      const auto& cell = grid.at(ix, iy);
      row.push_back(cell ? nlohmann::json(*cell) : nlohmann::json(nullptr));
    }
    cells.push_back(std::move(row));
  }
  nlohmann::json boundary = nlohmann::json::array();
  for (const auto& p : grid.boundary) {
    boundary.push_back({{"x", p.x}, {"y", p.y}});
  }
  return {
      {"x_axis",
       {{"param", to_string(grid.x_axis.param)}, {"values", grid.x_axis.values}}},
      {"y_axis",
       {{"param", to_string(grid.y_axis.param)}, {"values", grid.y_axis.values}}},
      {"method", to_string(grid.method)},
      {"cells", std::move(cells)},
      {"boundary", std::move(boundary)},
  };
}

}  // namespace durasim
