#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "durasim/duration.h"
#include "durasim/heterogeneity.h"

namespace durasim {

// Single-arm trial on a population with a biomarker-positive fraction r1
// (hazard lambda_pos) and a negative fraction 1 - r1 (hazard lambda_neg).
// The all-comers design enrolls everybody uniformly over period_a; the
// enrichment design enrolls the same n positives over period_a / r1.
// No drop-out.
class CompareScenario {
 public:
  CompareScenario(double prevalence_r1, double lambda_pos, double lambda_neg,
                  double period_a, std::int64_t n = 1, std::int64_t d = 1);

  double prevalence() const noexcept { return r1_; }
  double lambda_pos() const noexcept { return lambda_pos_; }
  double lambda_neg() const noexcept { return lambda_neg_; }
  double period() const noexcept { return period_a_; }
  std::int64_t n() const noexcept { return n_; }
  std::int64_t d() const noexcept { return d_; }

 private:
  double r1_;
  double lambda_pos_;
  double lambda_neg_;
  double period_a_;
  std::int64_t n_;
  std::int64_t d_;
};

double cdf_allcomers(const CompareScenario& s, double t);
double cdf_enrichment(const CompareScenario& s, double t);

// cdf_enrichment - cdf_allcomers by the three-branch formula over
// (0, a], (a, a / r1] and (a / r1, inf).
double cdf_difference_piecewise(const CompareScenario& s, double t);

TrialSpec allcomers_trial(const CompareScenario& s);
TrialSpec enrichment_trial(const CompareScenario& s);

struct DurationComparison {
  DurationEstimate allcomers;
  DurationEstimate enrichment;
  // allcomers - enrichment in months; positive means enrichment finishes
  // first. Empty (incomparable) when either duration is unreachable.
  std::optional<double> difference;
};

DurationComparison duration_difference(const TrialSpec& allcomers,
                                       const TrialSpec& enrichment,
                                       const EstimateOptions& options = {});

enum class ScenarioParam { kPrevalence, kHazardRatio, kEnrollRate, kMstPbo };

std::string_view to_string(ScenarioParam param);
ScenarioParam parse_scenario_param(std::string_view name);
ScenarioParams with_param(ScenarioParams base, ScenarioParam param,
                          double value);

// All-comers vs enrichment built from biomarker scenario parameters.
DurationComparison compare_designs(const ScenarioParams& params,
                                   const EstimateOptions& options = {});

struct HeatmapAxis {
  ScenarioParam param;
  std::vector<double> values;
};

struct BoundaryPoint {
  double x;
  double y;
};

struct HeatmapGrid {
  HeatmapAxis x_axis;
  HeatmapAxis y_axis;
  // Row-major: cells[iy * x.size() + ix]; empty optional = incomparable.
  std::vector<std::optional<double>> cells;
  // Per column (fixed x), the first sign change along y located by linear
  // interpolation. Columns without a sign change contribute no point.
  std::vector<BoundaryPoint> boundary;
  DurationMethod method = DurationMethod::kExactMedian;

  const std::optional<double>& at(std::size_t ix, std::size_t iy) const {
    return cells[iy * x_axis.values.size() + ix];
  }
};

HeatmapGrid heatmap(const ScenarioParams& base, const HeatmapAxis& x_axis,
                    const HeatmapAxis& y_axis,
                    const EstimateOptions& options = {});

std::vector<BoundaryPoint> extract_boundary(const HeatmapGrid& grid);

// One row per cell: <x param>,<y param>,diff_months,status with status in
// {ok, incomparable}; incomparable cells leave diff_months empty.
void write_csv(std::ostream& out, const HeatmapGrid& grid);
nlohmann::json to_json(const HeatmapGrid& grid);

}  // namespace durasim
