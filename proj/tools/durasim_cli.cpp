#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unistd.h>
#include <vector>

#include "durasim/design_compare.h"
#include "durasim/duration.h"
#include "durasim/errors.h"
#include "durasim/fitting.h"
#include "durasim/heterogeneity.h"
#include "durasim/patient_csv.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace durasim::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

// Reads typed fields from a JSON object and reports errors by field path.
class Node {
 public:
  Node(const json& value, std::string path) : value_(value), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return value_.contains(key); }

  Node child(const std::string& key) const {
    if (!has(key)) fail(key, "is required");
    return Node(value_.at(key), path_ + "." + key);
  }

  std::vector<Node> items() const {
    if (!value_.is_array()) fail("", "must be an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < value_.size(); ++i) {
      out.emplace_back(value_[i], path_ + "[" + std::to_string(i) + "]");
    }
    return out;
  }

  double number() const {
    if (!value_.is_number()) fail("", "must be a number");
    return value_.get<double>();
  }

  std::int64_t integer() const {
    if (!value_.is_number_integer()) fail("", "must be an integer");
    return value_.get<std::int64_t>();
  }

  std::string text() const {
    if (!value_.is_string()) fail("", "must be a string");
    return value_.get<std::string>();
  }

  double number(const std::string& key) const { return child(key).number(); }
  std::int64_t integer(const std::string& key) const { return child(key).integer(); }

  std::optional<double> maybe_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!value_.is_object()) fail("", "must be an object");
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& item : value_.items()) {
      if (!keys.contains(item.key())) fail(item.key(), "is not a recognized field");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(path_ + (key.empty() ? "" : "." + key) + ": " + what);
  }

  // Runs `build`, prefixing any validation error with this node's path.
  template <typename F>
  auto guarded(F&& build) const {
    try {
      return build();
    } catch (const ConfigError& e) {
      if (std::string_view(e.what()).starts_with("config")) throw;
      throw ConfigError(path_ + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(path_ + ": " + e.what());
    }
  }

 private:
  const json& value_;
  std::string path_;
};

struct Overrides {
  std::optional<std::string> method;
  std::optional<std::int64_t> reps;
  std::optional<std::uint64_t> seed;
  std::optional<double> level;
};

struct Config {
  json root = json::object();
  std::string source = "config";
  Node node() const { return Node(root, source); }
};

constexpr std::initializer_list<const char*> kConfigFields = {
    "n",      "d",           "enroll_rate", "period_a",  "enrollment_beta",
    "arms",   "mst_pbo",     "treatment_hr", "biomarker", "method",
    "reps",   "seed",        "level",       "heatmap",   "reassess"};

Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  Config config;
  try {
    config.root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  config.source = "config";
  config.node().expect_object(kConfigFields);
  return config;
}

EstimateOptions estimate_options(const Node& cfg, const Overrides& flags) {
  EstimateOptions options;
  if (cfg.has("method")) {
    options.method = cfg.child("method").guarded(
        [&] { return parse_method(cfg.child("method").text()); });
  }
  if (cfg.has("reps")) options.reps = cfg.integer("reps");
  if (cfg.has("seed")) {
    const auto seed = cfg.integer("seed");
    if (seed < 0) cfg.fail("seed", "must be nonnegative");
    options.seed = static_cast<std::uint64_t>(seed);
  }
  if (cfg.has("level")) options.level = cfg.number("level");
  if (flags.method) {
    try {
      options.method = parse_method(*flags.method);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("--method: ") + e.what());
    }
  }
  if (flags.reps) options.reps = *flags.reps;
  if (flags.seed) options.seed = *flags.seed;
  if (flags.level) options.level = *flags.level;
  if (!(options.level > 0.0 && options.level < 1.0)) {
    throw ConfigError("level: must lie in (0, 1), got " + std::to_string(options.level));
  }
  if (options.method == DurationMethod::kMonteCarlo && options.reps < 100) {
    throw ConfigError("reps: Monte Carlo needs at least 100 replicates, got " +
                      std::to_string(options.reps));
  }
  return options;
}

std::int64_t sample_size(const Node& cfg) {
  const auto n = cfg.integer("n");
  if (n < 1) cfg.fail("n", "must be at least 1");
  return n;
}

std::int64_t event_target(const Node& cfg, std::int64_t n) {
  const auto d = cfg.integer("d");
  if (d < 1 || d > n) {
    cfg.fail("d", "must satisfy 1 <= d <= n (n = " + std::to_string(n) +
                      "), got " + std::to_string(d));
  }
  return d;
}

// Enrollment period from exactly one of enroll_rate / period_a.
double enrollment_period(const Node& cfg, std::int64_t n) {
  const bool rate = cfg.has("enroll_rate");
  const bool period = cfg.has("period_a");
  if (rate == period) cfg.fail("", "exactly one of enroll_rate / period_a is required");
  if (rate) {
    const double r = cfg.number("enroll_rate");
    if (!(r > 0.0 && std::isfinite(r))) cfg.fail("enroll_rate", "must be positive");
    return static_cast<double>(n) / r;
  }
  const double a = cfg.number("period_a");
  if (!(a > 0.0 && std::isfinite(a))) cfg.fail("period_a", "must be positive");
  return a;
}

double enrollment_shape(const Node& cfg) {
  return cfg.has("enrollment_beta") ? cfg.number("enrollment_beta") : 1.0;
}

// One of median / hazard / weibull{shape, scale}.
SurvivalModel read_event_model(const Node& arm) {
  const int given = arm.has("median") + arm.has("hazard") + arm.has("weibull");
  if (given != 1) arm.fail("", "exactly one of median / hazard / weibull is required");
  if (arm.has("median")) {
    const auto node = arm.child("median");
    return node.guarded([&] { return SurvivalModel(ExponentialModel::from_median(node.number())); });
  }
  if (arm.has("hazard")) {
    const auto node = arm.child("hazard");
    return node.guarded([&] { return SurvivalModel(ExponentialModel(node.number())); });
  }
  const auto node = arm.child("weibull");
  node.expect_object({"shape", "scale"});
  return node.guarded([&] {
    return SurvivalModel(WeibullModel(node.number("shape"), node.number("scale")));
  });
}

std::optional<SurvivalModel> read_dropout(const Node& arm) {
  if (arm.has("dropout_rate") && arm.has("dropout_median")) {
    arm.fail("", "give at most one of dropout_rate / dropout_median");
  }
  if (arm.has("dropout_rate")) {
    const auto node = arm.child("dropout_rate");
    const double rate = node.number();
    if (rate == 0.0) return std::nullopt;
    return node.guarded([&] { return SurvivalModel(ExponentialModel(rate)); });
  }
  if (arm.has("dropout_median")) {
    const auto node = arm.child("dropout_median");
    return node.guarded(
        [&] { return SurvivalModel(ExponentialModel::from_median(node.number())); });
  }
  return std::nullopt;
}

bool is_scenario_form(const Node& cfg) { return cfg.has("mst_pbo"); }

ScenarioParams read_scenario(const Node& cfg) {
  if (cfg.has("arms")) cfg.fail("arms", "cannot be combined with mst_pbo");
  ScenarioParams p;
  p.n = sample_size(cfg);
  p.d = event_target(cfg, p.n);
  p.enroll_rate = static_cast<double>(p.n) / enrollment_period(cfg, p.n);
  p.mst_pbo = cfg.number("mst_pbo");
  if (!(p.mst_pbo > 0.0 && std::isfinite(p.mst_pbo))) cfg.fail("mst_pbo", "must be positive");
  if (cfg.has("treatment_hr")) {
    p.treatment_hr = cfg.number("treatment_hr");
    if (!(p.treatment_hr > 0.0 && std::isfinite(p.treatment_hr))) {
      cfg.fail("treatment_hr", "must be positive");
    }
  }
  p.prevalence = 1.0;
  p.biomarker_hr = 1.0;
  if (cfg.has("biomarker")) {
    const auto bio = cfg.child("biomarker");
    bio.expect_object({"prevalence", "hazard_ratio"});
    p.prevalence = bio.number("prevalence");
    p.biomarker_hr = bio.number("hazard_ratio");
    bio.guarded([&] { return BiomarkerSpec(p.prevalence, p.biomarker_hr); });
  }
  return p;
}

std::vector<SubgroupArm> with_enrollment(const std::vector<SubgroupArm>& arms,
                                         const EnrollmentBeta& enrollment) {
  std::vector<SubgroupArm> out;
  for (const auto& arm : arms) {
    out.emplace_back(arm.weight(), enrollment, arm.event(), arm.dropout(), arm.label());
  }
  return out;
}

TrialSpec read_trial(const Node& cfg) {
  const auto n = sample_size(cfg);
  const auto d = event_target(cfg, n);
  const double a = enrollment_period(cfg, n);
  const double beta = enrollment_shape(cfg);
  const auto enrollment = cfg.guarded([&] { return EnrollmentBeta(a, beta); });
  if (is_scenario_form(cfg)) {
    const auto params = read_scenario(cfg);
    const auto base = cfg.guarded([&] { return build_allcomers_spec(params); });
    return TrialSpec(n, d, with_enrollment(base.arms(), enrollment));
  }
  std::vector<SubgroupArm> arms;
  for (const auto& arm : cfg.child("arms").items()) {
    arm.expect_object({"label", "weight", "median", "hazard", "weibull",
                       "dropout_rate", "dropout_median"});
    const double weight = arm.number("weight");
    const std::string label =
        arm.has("label") ? arm.child("label").text() : "arm" + std::to_string(arms.size());
    auto event = read_event_model(arm);
    auto dropout = read_dropout(arm);
    arms.push_back(arm.guarded(
        [&] { return SubgroupArm(weight, enrollment, event, dropout, label); }));
  }
  if (arms.empty()) cfg.fail("arms", "must not be empty");
  return cfg.child("arms").guarded([&] { return TrialSpec(n, d, arms); });
}

ScenarioParams read_compare_scenario(const Node& cfg) {
  if (!is_scenario_form(cfg)) {
    cfg.fail("mst_pbo", "is required (design comparison builds its arms from "
                        "mst_pbo, treatment_hr and biomarker)");
  }
  if (enrollment_shape(cfg) != 1.0) {
    cfg.fail("enrollment_beta", "design comparison supports uniform enrollment only");
  }
  return read_scenario(cfg);
}

json finite_or_null(double value) {
  return std::isfinite(value) ? json(value) : json(nullptr);
}

json estimate_json(const DurationEstimate& e) {
  return {{"method", std::string(to_string(e.method))},
          {"reachable", e.reachable()},
          {"median_months", finite_or_null(e.point)},
          {"interval_low", finite_or_null(e.interval_low)},
          {"interval_high", finite_or_null(e.interval_high)},
          {"confidence", e.confidence},
          {"replicates", e.diagnostics.replicates},
          {"bisection_iterations", e.diagnostics.bisection_iterations},
          {"unreachable_probability", e.diagnostics.unreachable_probability}};
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      throw IoError("failed writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    throw IoError("cannot move output into '" + path + "': " + ec.message());
  }
}

void emit(const std::optional<std::string>& out, const std::string& content) {
  if (out) {
    write_atomic(*out, content);
  } else {
    std::cout << content << std::flush;
  }
}

std::string curve_csv(const TrialSpec& spec, const DurationEstimate& estimate) {
  const auto mixture = spec.mixture();
  double t_max = 2.0 * mixture.enrollment_end();
  if (std::isfinite(estimate.interval_high)) {
    t_max = std::max(t_max, 1.25 * estimate.interval_high);
  }
  constexpr int kPoints = 401;
  std::ostringstream out;
  out << std::setprecision(12) << "t,cdf_event,cdf_order_statistic\n";
  for (int i = 0; i < kPoints; ++i) {
    const double t = t_max * i / (kPoints - 1);
    out << t << ',' << mixture(t) << ','
        << order_statistic_cdf(mixture, spec.n(), spec.d(), t) << '\n';
  }
  return out.str();
}

int cmd_predict(const Config& config, const Overrides& flags,
                const std::optional<std::string>& curve,
                const std::optional<std::string>& out) {
  const auto cfg = config.node();
  const auto spec = read_trial(cfg);
  const auto options = estimate_options(cfg, flags);
  const auto estimate = estimate_duration(spec, options);
  json report = {{"n", spec.n()},
                 {"d", spec.d()},
                 {"event_mass", spec.mixture().total_mass()},
                 {"estimate", estimate_json(estimate)}};
  if (options.method == DurationMethod::kMonteCarlo) report["seed"] = options.seed;
  if (curve) write_atomic(*curve, curve_csv(spec, estimate));
  emit(out, dump(report));
  return kExitOk;
}

int cmd_compare(const Config& config, const Overrides& flags,
                const std::optional<std::string>& out) {
  const auto cfg = config.node();
  const auto params = read_compare_scenario(cfg);
  const auto options = estimate_options(cfg, flags);
  const auto result = compare_designs(params, options);
  json report = {{"n", params.n},
                 {"d", params.d},
                 {"prevalence", params.prevalence},
                 {"biomarker_hr", params.biomarker_hr},
                 {"allcomers", estimate_json(result.allcomers)},
                 {"enrichment", estimate_json(result.enrichment)},
                 {"comparable", result.difference.has_value()},
                 {"difference_months",
                  result.difference ? json(*result.difference) : json(nullptr)}};
  emit(out, dump(report));
  return kExitOk;
}

HeatmapAxis read_axis(const Node& axis) {
  axis.expect_object({"param", "values", "from", "to", "steps"});
  HeatmapAxis out{axis.child("param").guarded(
                      [&] { return parse_scenario_param(axis.child("param").text()); }),
                  {}};
  if (axis.has("values")) {
    if (axis.has("from") || axis.has("to") || axis.has("steps")) {
      axis.fail("", "give either values or from/to/steps");
    }
    for (const auto& v : axis.child("values").items()) out.values.push_back(v.number());
  } else {
    const double from = axis.number("from");
    const double to = axis.number("to");
    const auto steps = axis.integer("steps");
    if (steps < 1) axis.fail("steps", "must be at least 1");
    for (std::int64_t i = 0; i < steps; ++i) {
      out.values.push_back(steps == 1 ? from : from + (to - from) * i / (steps - 1));
    }
  }
  if (out.values.empty()) axis.fail("values", "must not be empty");
  return out;
}

std::string json_sibling(const std::string& path) {
  fs::path p(path);
  if (p.extension() == ".json") p.replace_extension(".csv");
  else p.replace_extension(".json");
  return p.string();
}

int cmd_heatmap(const Config& config, const Overrides& flags,
                const std::optional<std::string>& out) {
  const auto cfg = config.node();
  const auto params = read_compare_scenario(cfg);
  const auto options = estimate_options(cfg, flags);
  const auto spec = cfg.child("heatmap");
  spec.expect_object({"x", "y"});
  const auto x = read_axis(spec.child("x"));
  const auto y = read_axis(spec.child("y"));
  if (x.param == y.param) spec.fail("y.param", "must differ from x.param");
  // Validate every grid point before starting the computation.
  for (double xv : x.values) {
    for (double yv : y.values) {
      const auto p = with_param(with_param(params, x.param, xv), y.param, yv);
      spec.guarded([&] { return BiomarkerSpec(p.prevalence, p.biomarker_hr); });
      if (!(p.enroll_rate > 0.0 && p.mst_pbo > 0.0)) {
        spec.fail("", "enroll_rate and mst_pbo must stay positive on the grid");
      }
    }
  }
  const auto grid = heatmap(params, x, y, options);
  std::ostringstream csv;
  csv << std::setprecision(12);
  write_csv(csv, grid);
  if (out) {
    const bool json_out = fs::path(*out).extension() == ".json";
    write_atomic(json_out ? json_sibling(*out) : *out, csv.str());
    write_atomic(json_out ? *out : json_sibling(*out), dump(to_json(grid)));
  } else {
    std::cout << csv.str() << std::flush;
  }
  return kExitOk;
}

struct DataOptions {
  std::string csv;
  std::optional<std::string> subgroup;
  std::optional<std::int64_t> n;
  std::optional<double> period_a;
  std::optional<std::int64_t> d_from;
  std::optional<std::int64_t> d_to;
};

std::vector<PatientRecord> load_records(const DataOptions& data) {
  auto records = read_patient_csv(data.csv);
  if (records.empty()) throw InsufficientDataError(data.csv + ": no patient rows");
  return records;
}

// The first n patients (all of the subgroup when n is not given).
std::vector<PatientRecord> selected(const std::vector<PatientRecord>& records,
                                    const DataOptions& data) {
  std::int64_t available = 0;
  for (const auto& r : records) {
    if (!data.subgroup || r.subgroup == *data.subgroup) ++available;
  }
  return select_first_n(records, data.subgroup, data.n.value_or(available));
}

int cmd_fit(const DataOptions& data, const std::optional<std::string>& out) {
  const auto records = load_records(data);
  const auto first = selected(records, data);
  emit(out, dump(to_json(fit_design(first, data.period_a))));
  return kExitOk;
}

int cmd_reassess(const DataOptions& data, const std::optional<std::string>& out) {
  const auto records = load_records(data);
  std::int64_t available = 0;
  for (const auto& r : records) {
    if (!data.subgroup || r.subgroup == *data.subgroup) ++available;
  }
  const std::int64_t n = data.n.value_or(available);
  const std::int64_t from = data.d_from.value_or(1);
  const std::int64_t to = data.d_to.value_or(n);
  if (from < 1 || to > n || from > to) {
    throw ConfigError("--d-from/--d-to: need 1 <= d-from <= d-to <= n (n = " +
                      std::to_string(n) + ")");
  }
  std::vector<std::int64_t> ds;
  for (std::int64_t d = from; d <= to; ++d) ds.push_back(d);
  const auto result = reassess(records, data.subgroup, n, ds);
  std::ostringstream csv;
  write_reassess_csv(csv, result.rows);
  emit(out, csv.str());
  return kExitOk;
}

// Fills unset data options from the config's "reassess" object.
void merge_data_config(const Config& config, DataOptions& data) {
  const auto cfg = config.node();
  if (!cfg.has("reassess")) return;
  const auto node = cfg.child("reassess");
  node.expect_object({"csv", "subgroup", "n", "period_a", "d_from", "d_to"});
  if (data.csv.empty() && node.has("csv")) data.csv = node.child("csv").text();
  if (!data.subgroup && node.has("subgroup")) data.subgroup = node.child("subgroup").text();
  if (!data.n && node.has("n")) data.n = node.integer("n");
  if (!data.period_a && node.has("period_a")) data.period_a = node.number("period_a");
  if (!data.d_from && node.has("d_from")) data.d_from = node.integer("d_from");
  if (!data.d_to && node.has("d_to")) data.d_to = node.integer("d_to");
}

int run(int argc, char** argv) {
  CLI::App app{"Event-driven trial duration prediction"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides flags;
  std::optional<std::string> out;
  std::optional<std::string> curve;
  DataOptions data;

  auto add_estimate_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON configuration file")->required();
    cmd->add_option("--method", flags.method, "percentile | exact | mc")
        ->check(CLI::IsMember({"percentile", "exact", "exact-median", "mc", "monte-carlo"}));
    cmd->add_option("--reps", flags.reps, "Monte Carlo replicates");
    cmd->add_option("--seed", flags.seed, "Monte Carlo seed");
    cmd->add_option("--level", flags.level, "1 - interval coverage");
    cmd->add_option("--out", out, "output path (default: stdout)");
  };
  auto add_data_flags = [&](CLI::App* cmd) {
    cmd->add_option("csv", data.csv, "patient CSV");
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--subgroup", data.subgroup, "restrict to one subgroup");
    cmd->add_option("--n", data.n, "use the first n patients");
    cmd->add_option("--period", data.period_a, "enrollment period in months");
    cmd->add_option("--out", out, "output path (default: stdout)");
  };

  auto* predict = app.add_subcommand("predict", "Predict the trial duration");
  add_estimate_flags(predict);
  predict->add_option("--curve", curve, "write the CDF curves as CSV");
  auto* compare = app.add_subcommand("compare", "All-comers vs enrichment duration");
  add_estimate_flags(compare);
  auto* heat = app.add_subcommand("heatmap", "Duration difference over a grid");
  add_estimate_flags(heat);
  auto* fit = app.add_subcommand("fit", "Fit model components from patient data");
  add_data_flags(fit);
  auto* reassess_cmd = app.add_subcommand("reassess", "Actual vs calculated durations");
  add_data_flags(reassess_cmd);
  reassess_cmd->add_option("--d-from", data.d_from, "smallest d");
  reassess_cmd->add_option("--d-to", data.d_to, "largest d");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  Config config;
  if (!config_path.empty()) config = load_config(config_path);
  if (predict->parsed()) return cmd_predict(config, flags, curve, out);
  if (compare->parsed()) return cmd_compare(config, flags, out);
  if (heat->parsed()) return cmd_heatmap(config, flags, out);
  merge_data_config(config, data);
  if (data.csv.empty()) throw ConfigError("patient CSV path is required");
  if (fit->parsed()) return cmd_fit(data, out);
  return cmd_reassess(data, out);
}

}  // namespace
}  // namespace durasim::cli

int main(int argc, char** argv) {
  using namespace durasim;
  try {
    return cli::run(argc, argv);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitIo;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return cli::kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return cli::kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return cli::kExitNumeric;
  }
}
