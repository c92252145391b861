#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <varinf/geometry.hpp>
#include <varinf/metrics.hpp>

namespace varinf {

struct ExperimentConfig {
  std::string shape = "circle";
  std::string density = "uniform";
  /// "split" (V-hat from four independent parts), or "V" / "W" (non-split,
  /// all 4N points pooled).
  std::string variant = "split";
  std::vector<std::size_t> n_grid = {250, 500, 1000, 2000, 4000, 8000, 16000};
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  std::optional<double> tau;           // default: derived from the shape's Ahlfors constant
  std::optional<double> delta;         // default: delta_N rule
  std::optional<double> quadrature_h;  // default: min delta_N / 10
  std::optional<Ball> ball;
  std::string eta = "triangular";
  std::string phi = "triangular";
  std::size_t max_support = 12000;
  std::string out_dir;

  // tangent experiment
  bool exclude_singular = false;
  double exclusion_c = 1.0;
  std::string tangent_matrix = "sigma";  // or "projector"

  // fluctuation experiment
  std::optional<Point> query;      // default: the shape's anchor
  std::vector<double> delta_grid;  // when set, N = n_grid[0] is fixed and delta varies

  /// Throws ArgumentError on an invalid combination of settings.
  void validate() const;
};

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg);
/// Accepts a config object, or a summary document carrying one under "config".
ExperimentConfig config_from_json(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

struct TrialRecord {
  std::size_t n = 0;
  std::size_t trial = 0;
  double delta = 0.0;
  double value = 0.0;
  double extra = 0.0;
};

struct RatePoint {
  std::size_t n = 0;
  double delta = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double sd = 0.0;
  double median = 0.0;
  double extra_mean = 0.0;
  double extra_median = 0.0;
};

struct RateResult {
  std::string experiment;
  std::string value_name;
  std::string extra_name;
  /// Which per-point statistic the slope is fitted on ("mean" or "sd") and against what ("N" or "delta").
  std::string fitted_statistic = "mean";
  std::string slope_axis = "N";
  ExperimentConfig config;
  double tau = 0.0;
  double quadrature_h = 0.0;
  std::vector<RatePoint> points;
  std::vector<TrialRecord> trials;
  std::optional<double> slope;
  std::optional<double> slope_half_width;  // half-width of the 95% bootstrap interval
  std::optional<double> extra_slope;
};

/// beta(V-hat, W_S) per N; extra = coarsening bound.
RateResult run_rate_experiment(const ExperimentConfig& cfg);
/// beta(nu-hat, H^d|_S) per N; extra = total mass of nu-hat.
RateResult run_measure_experiment(const ExperimentConfig& cfg);
/// theta_{delta,N}(x) per trial; the slope is fitted on the standard deviation.
RateResult run_fluctuation_experiment(const ExperimentConfig& cfg);
/// Empirical L1 tangent error per N. value = integral over S minus the C delta_N
/// offset of the singular set when exclusion is on (else over all of S); extra = over all of S.
RateResult run_tangent_experiment(const ExperimentConfig& cfg);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Writes <dir>/<experiment>_trials.csv and <dir>/<experiment>_summary.json.
void emit_results(const RateResult& result, const std::string& dir);

/// Number of worker threads: VARINF_THREADS if set, else 1.
std::size_t worker_threads();

}  // namespace varinf
