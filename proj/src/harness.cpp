#include <varinf/harness.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <varinf/errors.hpp>
#include <varinf/estimators.hpp>
#include <varinf/io.hpp>
#include <varinf/sampling.hpp>

namespace varinf {

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr std::uint64_t kTrialTag = 0x7472696173ULL;
constexpr std::uint64_t kBootstrapStream = 0xB0075742A9ULL;
constexpr std::size_t kBootstrapResamples = 1000;

std::uint64_t trial_stream(std::size_t grid_index, std::size_t trial) {
  return Philox::child_stream(Philox::child_stream(kTrialTag, grid_index), trial);
}

ShapeModel make_shape(const ExperimentConfig& cfg) {
  return ShapeModel(geometry_by_name(cfg.shape), density_by_name(cfg.density));
}

EstimatorConfig estimator_config(const ExperimentConfig& cfg, int d, double delta, double tau) {
  EstimatorConfig ec(d, delta, delta, tau);
  ec.eta = NormalizedKernel(profile_by_name(cfg.eta, KernelKind::density), d);
  ec.phi = NormalizedKernel(profile_by_name(cfg.phi, KernelKind::covariance), d);
  ec.splitting = cfg.variant == "split";
  return ec;
}

double resolve_tau(const ExperimentConfig& cfg, const ShapeModel& shape) {
  if (cfg.tau) return *cfg.tau;
  const NormalizedKernel eta(profile_by_name(cfg.eta, KernelKind::density), shape.intrinsic_dim());
  return default_tau(eta, shape.regularity().ahlfors_c0);
}

double grid_delta(const ExperimentConfig& cfg, const ShapeModel& shape, std::size_t n) {
  if (cfg.delta) return *cfg.delta;
  const auto& reg = shape.regularity();
  return bandwidth_rule(n, shape.intrinsic_dim(), reg.a, reg.b);
}

double resolve_h(const ExperimentConfig& cfg, const ShapeModel& shape) {
  if (cfg.quadrature_h) return *cfg.quadrature_h;
  double smallest = INFINITY;
  for (std::size_t n : cfg.n_grid) smallest = std::min(smallest, grid_delta(cfg, shape, n));
  return smallest / 10.0;
}

VarifoldVariant matrix_variant(const ExperimentConfig& cfg) {
  return cfg.variant == "split" ? VarifoldVariant::V : variant_by_name(cfg.variant);
}

Matrix pooled_points(const SplitSample& s) {
  const auto part = s.parts[0].points.cols();
  Matrix out(s.parts[0].points.rows(), 4 * part);
  for (Eigen::Index k = 0; k < 4; ++k) out.middleCols(k * part, part) = s.parts[static_cast<std::size_t>(k)].points;
  return out;
}

// Runs job(grid_index, trial) for every cell of the grid x trials table, in parallel.
std::vector<TrialRecord> run_trials(std::size_t grid, std::size_t trials,
                                    const std::function<TrialRecord(std::size_t, std::size_t)>& job) {
  const std::size_t total = grid * trials;
  std::vector<TrialRecord> out(total);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= total) return;
      {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (failure) return;
      }
      const std::size_t g = k / trials, t = k % trials;
      try {
        out[k] = job(g, t);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure)
          failure = std::make_exception_ptr(
              std::runtime_error("grid point " + std::to_string(g) + ", trial " + std::to_string(t) + ": " + e.what()));
      }
    }
  };
  const std::size_t threads = std::min(worker_threads(), std::max<std::size_t>(total, 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

double statistic(const std::vector<double>& v, const std::string& which) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (which == "mean") return mean;
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

std::optional<double> fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() < 2) return std::nullopt;
  for (double v : y)
    if (!(v > 0.0) || !std::isfinite(v)) return std::nullopt;
  return loglog_slope(x, y);
}

void aggregate(RateResult& result, std::size_t grid, std::size_t trials) {
  std::vector<std::vector<double>> values(grid), extras(grid);
  for (const auto& rec : result.trials) {
    const std::size_t g = &rec - result.trials.data();
    values[g / trials].push_back(rec.value);
    extras[g / trials].push_back(rec.extra);
  }
  std::vector<double> axis, stat, extra_stat;
  for (std::size_t g = 0; g < grid; ++g) {
    RatePoint p;
    p.n = result.trials[g * trials].n;
    p.delta = result.trials[g * trials].delta;
    p.mean = statistic(values[g], "mean");
    p.sd = statistic(values[g], "sd");
    p.std_error = p.sd / std::sqrt(static_cast<double>(trials));
    p.median = median_of(values[g]);
    p.extra_mean = statistic(extras[g], "mean");
    p.extra_median = median_of(extras[g]);
    result.points.push_back(p);
    axis.push_back(result.slope_axis == "N" ? static_cast<double>(p.n) : p.delta);
    stat.push_back(result.fitted_statistic == "mean" ? p.mean : p.sd);
    extra_stat.push_back(p.extra_mean);
  }
  result.slope = fit(axis, stat);
  result.extra_slope = fit(axis, extra_stat);
  if (!result.slope || trials < 2) return;

  Philox rng(result.config.seed, kBootstrapStream);
  std::vector<double> slopes;
  slopes.reserve(kBootstrapResamples);
  std::vector<double> resampled(trials);
  for (std::size_t b = 0; b < kBootstrapResamples; ++b) {
    std::vector<double> y(grid);
    for (std::size_t g = 0; g < grid; ++g) {
      for (std::size_t t = 0; t < trials; ++t)
        resampled[t] = values[g][std::min(trials - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(trials)))];
      y[g] = statistic(resampled, result.fitted_statistic);
    }
    if (auto s = fit(axis, y)) slopes.push_back(*s);
  }
  if (slopes.size() < 2) return;
  std::sort(slopes.begin(), slopes.end());
  const auto at = [&](double q) { return slopes[static_cast<std::size_t>(q * static_cast<double>(slopes.size() - 1))]; };
  result.slope_half_width = 0.5 * (at(0.975) - at(0.025));
}

RateResult start_result(const ExperimentConfig& cfg, const std::string& experiment, const std::string& value_name,
                        const std::string& extra_name) {
  cfg.validate();
  RateResult r;
  r.experiment = experiment;
  r.value_name = value_name;
  r.extra_name = extra_name;
  r.config = cfg;
  return r;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (n_grid.empty()) throw ArgumentError("N-grid must not be empty");
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    if (n_grid[k] == 0) throw ArgumentError("N-grid entries must be positive");
    if (k > 0 && n_grid[k] <= n_grid[k - 1]) throw ArgumentError("N-grid must be strictly increasing");
  }
  if (trials < 1) throw ArgumentError("trials must be at least 1");
  if (variant != "split" && variant != "V" && variant != "W" && variant != "V_tilde" && variant != "W_tilde")
    throw ArgumentError("variant must be split, V, W, V_tilde or W_tilde");
  if (tau && !(*tau > 0.0 && *tau <= 1.0)) throw ArgumentError("tau must lie in (0, 1]");
  if (delta && !(*delta > 0.0)) throw ArgumentError("delta must be positive");
  if (quadrature_h && !(*quadrature_h > 0.0)) throw ArgumentError("quadrature h must be positive");
  if (tangent_matrix != "sigma" && tangent_matrix != "projector")
    throw ArgumentError("tangent_matrix must be sigma or projector");
  if (!(exclusion_c >= 0.0)) throw ArgumentError("exclusion constant must be nonnegative");
  for (std::size_t k = 0; k < delta_grid.size(); ++k)
    if (!(delta_grid[k] > 0.0) || (k > 0 && delta_grid[k] <= delta_grid[k - 1]))
      throw ArgumentError("delta grid must be positive and strictly increasing");
}

RateResult run_rate_experiment(const ExperimentConfig& cfg) {
  RateResult result = start_result(cfg, "rate", "beta", "coarsening_bound");
  const ShapeModel shape = make_shape(cfg);
  const int d = shape.intrinsic_dim();
  result.tau = resolve_tau(cfg, shape);
  result.quadrature_h = resolve_h(cfg, shape);
  const DiscreteVarifold truth = shape.quadrature_varifold(result.quadrature_h).varifold;

  result.trials = run_trials(cfg.n_grid.size(), cfg.trials, [&](std::size_t g, std::size_t t) {
    const std::size_t n = cfg.n_grid[g];
    const double delta = grid_delta(cfg, shape, n);
    const SplitSample s = sample_split(shape, n, cfg.seed, trial_stream(g, t));
    const DiscreteVarifold estimate = varifold_estimate(s, estimator_config(cfg, d, delta, result.tau), matrix_variant(cfg));
    FlatMetricProblem problem = FlatMetricProblem::varifolds(estimate, truth, cfg.ball);
    problem.options.coarsen_grid = result.quadrature_h;
    problem.options.max_support = cfg.max_support;
    const FlatMetricResult solved = solve_flat_metric(problem);
    return TrialRecord{n, t, delta, solved.value, solved.coarsening_bound};
  });
  aggregate(result, cfg.n_grid.size(), cfg.trials);
  return result;
}

RateResult run_measure_experiment(const ExperimentConfig& cfg) {
  RateResult result = start_result(cfg, "measure", "beta", "total_mass");
  const ShapeModel shape = make_shape(cfg);
  const int d = shape.intrinsic_dim();
  result.tau = resolve_tau(cfg, shape);
  result.quadrature_h = resolve_h(cfg, shape);
  const DiscreteMeasure truth = shape.quadrature_varifold(result.quadrature_h).varifold.mass();

  result.trials = run_trials(cfg.n_grid.size(), cfg.trials, [&](std::size_t g, std::size_t t) {
    const std::size_t n = cfg.n_grid[g];
    const double delta = grid_delta(cfg, shape, n);
    const SplitSample s = sample_split(shape, n, cfg.seed, trial_stream(g, t));
    const EstimatorConfig ec = estimator_config(cfg, d, delta, result.tau);
    DiscreteMeasure estimate;
    if (ec.splitting) {
      estimate = measure_estimate(SpatialIndex(s.x().points), SpatialIndex(s.y().points), ec);
    } else {
      estimate = measure_estimate(SpatialIndex(pooled_points(s)), ec);
    }
    FlatMetricProblem problem = FlatMetricProblem::measures(estimate, truth, cfg.ball);
    problem.options.coarsen_grid = result.quadrature_h;
    problem.options.max_support = cfg.max_support;
    return TrialRecord{n, t, delta, solve_flat_metric(problem).value, estimate.total_mass()};
  });
  aggregate(result, cfg.n_grid.size(), cfg.trials);
  return result;
}

RateResult run_fluctuation_experiment(const ExperimentConfig& cfg) {
  RateResult result = start_result(cfg, "fluct", "theta", "abs_error");
  result.fitted_statistic = "sd";
  const ShapeModel shape = make_shape(cfg);
  const int d = shape.intrinsic_dim();
  result.tau = resolve_tau(cfg, shape);
  const Point x = cfg.query ? *cfg.query : shape.geometry().anchor();
  if (x.size() != shape.ambient_dim()) throw ArgumentError("query point has the wrong dimension");
  const double truth = shape.density_at(x);

  const bool over_delta = !cfg.delta_grid.empty();
  result.slope_axis = over_delta ? "delta" : "N";
  const std::size_t grid = over_delta ? cfg.delta_grid.size() : cfg.n_grid.size();
  result.trials = run_trials(grid, cfg.trials, [&](std::size_t g, std::size_t t) {
    const std::size_t n = over_delta ? cfg.n_grid.front() : cfg.n_grid[g];
    const double delta = over_delta ? cfg.delta_grid[g] : grid_delta(cfg, shape, n);
    const SampleBatch batch = sample(shape, n, cfg.seed, trial_stream(g, t));
    const double theta = density_estimate(SpatialIndex(batch.points), x, estimator_config(cfg, d, delta, result.tau));
    return TrialRecord{n, t, delta, theta, std::abs(theta - truth)};
  });
  aggregate(result, grid, cfg.trials);
  return result;
}

RateResult run_tangent_experiment(const ExperimentConfig& cfg) {
  RateResult result = start_result(cfg, "tangent", cfg.exclude_singular ? "error_restricted" : "error", "error_full");
  const ShapeModel shape = make_shape(cfg);
  const int d = shape.intrinsic_dim();
  result.tau = resolve_tau(cfg, shape);
  const bool truncate = cfg.tangent_matrix == "projector";

  result.trials = run_trials(cfg.n_grid.size(), cfg.trials, [&](std::size_t g, std::size_t t) {
    const std::size_t n = cfg.n_grid[g];
    const double delta = grid_delta(cfg, shape, n);
    const SplitSample s = sample_split(shape, n, cfg.seed, trial_stream(g, t));
    const EstimatorConfig ec = estimator_config(cfg, d, delta, result.tau);

    Matrix points;
    std::unique_ptr<SpatialIndex> density_part, covariance_part;
    if (ec.splitting) {
      points = s.x().points;
      density_part = std::make_unique<SpatialIndex>(s.y_tilde().points);
      covariance_part = std::make_unique<SpatialIndex>(s.z().points);
    } else {
      points = pooled_points(s);
      density_part = std::make_unique<SpatialIndex>(points);
    }
    const SpatialIndex& cov = covariance_part ? *covariance_part : *density_part;

    double full = 0.0, restricted = 0.0;
    for (Eigen::Index i = 0; i < points.cols(); ++i) {
      const Point x = points.col(i);
      Matrix truth;
      try {
        truth = shape.tangent_at(x);
      } catch (const SingularPointError&) {
        continue;
      }
      Matrix m = tangent_sigma(*density_part, cov, x, ec);
      if (truncate) m = projector_truncate(m, d);
      const double err = symmetric_operator_norm(m - truth);
      full += err;
      if (!cfg.exclude_singular || shape.singular_distance(x) >= cfg.exclusion_c * delta) restricted += err;
    }
    const double count = static_cast<double>(points.cols());
    return TrialRecord{n, t, delta, (cfg.exclude_singular ? restricted : full) / count, full / count};
  });
  aggregate(result, cfg.n_grid.size(), cfg.trials);
  return result;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ArgumentError("loglog_slope: need two or more matching points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += std::log(x[k]) / n;
    my += std::log(y[k]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = std::log(x[k]) - mx;
    sxy += dx * (std::log(y[k]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

std::size_t worker_threads() {
  if (const char* env = std::getenv("VARINF_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

// ---------------------------------------------------------------------------
// configuration and result files

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["shape"] = cfg.shape;
  j["density"] = cfg.density;
  j["variant"] = cfg.variant;
  j["n_grid"] = cfg.n_grid;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["tau"] = cfg.tau ? nlohmann::ordered_json(*cfg.tau) : nlohmann::ordered_json();
  j["delta"] = cfg.delta ? nlohmann::ordered_json(*cfg.delta) : nlohmann::ordered_json();
  j["h"] = cfg.quadrature_h ? nlohmann::ordered_json(*cfg.quadrature_h) : nlohmann::ordered_json();
  if (cfg.ball) {
    std::vector<double> ball(cfg.ball->center.data(), cfg.ball->center.data() + cfg.ball->center.size());
    ball.push_back(cfg.ball->radius);
    j["ball"] = ball;
  } else {
    j["ball"] = nullptr;
  }
  j["eta"] = cfg.eta;
  j["phi"] = cfg.phi;
  j["max_support"] = cfg.max_support;
  j["out"] = cfg.out_dir;
  j["exclude_singular"] = cfg.exclude_singular;
  j["exclusion_c"] = cfg.exclusion_c;
  j["tangent_matrix"] = cfg.tangent_matrix;
  if (cfg.query)
    j["query"] = std::vector<double>(cfg.query->data(), cfg.query->data() + cfg.query->size());
  else
    j["query"] = nullptr;
  j["delta_grid"] = cfg.delta_grid;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  const nlohmann::json& j = doc.contains("config") && doc["config"].is_object() ? doc["config"] : doc;
  if (!j.is_object()) throw ArgumentError("config must be a JSON object");
  static const std::vector<std::string> known = {
      "shape", "density", "variant", "n_grid", "trials", "seed", "tau", "delta", "h", "ball", "eta", "phi",
      "max_support", "out", "exclude_singular", "exclusion_c", "tangent_matrix", "query", "delta_grid"};
  for (const auto& item : j.items())
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      throw ArgumentError("unknown config key '" + item.key() + "'");

  ExperimentConfig cfg;
  try {
    auto opt = [&](const char* key, std::optional<double>& dst) {
      if (j.contains(key) && !j[key].is_null()) dst = j[key].get<double>();
    };
    if (j.contains("shape")) cfg.shape = j["shape"].get<std::string>();
    if (j.contains("density")) cfg.density = j["density"].get<std::string>();
    if (j.contains("variant")) cfg.variant = j["variant"].get<std::string>();
    if (j.contains("n_grid")) cfg.n_grid = j["n_grid"].get<std::vector<std::size_t>>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    opt("tau", cfg.tau);
    opt("delta", cfg.delta);
    opt("h", cfg.quadrature_h);
    if (j.contains("ball") && !j["ball"].is_null()) {
      const auto v = j["ball"].get<std::vector<double>>();
      if (v.size() < 2) throw ArgumentError("ball needs a centre and a radius");
      Ball b;
      b.center = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size() - 1));
      b.radius = v.back();
      cfg.ball = b;
    }
    if (j.contains("eta")) cfg.eta = j["eta"].get<std::string>();
    if (j.contains("phi")) cfg.phi = j["phi"].get<std::string>();
    if (j.contains("max_support")) cfg.max_support = j["max_support"].get<std::size_t>();
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    if (j.contains("exclude_singular")) cfg.exclude_singular = j["exclude_singular"].get<bool>();
    if (j.contains("exclusion_c")) cfg.exclusion_c = j["exclusion_c"].get<double>();
    if (j.contains("tangent_matrix")) cfg.tangent_matrix = j["tangent_matrix"].get<std::string>();
    if (j.contains("query") && !j["query"].is_null()) {
      const auto v = j["query"].get<std::vector<double>>();
      cfg.query = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("delta_grid")) cfg.delta_grid = j["delta_grid"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return config_from_json(nlohmann::json::parse(text));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(path + ": " + e.what());
  }
}

void emit_results(const RateResult& result, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  const std::string base = (std::filesystem::path(dir) / result.experiment).string();

  CsvTable table;
  table.header = {"n", "trial", "delta", result.value_name, result.extra_name};
  for (const auto& rec : result.trials)
    table.rows.push_back({static_cast<double>(rec.n), static_cast<double>(rec.trial), rec.delta, rec.value, rec.extra});
  write_csv(base + "_trials.csv", table);

  nlohmann::ordered_json summary;
  summary["experiment"] = result.experiment;
  summary["version"] = kVersion;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  summary["generated_at"] = stamp;
  summary["config"] = config_to_json(result.config);
  summary["tau"] = result.tau;
  summary["quadrature_h"] = result.quadrature_h;
  summary["value"] = result.value_name;
  summary["extra"] = result.extra_name;
  summary["fitted_statistic"] = result.fitted_statistic;
  summary["slope_axis"] = result.slope_axis;
  summary["slope"] = result.slope ? nlohmann::ordered_json(*result.slope) : nlohmann::ordered_json();
  summary["slope_ci_half_width"] =
      result.slope_half_width ? nlohmann::ordered_json(*result.slope_half_width) : nlohmann::ordered_json();
  summary["extra_slope"] = result.extra_slope ? nlohmann::ordered_json(*result.extra_slope) : nlohmann::ordered_json();
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const auto& p : result.points) {
    nlohmann::ordered_json row;
    row["n"] = p.n;
    row["delta"] = p.delta;
    row["mean"] = p.mean;
    row["std_error"] = p.std_error;
    row["sd"] = p.sd;
    row["median"] = p.median;
    row["extra_mean"] = p.extra_mean;
    row["extra_median"] = p.extra_median;
    points.push_back(row);
  }
  summary["points"] = points;
  std::vector<std::uint64_t> streams;
  for (std::size_t g = 0; g < result.points.size(); ++g)
    for (std::size_t t = 0; t < result.config.trials; ++t) streams.push_back(trial_stream(g, t));
  summary["seed"] = result.config.seed;
  summary["trial_streams"] = streams;
  write_text_file(base + "_summary.json", summary.dump(2) + "\n");
}

}  // namespace varinf
