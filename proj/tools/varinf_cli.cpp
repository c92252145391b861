// Command-line front end: Monte-Carlo experiments, ad-hoc flat-metric
// evaluation between CSV files, and dataset emission.

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <varinf/errors.hpp>
#include <varinf/estimators.hpp>
#include <varinf/harness.hpp>
#include <varinf/io.hpp>
#include <varinf/metrics.hpp>
#include <varinf/sampling.hpp>

namespace {

using namespace varinf;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ArgumentError("not a number: '" + item + "'");
    }
  }
  return out;
}

Ball parse_ball(const std::string& text) {
  const auto v = parse_list(text);
  if (v.size() < 2) throw ArgumentError("--ball expects cx,cy,...,R");
  Ball b;
  b.center = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size() - 1));
  b.radius = v.back();
  return b;
}

struct CommonFlags {
  std::string config;
  std::string shape, density, variant, n_grid, ball, out = ".";
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tau = 0.0, delta = 0.0, h = 0.0;
  // tangent / fluct
  bool exclude_singular = false;
  std::string tangent_matrix, query, delta_grid;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON config file; flags override its keys");
  app->add_option("--shape", f.shape, "circle, sphere, segment, stadium:radius=1,length=2, square, cross, disk, weier:s=0.3,t=4,J=8");
  app->add_option("--density", f.density, "uniform, tilt, bump:b=0.5, jump");
  app->add_option("--variant", f.variant, "W, V or split")->check(CLI::IsMember({"W", "V", "split", "W_tilde", "V_tilde"}));
  app->add_option("--n-grid", f.n_grid, "comma-separated sample sizes per part");
  app->add_option("--trials", f.trials, "trials per grid point");
  app->add_option("--seed", f.seed, "root seed");
  app->add_option("--tau", f.tau, "truncation level (default: from the shape's Ahlfors constant)");
  app->add_option("--delta", f.delta, "fixed bandwidth (default: N^{-1/(d+2min(a,b))})");
  app->add_option("--quad-h", f.h, "ground-truth quadrature resolution");
  app->add_option("--ball", f.ball, "localization ball cx,cy,...,R");
  app->add_option("--out", f.out, "output directory");
}

ExperimentConfig resolve(const CommonFlags& f, CLI::App* app) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  auto given = [&](const char* name) {
    const CLI::Option* opt = app->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  };
  if (given("--shape")) cfg.shape = f.shape;
  if (given("--density")) cfg.density = f.density;
  if (given("--variant")) cfg.variant = f.variant;
  if (given("--n-grid")) {
    cfg.n_grid.clear();
    for (double v : parse_list(f.n_grid)) cfg.n_grid.push_back(static_cast<std::size_t>(v));
  }
  if (given("--trials")) cfg.trials = f.trials;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--tau")) cfg.tau = f.tau;
  if (given("--delta")) cfg.delta = f.delta;
  if (given("--quad-h")) cfg.quadrature_h = f.h;
  if (given("--ball")) cfg.ball = parse_ball(f.ball);
  if (given("--out") || cfg.out_dir.empty()) cfg.out_dir = f.out;
  if (given("--exclude-singular")) cfg.exclude_singular = f.exclude_singular;
  if (given("--tangent-matrix")) cfg.tangent_matrix = f.tangent_matrix;
  if (given("--query")) {
    const auto v = parse_list(f.query);
    cfg.query = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  if (given("--delta-grid")) cfg.delta_grid = parse_list(f.delta_grid);
  cfg.validate();
  return cfg;
}

void report(const RateResult& r, const std::string& dir) {
  emit_results(r, dir);
  std::cout << r.experiment << " on " << r.config.shape << "/" << r.config.density << " (tau " << r.tau << ")\n";
  for (const auto& p : r.points)
    std::cout << "  N=" << p.n << " delta=" << p.delta << " mean=" << p.mean << " se=" << p.std_error << " sd=" << p.sd
              << " median=" << p.median << " " << r.extra_name << "=" << p.extra_mean << "\n";
  if (r.slope) {
    std::cout << "  slope of " << r.fitted_statistic << " vs " << r.slope_axis << ": " << *r.slope;
    if (r.slope_half_width) std::cout << " +/- " << *r.slope_half_width;
    std::cout << "\n";
  } else {
    std::cout << "  slope: n/a\n";
  }
  std::cout << "  wrote " << dir << "/" << r.experiment << "_trials.csv and _summary.json\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Varifold estimation from point samples and flat-metric evaluation"};
  app.require_subcommand(1);

  CommonFlags rate_f, measure_f, fluct_f, tangent_f, sample_f;
  auto* rate = app.add_subcommand("rate", "beta(V-hat, W_S) against N");
  add_common(rate, rate_f);
  auto* measure = app.add_subcommand("measure", "beta(nu-hat, H^d|S) against N");
  add_common(measure, measure_f);
  auto* fluct = app.add_subcommand("fluct", "spread of theta_{delta,N}(x) over seeds");
  add_common(fluct, fluct_f);
  fluct->add_option("--query", fluct_f.query, "query point x1,...,xn (default: shape anchor)");
  fluct->add_option("--delta-grid", fluct_f.delta_grid, "vary delta at fixed N = first grid entry");
  auto* tangent = app.add_subcommand("tangent", "L1 tangent error against N");
  add_common(tangent, tangent_f);
  tangent->add_flag("--exclude-singular", tangent_f.exclude_singular, "drop points within delta_N of the singular set");
  tangent->add_option("--tangent-matrix", tangent_f.tangent_matrix, "sigma or projector");

  std::string file_a, file_b, flat_ball, metric = "auto";
  double flat_grid = 0.0;
  std::size_t cap = 4000;
  auto* flatnorm = app.add_subcommand("flatnorm", "beta between two CSV measures or varifolds");
  flatnorm->add_option("a", file_a, "first CSV file")->required();
  flatnorm->add_option("b", file_b, "second CSV file")->required();
  flatnorm->add_option("--ball", flat_ball, "localization ball cx,cy,...,R");
  flatnorm->add_option("--metric", metric, "euclidean, varifold or auto")->check(CLI::IsMember({"auto", "euclidean", "varifold"}));
  flatnorm->add_option("--coarsen", flat_grid, "coarsening grid diameter");
  flatnorm->add_option("--max-support", cap, "solver cap on the merged support");

  auto* sample_cmd = app.add_subcommand("sample", "draw a sample and optionally its estimated varifold");
  add_common(sample_cmd, sample_f);
  std::size_t sample_n = 1000;
  bool with_estimate = false;
  sample_cmd->add_option("-n,--count", sample_n, "sample size (per part when estimating)");
  sample_cmd->add_flag("--estimate", with_estimate, "also write the split varifold estimate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rate->parsed()) {
      const auto cfg = resolve(rate_f, rate);
      report(run_rate_experiment(cfg), cfg.out_dir);
    } else if (measure->parsed()) {
      const auto cfg = resolve(measure_f, measure);
      report(run_measure_experiment(cfg), cfg.out_dir);
    } else if (fluct->parsed()) {
      const auto cfg = resolve(fluct_f, fluct);
      report(run_fluctuation_experiment(cfg), cfg.out_dir);
    } else if (tangent->parsed()) {
      const auto cfg = resolve(tangent_f, tangent);
      report(run_tangent_experiment(cfg), cfg.out_dir);
    } else if (flatnorm->parsed()) {
      const DiscreteVarifold a = load_varifold_csv(file_a);
      const DiscreteVarifold b = load_varifold_csv(file_b);
      const bool product = metric == "varifold" ||
                           (metric == "auto" && a.size() > 0 && a.matrices[0].cwiseAbs().sum() > 0.0);
      FlatMetricProblem problem = product ? FlatMetricProblem::varifolds(a, b) : FlatMetricProblem::measures(a.mass(), b.mass());
      if (!flat_ball.empty()) problem.ball = parse_ball(flat_ball);
      if (flat_grid > 0.0) problem.options.coarsen_grid = flat_grid;
      problem.options.max_support = cap;
      const FlatMetricResult r = solve_flat_metric(problem);
      nlohmann::ordered_json out;
      out["value"] = r.value;
      out["exact"] = r.exact;
      out["metric"] = product ? "varifold" : "euclidean";
      out["localized"] = problem.ball.has_value();
      out["support"] = r.charge.size();
      out["arcs"] = r.arcs;
      out["pricing_rounds"] = r.pricing_rounds;
      out["coarsening_bound"] = r.coarsening_bound;
      out["witness"] = std::vector<double>(r.witness.data(), r.witness.data() + r.witness.size());
      nlohmann::ordered_json flow = nlohmann::ordered_json::array();
      for (const auto& arc : r.flow) flow.push_back({arc.from, arc.to, arc.amount});
      out["flow"] = flow;
      std::cout << out.dump(2) << "\n";
    } else if (sample_cmd->parsed()) {
      const auto cfg = resolve(sample_f, sample_cmd);
      const ShapeModel shape(geometry_by_name(cfg.shape), density_by_name(cfg.density));
      const std::string base = cfg.out_dir + "/sample";
      std::filesystem::create_directories(cfg.out_dir);
      if (!with_estimate) {
        save_sample_csv(base + ".csv", sample(shape, sample_n, cfg.seed));
        std::cout << "wrote " << base << ".csv\n";
      } else {
        const SplitSample s = sample_split(shape, sample_n, cfg.seed);
        const auto& reg = shape.regularity();
        const int d = shape.intrinsic_dim();
        const double tau = cfg.tau ? *cfg.tau
                                   : default_tau(NormalizedKernel(triangular_profile(KernelKind::density), d), reg.ahlfors_c0);
        const double delta = cfg.delta ? *cfg.delta : bandwidth_rule(sample_n, d, reg.a, reg.b);
        EstimatorConfig ec(d, delta, delta, tau);
        ec.splitting = cfg.variant == "split";
        const VarifoldVariant v = cfg.variant == "split" ? VarifoldVariant::V : variant_by_name(cfg.variant);
        for (std::size_t k = 0; k < 4; ++k) save_sample_csv(base + "_part" + std::to_string(k) + ".csv", s.parts[k]);
        save_estimate(cfg.out_dir + "/estimate.csv", varifold_estimate(s, ec, v),
                      {sample_n, delta, delta, tau, cfg.seed, shape.id(), cfg.variant});
        std::cout << "wrote " << base << "_part{0..3}.csv and " << cfg.out_dir << "/estimate.csv\n";
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
