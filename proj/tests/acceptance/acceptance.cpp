// Acceptance runner. Each criterion prints a single PASS/FAIL line; the exit
// status is nonzero when any selected criterion fails.
//
//   acceptance                 run all twelve
//   acceptance --criterion 7   run one

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/QR>

#include <varinf/estimators.hpp>
#include <varinf/geometry.hpp>
#include <varinf/harness.hpp>
#include <varinf/io.hpp>
#include <varinf/kernels.hpp>
#include <varinf/metrics.hpp>
#include <varinf/rng.hpp>

using namespace varinf;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream out;
  out.precision(digits);
  out << v;
  return out.str();
}

std::string out_dir(int k) {
  const std::string dir = "acceptance_out/c" + std::string(k < 10 ? "0" : "") + std::to_string(k);
  std::filesystem::create_directories(dir);
  return dir;
}

Matrix random_projector(Philox& rng, int n, int d) {
  Matrix g(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) g(i, j) = rng.normal();
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(n, d);
  return q * q.transpose();
}

Matrix random_symmetric(Philox& rng, int n) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return 0.5 * (a + a.transpose());
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

std::vector<double> medians(const RateResult& r) {
  std::vector<double> out;
  for (const auto& p : r.points) out.push_back(p.median);
  return out;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : " ") + fmt(x, 3);
  return s;
}

bool slope_within(const RateResult& r, double target, double tol) {
  return r.slope && std::abs(*r.slope - target) <= tol;
}

std::string slope_text(const RateResult& r) {
  if (!r.slope) return "n/a";
  return fmt(*r.slope) + (r.slope_half_width ? " +/- " + fmt(*r.slope_half_width, 2) : "");
}

ExperimentConfig protocol(const std::string& shape) {
  ExperimentConfig cfg;
  cfg.shape = shape;
  cfg.n_grid = {250, 500, 1000, 2000, 4000, 8000, 16000};
  cfg.trials = 20;
  cfg.seed = 20240611;
  return cfg;
}

RateResult run_and_emit(const std::function<RateResult(const ExperimentConfig&)>& run, const ExperimentConfig& cfg,
                        const std::string& dir) {
  RateResult r = run(cfg);
  emit_results(r, dir);
  return r;
}

// ---------------------------------------------------------------------------

Outcome flat_plane_identity() {
  Philox rng(1, 1);
  double worst = 0.0;
  for (int d = 1; d <= 2; ++d) {
    const int n = d + 1;
    const double r = 0.3;
    const Matrix p = random_projector(rng, n, d);
    Point x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.normal();
    const DiscreteMeasure plane = flat_plane_quadrature(d, n, x, p, r, r / 500.0);
    const EstimatorConfig cfg(d, r, r, 1.0);
    worst = std::max(worst, symmetric_operator_norm(covariance_matrix(plane, x, r, cfg) - p));
  }
  return {worst <= 2e-3, "max ||Sigma_r - P||_op = " + fmt(worst, 3) + " (limit 2e-3)"};
}

Outcome normalization_constants() {
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    const double omega = unit_ball_volume(d);
    // triangular profiles: d omega int (1-r) r^{d-1} = omega / (d+1), omega int (1-t) t^{d+1} = omega / ((d+2)(d+3))
    const double eta_exact = omega / (d + 1);
    const double phi_exact = omega / ((d + 2.0) * (d + 3.0));
    const double eta_quad = normalization_eta(triangular_profile(KernelKind::density).without_polynomial(), d);
    const double phi_quad = normalization_phi(triangular_profile(KernelKind::covariance).without_polynomial(), d);
    worst = std::max({worst, std::abs(eta_quad / eta_exact - 1.0), std::abs(phi_quad / phi_exact - 1.0)});
  }
  return {worst <= 1e-10, "max relative error " + fmt(worst, 3) + " (limit 1e-10)"};
}

Outcome truncation_optimality() {
  Philox rng(3, 3);
  std::size_t violations = 0, cases = 0;
  double worst = -INFINITY;
  for (int s = 0; s < 100; ++s) {
    const int n = 2 + s % 3, d = 1 + (s / 3) % (n - 1);
    const Matrix sigma = random_symmetric(rng, n);
    const double best = symmetric_operator_norm(sigma - projector_truncate(sigma, d));
    for (int k = 0; k < 100; ++k, ++cases) {
      const double other = symmetric_operator_norm(sigma - random_projector(rng, n, d));
      worst = std::max(worst, best - other);
      if (best > other + 1e-12) ++violations;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations in " + std::to_string(cases) +
                               " comparisons (max excess " + fmt(worst, 3) + ")"};
}

DiscreteVarifold random_atoms(Philox& rng, int count, double spread, bool with_matrices) {
  DiscreteVarifold v;
  v.points = Matrix(2, count);
  v.weights = Eigen::VectorXd(count);
  for (int i = 0; i < count; ++i) {
    v.points.col(i) = Eigen::Vector2d(spread * rng.uniform(), spread * rng.uniform());
    v.weights[i] = 0.05 + rng.uniform();
    if (with_matrices) v.matrices.push_back(random_projector(rng, 2, 1));
  }
  v.projector = with_matrices;
  v.rank = with_matrices ? 1 : 0;
  return v;
}

// Near and far clusters, so both transport arcs and creation/destruction arcs are used.
FlatMetricProblem random_instance(Philox& rng, int max_points) {
  const int na = 1 + static_cast<int>(rng.uniform() * (max_points / 2)), nb = 1 + static_cast<int>(rng.uniform() * (max_points / 2));
  const double spread = rng.uniform() < 0.5 ? 0.5 + rng.uniform() : 3.0 + 4.0 * rng.uniform();
  const bool varifold = rng.uniform() < 0.5;
  DiscreteVarifold a = random_atoms(rng, na, spread, varifold), b = random_atoms(rng, nb, spread, varifold);
  if (rng.uniform() < 0.3 && nb > 1) {
    b.points.col(0) = a.points.col(0);  // shared atom
    if (varifold) b.matrices[0] = a.matrices[0];
  }
  std::optional<Ball> ball;
  if (rng.uniform() < 0.4) ball = Ball{Eigen::Vector2d(spread * rng.uniform(), spread * rng.uniform()), 0.3 + spread * rng.uniform()};
  if (varifold) return FlatMetricProblem::varifolds(a, b, ball);
  return FlatMetricProblem::measures(a.mass(), b.mass(), ball);
}

Outcome flat_metric_duality() {
  Philox rng(4, 4);
  double worst = 0.0;
  std::size_t transport = 0, slack = 0, inexact = 0;
  for (int k = 0; k < 200; ++k) {
    const FlatMetricProblem problem = random_instance(rng, 12);
    const FlatMetricResult r = solve_flat_metric(problem);
    worst = std::max(worst, std::abs(r.value - lp_oracle(problem)));
    if (!r.exact) ++inexact;
    for (const auto& arc : r.flow) (arc.from < 0 || arc.to < 0 ? slack : transport) += 1;
  }
  return {worst <= 1e-6 && inexact == 0 && transport > 0 && slack > 0,
          "max |flow - LP| = " + fmt(worst, 3) + " over 200 instances; " + std::to_string(transport) + " transport and " +
              std::to_string(slack) + " ground arcs used"};
}

Outcome metric_axioms() {
  Philox rng(5, 5);
  std::size_t failures = 0;
  double worst_triangle = -INFINITY;
  for (int k = 0; k < 500; ++k) {
    const bool varifold = k % 2 == 1;
    const double spread = k % 3 == 0 ? 0.7 : 3.0;
    const auto a = random_atoms(rng, 1 + k % 5, spread, varifold), b = random_atoms(rng, 1 + (k / 5) % 5, spread, varifold),
               c = random_atoms(rng, 1 + (k / 25) % 5, spread, varifold);
    auto problem = [&](const DiscreteVarifold& x, const DiscreteVarifold& y, std::optional<Ball> ball = std::nullopt) {
      return varifold ? FlatMetricProblem::varifolds(x, y, ball) : FlatMetricProblem::measures(x.mass(), y.mass(), ball);
    };
    const Ball ball{Eigen::Vector2d(spread * rng.uniform(), spread * rng.uniform()), 0.2 + spread * rng.uniform()};
    const double ab = bl_distance(problem(a, b)), ba = bl_distance(problem(b, a));
    const double bc = bl_distance(problem(b, c)), ac = bl_distance(problem(a, c));
    const double aa = bl_distance(problem(a, a));
    const double lab = bl_distance_localized(problem(a, b, ball)), lbc = bl_distance_localized(problem(b, c, ball)),
                 lac = bl_distance_localized(problem(a, c, ball));
    worst_triangle = std::max({worst_triangle, ac - ab - bc, lac - lab - lbc});
    const bool ok = ab >= 0.0 && aa == 0.0 && std::abs(ab - ba) <= 1e-9 && ac <= ab + bc + 1e-9 && lac <= lab + lbc + 1e-9 &&
                    lab >= 0.0 && lab <= ab + 1e-9 && ab > 0.0;
    if (!ok) ++failures;
  }
  return {failures == 0, std::to_string(failures) + " of 500 instances violate an axiom (max triangle excess " +
                             fmt(worst_triangle, 3) + ")"};
}

Outcome fluctuation_exponent() {
  ExperimentConfig cfg = protocol("circle");
  cfg.n_grid = {500, 1000, 2000, 4000, 8000, 16000, 32000};
  cfg.trials = 400;
  cfg.delta = 0.2;
  const RateResult r = run_and_emit(run_fluctuation_experiment, cfg, out_dir(6));
  return {slope_within(r, -0.5, 0.1), "slope of sd(theta) vs N = " + slope_text(r) + " (target -0.5 +/- 0.1)"};
}

Outcome main_rate() {
  const RateResult r = run_and_emit(run_rate_experiment, protocol("circle"), out_dir(7));
  const bool monotone = strictly_decreasing(medians(r));
  return {slope_within(r, -1.0 / 3.0, 0.15) && monotone,
          "slope " + slope_text(r) + " (target -0.333 +/- 0.15); medians " + list(medians(r)) +
              (monotone ? " decreasing" : " NOT decreasing")};
}

Outcome measure_rate() {
  const RateResult r = run_and_emit(run_measure_experiment, protocol("circle"), out_dir(8));
  const double mass = r.points.back().extra_median;
  const double rel = std::abs(mass / (2 * pi) - 1.0);
  return {slope_within(r, -1.0 / 3.0, 0.15) && rel <= 0.02,
          "slope " + slope_text(r) + " (target -0.333 +/- 0.15); median mass at N=16000 " + fmt(mass, 6) +
              " (rel. error " + fmt(rel, 2) + ", limit 0.02)"};
}

Outcome tangent_rate() {
  const RateResult circle = run_and_emit(run_tangent_experiment, protocol("circle"), out_dir(9) + "/circle");
  const RateResult sphere = run_and_emit(run_tangent_experiment, protocol("sphere"), out_dir(9) + "/sphere");
  const bool ok_circle = slope_within(circle, -1.0 / 3.0, 0.15), ok_sphere = slope_within(sphere, -0.25, 0.15);
  return {ok_circle && ok_sphere, std::string("circle slope ") + slope_text(circle) + (ok_circle ? " ok" : " out of range") +
                                      " (target -0.333 +/- 0.15); sphere slope " + slope_text(sphere) +
                                      (ok_sphere ? " ok" : " out of range") + " (target -0.25 +/- 0.15)"};
}

Outcome singular_robustness() {
  bool pass = true;
  std::string detail;
  for (const std::string shape : {"square", "cross"}) {
    const RateResult rate = run_and_emit(run_rate_experiment, protocol(shape), out_dir(10) + "/" + shape + "_rate");
    ExperimentConfig tcfg = protocol(shape);
    tcfg.exclude_singular = true;
    const RateResult tangent = run_and_emit(run_tangent_experiment, tcfg, out_dir(10) + "/" + shape + "_tangent");
    const bool monotone = strictly_decreasing(medians(rate));
    const bool slope_ok = slope_within(tangent, -1.0 / 3.0, 0.2);
    bool inflated = true;
    for (const auto& p : tangent.points) inflated = inflated && p.extra_mean > p.mean;
    pass = pass && monotone && slope_ok && inflated;
    detail += (detail.empty() ? "" : "; ") + shape + ": beta medians " + (monotone ? "decreasing" : "NOT decreasing") +
              ", restricted tangent slope " + slope_text(tangent) + (slope_ok ? "" : " (out of range)") +
              ", unrestricted > restricted " + (inflated ? "at every N" : "NOT at every N");
  }
  return {pass, detail};
}

Outcome offset_scaling() {
  const ShapeModel square(make_square_boundary(), {});
  const DiscreteVarifold q = square.quadrature_varifold(1e-4).varifold;
  std::vector<double> rho = {0.01, 0.02, 0.04, 0.08, 0.16}, mass;
  for (double r : rho) mass.push_back(offset_mass(square, q, r));
  const double slope = loglog_slope(rho, mass);
  return {std::abs(slope - 1.0) <= 0.1, "slope " + fmt(slope, 6) + " (target 1 +/- 0.1)"};
}

std::string file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string without_timestamp(const std::string& json_text) {
  auto doc = nlohmann::json::parse(json_text);
  doc.erase("generated_at");
  return doc.dump();
}

Outcome determinism() {
  const std::string base = out_dir(12);
  struct Job {
    std::string name;
    std::function<RateResult(const ExperimentConfig&)> run;
  };
  const std::vector<Job> jobs = {{"rate", run_rate_experiment},
                                 {"measure", run_measure_experiment},
                                 {"fluct", run_fluctuation_experiment},
                                 {"tangent", run_tangent_experiment}};
  ExperimentConfig cfg = protocol("stadium");
  cfg.density = "tilt";
  cfg.n_grid = {200, 400, 800};
  cfg.trials = 4;
  std::size_t identical = 0;
  std::string mismatched;
  for (const auto& job : jobs) {
    for (const char* run : {"first", "second"}) emit_results(job.run(cfg), base + "/" + run);
    const std::string stem = "/" + job.name;
    const bool csv_same = file_bytes(base + "/first" + stem + "_trials.csv") == file_bytes(base + "/second" + stem + "_trials.csv");
    const bool json_same = without_timestamp(file_bytes(base + "/first" + stem + "_summary.json")) ==
                           without_timestamp(file_bytes(base + "/second" + stem + "_summary.json"));
    if (csv_same && json_same) ++identical;
    else mismatched += " " + job.name;
  }
  return {identical == jobs.size(), std::to_string(identical) + "/" + std::to_string(jobs.size()) +
                                        " experiments reproduced byte-identically" +
                                        (mismatched.empty() ? "" : " (differs:" + mismatched + ")")};
}

struct Criterion {
  const char* title;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"flat-plane identity", flat_plane_identity},
    {"normalization constants", normalization_constants},
    {"projector-truncation optimality", truncation_optimality},
    {"flat-metric duality", flat_metric_duality},
    {"metric axioms", metric_axioms},
    {"fluctuation exponent", fluctuation_exponent},
    {"main rate, smooth case", main_rate},
    {"measure-estimate rate", measure_rate},
    {"tangent L1 rate", tangent_rate},
    {"singular-set robustness", singular_robustness},
    {"offset-measure scaling", offset_scaling},
    {"determinism", determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion k]...\n";
      return 2;
    }
  }
  if (selected.empty())
    for (int k = 1; k <= 12; ++k) selected.push_back(k);

  int failures = 0;
  for (int k : selected) {
    if (k < 1 || k > 12) {
      std::cerr << "no criterion " << k << "\n";
      return 2;
    }
    const Criterion& c = kCriteria[k - 1];
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  criterion " << k << " (" << c.title << "): " << outcome.detail
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
