#include <varinf/estimators.hpp>

#include <cmath>

#include <json.hpp>

#include <varinf/errors.hpp>
#include <varinf/io.hpp>

namespace varinf {

EstimatorConfig::EstimatorConfig(int d_, double delta_, double r_, double tau_)
    : delta(delta_),
      r(r_),
      tau(tau_),
      d(d_),
      eta(triangular_profile(KernelKind::density), d_),
      phi(triangular_profile(KernelKind::covariance), d_) {}

void EstimatorConfig::validate() const {
  if (!(delta > 0.0) || !(r > 0.0)) throw ArgumentError("estimator bandwidths delta and r must be positive");
  if (!(tau > 0.0 && tau <= 1.0)) throw ArgumentError("tau must lie in (0, 1]");
  if (eta.dimension() != d || phi.dimension() != d) throw ArgumentError("kernel dimension differs from d");
  if (eta.profile().kind() != KernelKind::density || phi.profile().kind() != KernelKind::covariance)
    throw ArgumentError("eta must be a density kernel and phi a covariance kernel");
}

double density_estimate(const SpatialIndex& sample, const Point& x, const EstimatorConfig& cfg) {
  const std::size_t n = sample.size();
  if (n == 0) return 0.0;
  const KernelProfile& eta = cfg.eta.profile();
  double sum = 0.0;
  sample.for_each_in_ball(x, cfg.delta, [&](std::size_t, double dist2) { sum += eta(std::sqrt(dist2) / cfg.delta); });
  return sum / (static_cast<double>(n) * cfg.eta.constant() * std::pow(cfg.delta, cfg.d));
}

double phi_truncation(double t, double tau) {
  if (t < 0.5 * tau) return 0.0;
  if (t <= tau) return (2.0 * t / tau - 1.0) / t;
  return 1.0 / t;
}

namespace {

Eigen::VectorXd densities_at(const SpatialIndex& sample, const Matrix& points, const EstimatorConfig& cfg) {
  Eigen::VectorXd theta(points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) theta[i] = density_estimate(sample, points.col(i), cfg);
  return theta;
}

Eigen::VectorXd truncated_inverse(const Eigen::VectorXd& theta, double tau) {
  return theta.unaryExpr([tau](double t) { return phi_truncation(t, tau); });
}

Matrix concatenate(const SplitSample& sample) {
  const auto part = sample.parts[0].points.cols();
  Matrix out(sample.parts[0].points.rows(), 4 * part);
  for (std::size_t k = 0; k < 4; ++k) {
    if (sample.parts[k].points.cols() != part) throw ArgumentError("split parts differ in size");
    out.middleCols(static_cast<Eigen::Index>(k) * part, part) = sample.parts[k].points;
  }
  return out;
}

DiscreteVarifold assemble(const Matrix& points, const Eigen::VectorXd& weights, std::vector<Matrix> matrices,
                          const EstimatorConfig& cfg, VarifoldVariant variant) {
  DiscreteVarifold out;
  out.points = points;
  out.weights = weights;
  const bool truncate = variant == VarifoldVariant::V || variant == VarifoldVariant::V_tilde;
  if (truncate)
    for (auto& m : matrices) m = projector_truncate(m, cfg.d);
  out.matrices = std::move(matrices);
  out.projector = truncate;
  out.rank = truncate ? cfg.d : 0;
  return out;
}

}  // namespace

DiscreteMeasure measure_estimate(const SpatialIndex& sample, const EstimatorConfig& cfg) {
  return measure_estimate(sample, sample, cfg);
}

DiscreteMeasure measure_estimate(const SpatialIndex& support, const SpatialIndex& density_sample,
                                 const EstimatorConfig& cfg) {
  cfg.validate();
  DiscreteMeasure out;
  out.points = support.points();
  const double n = static_cast<double>(support.size());
  out.weights = truncated_inverse(densities_at(density_sample, out.points, cfg), cfg.tau);
  if (n > 0) out.weights /= n;
  return out;
}

Matrix covariance_matrix(const DiscreteMeasure& measure, const Point& x, double r, const EstimatorConfig& cfg) {
  if (!(r > 0.0)) throw ArgumentError("covariance radius must be positive");
  const auto n = x.size();
  Matrix sum = Matrix::Zero(n, n);
  const KernelProfile& phi = cfg.phi.profile();
  for (Eigen::Index i = 0; i < measure.points.cols(); ++i) {
    const Point z = measure.points.col(i) - x;
    const double w = phi(z.norm() / r);
    if (w != 0.0) sum.noalias() += (measure.weights[i] * w) * z * z.transpose();
  }
  return sum / (r * r * cfg.phi.constant() * std::pow(r, cfg.d));
}

Matrix covariance_matrix(const SpatialIndex& points, const Eigen::VectorXd& weights, const Point& x, double r,
                         const EstimatorConfig& cfg) {
  if (!(r > 0.0)) throw ArgumentError("covariance radius must be positive");
  const auto n = x.size();
  Matrix sum = Matrix::Zero(n, n);
  if (points.size() == 0) return sum;
  const bool uniform = weights.size() == 0;
  if (!uniform && static_cast<std::size_t>(weights.size()) != points.size())
    throw ArgumentError("covariance_matrix: one weight per indexed point expected");
  const double unit = 1.0 / static_cast<double>(points.size());
  const KernelProfile& phi = cfg.phi.profile();
  points.for_each_in_ball(x, r, [&](std::size_t i, double dist2) {
    const auto k = static_cast<Eigen::Index>(i);
    const double w = phi(std::sqrt(dist2) / r) * (uniform ? unit : weights[k]);
    if (w == 0.0) return;
    const Point z = points.points().col(k) - x;
    sum.noalias() += w * z * z.transpose();
  });
  return sum / (r * r * cfg.phi.constant() * std::pow(r, cfg.d));
}

Matrix tangent_sigma(const SpatialIndex& density_sample, const SpatialIndex& covariance_sample, const Point& x,
                     const EstimatorConfig& cfg) {
  cfg.validate();
  const double factor = phi_truncation(density_estimate(density_sample, x, cfg), cfg.tau);
  if (factor == 0.0) return Matrix::Zero(x.size(), x.size());
  return factor * covariance_matrix(covariance_sample, Eigen::VectorXd(), x, cfg.r, cfg);
}

Matrix projector_truncate(const Matrix& sigma, int d) {
  if (sigma.rows() != sigma.cols()) throw ArgumentError("projector_truncate: matrix must be square");
  if (d < 1 || d > sigma.rows()) throw ArgumentError("projector_truncate: rank must lie in [1, n]");
  if (asymmetry(sigma) > 1e-8) throw ArgumentError("projector_truncate: matrix is not symmetric");
  const Matrix u = jacobi_eigen(sigma).vectors.leftCols(d);
  const Matrix p = u * u.transpose();
  return 0.5 * (p + p.transpose());
}

Matrix snap_to_projector(const Matrix& a, int d) {
  if (a.rows() != a.cols()) throw ArgumentError("snap_to_projector: matrix must be square");
  if (d < 1 || d > a.rows()) throw ArgumentError("snap_to_projector: rank must lie in [1, n]");
  if (asymmetry(a) > 1e-8) throw ArgumentError("snap_to_projector: matrix is not symmetric");
  const SymmetricEigen eig = jacobi_eigen(a);
  if (d < a.rows() && eig.values[d - 1] - eig.values[d] < 1e-12)
    throw DegenerateGapError("snap_to_projector: no spectral gap after the top " + std::to_string(d) + " eigenvalues");
  const Matrix u = eig.vectors.leftCols(d);
  const Matrix p = u * u.transpose();
  return 0.5 * (p + p.transpose());
}

std::string variant_name(VarifoldVariant variant) {
  switch (variant) {
    case VarifoldVariant::W:
      return "W";
    case VarifoldVariant::V:
      return "V";
    case VarifoldVariant::W_tilde:
      return "W_tilde";
    case VarifoldVariant::V_tilde:
      return "V_tilde";
  }
  return "V";
}

VarifoldVariant variant_by_name(const std::string& name) {
  if (name == "W") return VarifoldVariant::W;
  if (name == "V") return VarifoldVariant::V;
  if (name == "W_tilde") return VarifoldVariant::W_tilde;
  if (name == "V_tilde") return VarifoldVariant::V_tilde;
  throw ArgumentError("unknown varifold variant '" + name + "'");
}

DiscreteVarifold varifold_estimate(const SampleBatch& sample, const EstimatorConfig& cfg, VarifoldVariant variant) {
  cfg.validate();
  const SpatialIndex index(sample.points);
  const Eigen::VectorXd phi_theta = truncated_inverse(densities_at(index, sample.points, cfg), cfg.tau);
  const double n = static_cast<double>(sample.size());
  const Eigen::VectorXd weights = n > 0 ? Eigen::VectorXd(phi_theta / n) : phi_theta;

  std::vector<Matrix> matrices;
  matrices.reserve(sample.size());
  const bool tilde = variant == VarifoldVariant::W_tilde || variant == VarifoldVariant::V_tilde;
  for (Eigen::Index i = 0; i < sample.points.cols(); ++i) {
    const Point x = sample.points.col(i);
    if (tilde)
      matrices.push_back(covariance_matrix(index, weights, x, cfg.r, cfg));
    else
      matrices.push_back(phi_theta[i] * covariance_matrix(index, Eigen::VectorXd(), x, cfg.r, cfg));
  }
  return assemble(sample.points, weights, std::move(matrices), cfg, variant);
}

DiscreteVarifold varifold_estimate(const SplitSample& sample, const EstimatorConfig& cfg, VarifoldVariant variant) {
  if (!cfg.splitting) {
    SampleBatch pooled = sample.parts[0];
    pooled.points = concatenate(sample);
    return varifold_estimate(pooled, cfg, variant);
  }
  cfg.validate();
  const Matrix& x = sample.x().points;
  const SpatialIndex y(sample.y().points);
  const SpatialIndex y_tilde(sample.y_tilde().points);
  const SpatialIndex z(sample.z().points);

  const double n = static_cast<double>(sample.part_size());
  Eigen::VectorXd weights = truncated_inverse(densities_at(y, x, cfg), cfg.tau);
  if (n > 0) weights /= n;

  std::vector<Matrix> matrices;
  matrices.reserve(sample.part_size());
  const bool tilde = variant == VarifoldVariant::W_tilde || variant == VarifoldVariant::V_tilde;
  const SpatialIndex support(x);
  for (Eigen::Index i = 0; i < x.cols(); ++i) {
    const Point p = x.col(i);
    if (tilde)
      matrices.push_back(covariance_matrix(support, weights, p, cfg.r, cfg));
    else
      matrices.push_back(tangent_sigma(y_tilde, z, p, cfg));
  }
  return assemble(x, weights, std::move(matrices), cfg, variant);
}

double bandwidth_rule(std::size_t n, int d, double a, double b) {
  if (n == 0) throw ArgumentError("bandwidth_rule: N must be positive");
  if (d < 1) throw ArgumentError("bandwidth_rule: d must be positive");
  if (!(a > 0.0 && a <= 1.0) || !(b > 0.0 && b <= 1.0)) throw ArgumentError("regularity exponents must lie in (0, 1]");
  return std::pow(static_cast<double>(n), -1.0 / (d + 2.0 * std::min(a, b)));
}

DiscreteVarifold split_varifold_estimate(const SplitSample& sample, int d, double a, double b, double tau) {
  if (sample.part_size() == 0) throw ArgumentError("split parts must be nonempty");
  const double delta = bandwidth_rule(sample.part_size(), d, a, b);
  EstimatorConfig cfg(d, delta, delta, tau);
  return varifold_estimate(sample, cfg, VarifoldVariant::V);
}

double default_tau(const NormalizedKernel& eta, double ahlfors_c0) {
  const double m = std::pow(2.0, -eta.dimension()) * eta.profile().positivity_floor() / (eta.constant() * ahlfors_c0);
  return std::min(1.0, 0.5 * m);
}

void save_estimate(const std::string& path, const DiscreteVarifold& estimate, const EstimateMetadata& meta) {
  save_varifold_csv(path, estimate);
  nlohmann::ordered_json sidecar;
  sidecar["N"] = meta.n;
  sidecar["delta"] = meta.delta;
  sidecar["r"] = meta.r;
  sidecar["tau"] = meta.tau;
  sidecar["seed"] = meta.seed;
  sidecar["shape"] = meta.shape;
  sidecar["variant"] = meta.variant;
  write_text_file(path + ".json", sidecar.dump(2) + "\n");
}

}  // namespace varinf
