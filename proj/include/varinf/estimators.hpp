#pragma once

#include <cstdint>
#include <string>

#include <varinf/kernels.hpp>
#include <varinf/linalg.hpp>
#include <varinf/measures.hpp>
#include <varinf/sampling.hpp>

namespace varinf {

struct EstimatorConfig {
  EstimatorConfig(int d, double delta, double r, double tau);

  double delta;
  double r;
  double tau;
  int d;
  NormalizedKernel eta;  // density kernel, triangular by default
  NormalizedKernel phi;  // covariance kernel, triangular by default
  bool splitting = true;

  /// Throws ArgumentError unless delta, r > 0, 0 < tau <= 1 and both kernels have dimension d.
  void validate() const;
};

/// theta_{delta,N}(x) = sum_i eta(|x - X_i| / delta) / (N C_eta delta^d) over the indexed sample.
double density_estimate(const SpatialIndex& sample, const Point& x, const EstimatorConfig& cfg);

/// chi_tau(t) / t, with value 0 for t < tau/2 (and at t = 0).
double phi_truncation(double t, double tau);

/// nu_{delta,N}: the sample points with weights Phi(theta_{delta,N}(X_i)) / N.
DiscreteMeasure measure_estimate(const SpatialIndex& sample, const EstimatorConfig& cfg);
/// Split form: atoms at the points of `support`, densities estimated from `density_sample`.
DiscreteMeasure measure_estimate(const SpatialIndex& support, const SpatialIndex& density_sample,
                                 const EstimatorConfig& cfg);

/// Sigma_r(x, lambda) = sum_i w_i psi_r(p_i - x) / (C_phi r^d).
Matrix covariance_matrix(const DiscreteMeasure& measure, const Point& x, double r, const EstimatorConfig& cfg);
/// Same, for lambda = sum_i weights_i delta_{p_i} over indexed points (uniform 1/N if `weights` is empty).
Matrix covariance_matrix(const SpatialIndex& points, const Eigen::VectorXd& weights, const Point& x, double r,
                         const EstimatorConfig& cfg);

/// sigma_{r,delta,N}(x) = Phi(theta^A_{delta,N}(x)) Sigma_r(x, mu^B_N).
Matrix tangent_sigma(const SpatialIndex& density_sample, const SpatialIndex& covariance_sample, const Point& x,
                     const EstimatorConfig& cfg);

/// Projector onto the span of the top-d eigenvectors. Throws ArgumentError when
/// the input is asymmetric beyond 1e-8 or d is outside [1, n].
Matrix projector_truncate(const Matrix& sigma, int d);
/// projector_truncate, but throws DegenerateGapError when lambda_d - lambda_{d+1} < 1e-12.
Matrix snap_to_projector(const Matrix& a, int d);

enum class VarifoldVariant {
  W,        // matrices sigma_{r,delta,N}
  V,        // rank-d truncations of sigma_{r,delta,N}
  W_tilde,  // matrices Sigma_r(., nu_{delta,N})
  V_tilde,  // rank-d truncations of Sigma_r(., nu_{delta,N})
};

std::string variant_name(VarifoldVariant variant);
VarifoldVariant variant_by_name(const std::string& name);

/// Non-split estimators: every ingredient is computed from the same sample.
DiscreteVarifold varifold_estimate(const SampleBatch& sample, const EstimatorConfig& cfg, VarifoldVariant variant);

/// Split estimators: atoms at X, weights from Y, the Phi factor of sigma from Y~ and
/// the covariance from Z.
DiscreteVarifold varifold_estimate(const SplitSample& sample, const EstimatorConfig& cfg, VarifoldVariant variant);

/// delta_N = N^{-1 / (d + 2 min(a, b))}
double bandwidth_rule(std::size_t n, int d, double a, double b);

/// V-hat with delta = r = delta_N and triangular kernels.
DiscreteVarifold split_varifold_estimate(const SplitSample& sample, int d, double a, double b, double tau);

/// 2^{-d-1} m_eta / (C_eta C_0), capped at 1.
double default_tau(const NormalizedKernel& eta, double ahlfors_c0);

struct EstimateMetadata {
  std::size_t n = 0;
  double delta = 0.0;
  double r = 0.0;
  double tau = 0.0;
  std::uint64_t seed = 0;
  std::string shape;
  std::string variant;
};

/// Writes the varifold CSV at `path` and a JSON sidecar at `path` + ".json".
void save_estimate(const std::string& path, const DiscreteVarifold& estimate, const EstimateMetadata& meta);

}  // namespace varinf
