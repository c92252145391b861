#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <varinf/linalg.hpp>

namespace varinf {

enum class KernelKind { density, covariance };

/// A radial profile t -> k(t): even, nonnegative, supported in (-1, 1).
///
/// `sup_bound` and `lip_bound` are declared bounds on ||k||_inf and Lip(k);
/// `positivity_floor` is min k on [0, 1/2] (must be > 0 for density kernels).
/// Polynomial profiles may carry their coefficients in |t| on [0, 1) so that
/// normalization integrals are evaluated in closed form.
class KernelProfile {
 public:
  KernelProfile(std::string name, KernelKind kind, std::function<double(double)> on_unit,
                double sup_bound, double lip_bound, double positivity_floor,
                std::optional<std::vector<double>> polynomial = std::nullopt);

  /// Profile value; exactly 0 for |t| >= 1.
  double operator()(double t) const {
    const double a = t < 0 ? -t : t;
    return a >= 1.0 ? 0.0 : on_unit_(a);
  }

  const std::string& name() const { return name_; }
  KernelKind kind() const { return kind_; }
  double sup_bound() const { return sup_bound_; }
  double lip_bound() const { return lip_bound_; }
  double positivity_floor() const { return positivity_floor_; }
  const std::optional<std::vector<double>>& polynomial() const { return polynomial_; }

  /// Same profile without its closed-form description (forces quadrature).
  KernelProfile without_polynomial() const;

 private:
  std::string name_;
  KernelKind kind_;
  std::function<double(double)> on_unit_;
  double sup_bound_;
  double lip_bound_;
  double positivity_floor_;
  std::optional<std::vector<double>> polynomial_;
};

/// (1 - |t|)_+
KernelProfile triangular_profile(KernelKind kind);
/// (1 - t^2)_+
KernelProfile epanechnikov_profile(KernelKind kind);
/// Piecewise-linear profile read from a two-column text file (t, value) on [0, 1].
KernelProfile tabulated_profile(const std::string& path, KernelKind kind);
/// Resolves "triangular", "epanechnikov" or "custom:<file>".
KernelProfile profile_by_name(const std::string& name, KernelKind kind);

/// Volume of the unit ball in R^d, 1 <= d <= 16.
double unit_ball_volume(int d);

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance `tol`.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// d * omega_d * int_0^1 eta(r) r^{d-1} dr
double normalization_eta(const KernelProfile& profile, int d);
/// omega_d * int_0^1 phi(t) t^{d+1} dt
double normalization_phi(const KernelProfile& profile, int d);

/// A profile together with the intrinsic dimension and its cached normalization.
class NormalizedKernel {
 public:
  NormalizedKernel(KernelProfile profile, int d);

  const KernelProfile& profile() const { return profile_; }
  int dimension() const { return d_; }
  double constant() const { return constant_; }

 private:
  KernelProfile profile_;
  int d_;
  double constant_;
};

/// eta(|z| / delta)
double eval_eta_delta(const NormalizedKernel& kernel, const Point& z, double delta);

/// phi(|z|/r) (z/r) (z/r)^T
Matrix eval_psi_r(const NormalizedKernel& kernel, const Point& z, double r);

}  // namespace varinf
