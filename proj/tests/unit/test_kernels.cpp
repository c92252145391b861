#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include <varinf/errors.hpp>
#include <varinf/estimators.hpp>
#include <varinf/kernels.hpp>

using namespace varinf;
using std::numbers::pi;

namespace {

Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) p[k++] = x;
  return p;
}

}  // namespace

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(pi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-15));
  // omega_4 = pi^2 / 2, omega_5 = 8 pi^2 / 15
  CHECK(unit_ball_volume(4) == doctest::Approx(pi * pi / 2.0).epsilon(1e-14));
  CHECK(unit_ball_volume(5) == doctest::Approx(8.0 * pi * pi / 15.0).epsilon(1e-14));
  CHECK_THROWS_AS(unit_ball_volume(0), ArgumentError);
}

TEST_CASE("triangular normalization constants") {
  const auto eta = triangular_profile(KernelKind::density);
  const auto phi = triangular_profile(KernelKind::covariance);
  CHECK(normalization_eta(eta, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(normalization_eta(eta, 2) == doctest::Approx(pi / 3.0).epsilon(1e-14));
  CHECK(normalization_phi(phi, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  CHECK(normalization_phi(phi, 2) == doctest::Approx(pi / 20.0).epsilon(1e-14));
  CHECK(normalization_phi(epanechnikov_profile(KernelKind::covariance), 1) == doctest::Approx(4.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("quadrature agrees with the closed forms") {
  for (int d = 1; d <= 4; ++d) {
    for (const auto& p : {triangular_profile(KernelKind::density), epanechnikov_profile(KernelKind::density)})
      CHECK(normalization_eta(p.without_polynomial(), d) == doctest::Approx(normalization_eta(p, d)).epsilon(1e-10));
    for (const auto& p : {triangular_profile(KernelKind::covariance), epanechnikov_profile(KernelKind::covariance)})
      CHECK(normalization_phi(p.without_polynomial(), d) == doctest::Approx(normalization_phi(p, d)).epsilon(1e-10));
  }
}

TEST_CASE("constant profile cross-check gives omega_d") {
  // not admissible as a kernel (jump at 1), only exercises the integrator
  for (int d = 1; d <= 3; ++d) {
    const double integral = adaptive_simpson([d](double r) { return std::pow(r, d - 1); }, 0.0, 1.0);
    CHECK(d * unit_ball_volume(d) * integral == doctest::Approx(unit_ball_volume(d)).epsilon(1e-12));
  }
}

TEST_CASE("profile evaluation") {
  const NormalizedKernel eta(triangular_profile(KernelKind::density), 1);
  CHECK(eval_eta_delta(eta, vec({0.0, 0.0}), 0.4) == 1.0);
  CHECK(eval_eta_delta(eta, vec({0.2, 0.0}), 0.4) == doctest::Approx(0.5));
  CHECK(eval_eta_delta(eta, vec({0.0, 0.8}), 0.4) == 0.0);
  CHECK(eta.profile()(-0.25) == eta.profile()(0.25));
}

TEST_CASE("psi_r evaluation") {
  const NormalizedKernel phi(triangular_profile(KernelKind::covariance), 1);
  const double r = 0.3;
  CHECK(eval_psi_r(phi, vec({0.0, 0.0}), r).isZero(0.0));
  CHECK(eval_psi_r(phi, vec({r, 0.0}), r).isZero(0.0));
  const Matrix m = eval_psi_r(phi, vec({r / 2, 0.0}), r);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 0.5 * 0.25;
  CHECK((m - expected).norm() < 1e-15);
}

TEST_CASE("tabulated profiles") {
  const std::string path = "tabulated_profile_test.txt";
  {
    std::ofstream out(path);
    out << "0 1\n0.5 0.5\n1 0\n";
  }
  const auto tab = tabulated_profile(path, KernelKind::density);
  CHECK(tab(0.25) == doctest::Approx(0.75));
  CHECK(normalization_eta(tab, 2) == doctest::Approx(pi / 3.0).epsilon(1e-10));
  CHECK(profile_by_name("custom:" + path, KernelKind::density)(0.5) == doctest::Approx(0.5));
  std::remove(path.c_str());
  CHECK_THROWS(profile_by_name("custom:does_not_exist.txt", KernelKind::density));
  CHECK_THROWS_AS(profile_by_name("gaussian", KernelKind::density), ArgumentError);
}

TEST_CASE("Phi truncation values") {
  const double tau = 0.2;
  CHECK(phi_truncation(tau / 4, tau) == 0.0);
  CHECK(phi_truncation(2 * tau, tau) == doctest::Approx(1.0 / (2 * tau)));
  CHECK(phi_truncation(0.75 * tau, tau) == doctest::Approx(2.0 / (3.0 * tau)));
  CHECK(phi_truncation(0.0, tau) == 0.0);
}

TEST_CASE("Phi is bounded by 1/tau and Lipschitz with constant 4/tau^2") {
  for (double tau : {1.0, 0.3, 0.05, 0.007}) {
    double max_value = 0.0, max_slope = 0.0;
    const int steps = 200000;
    const double top = 4.0 * tau, dt = top / steps;
    double prev = phi_truncation(0.0, tau);
    for (int k = 1; k <= steps; ++k) {
      const double cur = phi_truncation(k * dt, tau);
      max_value = std::max(max_value, std::abs(cur));
      max_slope = std::max(max_slope, std::abs(cur - prev) / dt);
      prev = cur;
    }
    CHECK(max_value <= 1.0 / tau + 1e-12);
    CHECK(max_slope <= 4.0 / (tau * tau) + 1e-6);
  }
}
