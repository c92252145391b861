#include <varinf/kernels.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <varinf/errors.hpp>

namespace varinf {

KernelProfile::KernelProfile(std::string name, KernelKind kind, std::function<double(double)> on_unit,
                             double sup_bound, double lip_bound, double positivity_floor,
                             std::optional<std::vector<double>> polynomial)
    : name_(std::move(name)),
      kind_(kind),
      on_unit_(std::move(on_unit)),
      sup_bound_(sup_bound),
      lip_bound_(lip_bound),
      positivity_floor_(positivity_floor),
      polynomial_(std::move(polynomial)) {
  if (kind_ == KernelKind::density && !(positivity_floor_ > 0.0))
    throw InvalidKernelError("density profile '" + name_ + "' must be positive on [0, 1/2]");
}

KernelProfile KernelProfile::without_polynomial() const {
  KernelProfile copy = *this;
  copy.polynomial_.reset();
  return copy;
}

KernelProfile triangular_profile(KernelKind kind) {
  return KernelProfile("triangular", kind, [](double t) { return 1.0 - t; }, 1.0, 1.0, 0.5,
                       std::vector<double>{1.0, -1.0});
}

KernelProfile epanechnikov_profile(KernelKind kind) {
  return KernelProfile("epanechnikov", kind, [](double t) { return 1.0 - t * t; }, 1.0, 2.0, 0.75,
                       std::vector<double>{1.0, 0.0, -1.0});
}

KernelProfile tabulated_profile(const std::string& path, KernelKind kind) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open kernel table '" + path + "'");
  std::vector<std::pair<double, double>> table;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double t, v;
    if (row >> t >> v) table.emplace_back(t, v);
  }
  std::sort(table.begin(), table.end());
  if (table.size() < 2 || table.front().first != 0.0 || table.back().first != 1.0)
    throw InvalidKernelError("kernel table must cover [0, 1] with at least two rows");
  if (table.back().second != 0.0) throw InvalidKernelError("kernel table must vanish at t = 1");

  double sup = 0.0, lip = 0.0, floor = INFINITY;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].second < 0.0) throw InvalidKernelError("kernel table has negative values");
    sup = std::max(sup, table[i].second);
    if (table[i].first <= 0.5) floor = std::min(floor, table[i].second);
    if (i + 1 < table.size()) {
      const double dt = table[i + 1].first - table[i].first;
      if (dt <= 0.0) throw InvalidKernelError("kernel table has repeated abscissae");
      lip = std::max(lip, std::abs(table[i + 1].second - table[i].second) / dt);
      // the linear piece through t = 1/2 can dip below both tabulated neighbours only at its ends
      if (table[i].first < 0.5 && table[i + 1].first > 0.5) floor = std::min(floor, table[i + 1].second);
    }
  }
  auto eval = [table](double t) {
    auto it = std::upper_bound(table.begin(), table.end(), t,
                               [](double x, const std::pair<double, double>& p) { return x < p.first; });
    if (it == table.end()) return 0.0;
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (t - lo.first) / (hi.first - lo.first);
    return (1.0 - w) * lo.second + w * hi.second;
  };
  return KernelProfile("custom:" + path, kind, eval, sup, lip, kind == KernelKind::density ? floor : std::max(floor, 0.0));
}

KernelProfile profile_by_name(const std::string& name, KernelKind kind) {
  if (name == "triangular") return triangular_profile(kind);
  if (name == "epanechnikov") return epanechnikov_profile(kind);
  if (name.rfind("custom:", 0) == 0) return tabulated_profile(name.substr(7), kind);
  throw ArgumentError("unknown kernel profile '" + name + "'");
}

double unit_ball_volume(int d) {
  using std::numbers::pi;
  // omega_d = pi^{d/2} / Gamma(d/2 + 1)
  static const std::array<double, 17> table = {
      1.0,
      2.0,
      pi,
      4.0 * pi / 3.0,
      pi * pi / 2.0,
      8.0 * pi * pi / 15.0,
      pi * pi * pi / 6.0,
      16.0 * pi * pi * pi / 105.0,
      pi * pi * pi * pi / 24.0,
      32.0 * pi * pi * pi * pi / 945.0,
      pi * pi * pi * pi * pi / 120.0,
      64.0 * pi * pi * pi * pi * pi / 10395.0,
      pi * pi * pi * pi * pi * pi / 720.0,
      128.0 * pi * pi * pi * pi * pi * pi / 135135.0,
      pi * pi * pi * pi * pi * pi * pi / 5040.0,
      256.0 * pi * pi * pi * pi * pi * pi * pi / 2027025.0,
      pi * pi * pi * pi * pi * pi * pi * pi / 40320.0,
  };
  if (d < 1 || d > 16) throw ArgumentError("unit_ball_volume: dimension must lie in [1, 16]");
  return table[static_cast<std::size_t>(d)];
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// integral over [0, 1] of p(t) t^power for p given by coefficients in t
double polynomial_moment(const std::vector<double>& coeffs, int power) {
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) sum += coeffs[k] / static_cast<double>(k + power + 1);
  return sum;
}

double unit_moment(const KernelProfile& profile, int power) {
  if (profile.polynomial()) return polynomial_moment(*profile.polynomial(), power);
  // a few fixed panels keep the recursion away from kinks of tabulated profiles
  double sum = 0.0;
  constexpr int panels = 16;
  for (int i = 0; i < panels; ++i) {
    const double a = static_cast<double>(i) / panels;
    const double b = static_cast<double>(i + 1) / panels;
    sum += adaptive_simpson([&](double t) { return profile(t) * std::pow(t, power); }, a, b, 1e-12 / panels);
  }
  return sum;
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

double normalization_eta(const KernelProfile& profile, int d) {
  if (profile.kind() != KernelKind::density)
    throw ArgumentError("normalization_eta expects a density profile");
  const double value = d * unit_ball_volume(d) * unit_moment(profile, d - 1);
  if (!(value > 0.0)) throw InvalidKernelError("degenerate density profile '" + profile.name() + "'");
  return value;
}

double normalization_phi(const KernelProfile& profile, int d) {
  if (profile.kind() != KernelKind::covariance)
    throw ArgumentError("normalization_phi expects a covariance profile");
  const double value = unit_ball_volume(d) * unit_moment(profile, d + 1);
  if (!(value > 0.0)) throw InvalidKernelError("degenerate covariance profile '" + profile.name() + "'");
  return value;
}

NormalizedKernel::NormalizedKernel(KernelProfile profile, int d)
    : profile_(std::move(profile)),
      d_(d),
      constant_(profile_.kind() == KernelKind::density ? normalization_eta(profile_, d)
                                                       : normalization_phi(profile_, d)) {}

double eval_eta_delta(const NormalizedKernel& kernel, const Point& z, double delta) {
  return kernel.profile()(z.norm() / delta);
}

Matrix eval_psi_r(const NormalizedKernel& kernel, const Point& z, double r) {
  const Point scaled = z / r;
  const double weight = kernel.profile()(scaled.norm());
  if (weight == 0.0) return Matrix::Zero(z.size(), z.size());
  return weight * scaled * scaled.transpose();
}

}  // namespace varinf
