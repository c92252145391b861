// Shape catalog: piecewise curves (circle, segment, stadium, square boundary,
// cross, Weierstrass-primitive graph) and two surfaces (sphere, flat disk).

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <varinf/errors.hpp>
#include <varinf/geometry.hpp>

namespace varinf {

namespace {

using std::numbers::pi;
constexpr double kSingularTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

Point vec2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

Point vec3(double x, double y, double z) {
  Point p(3);
  p << x, y, z;
  return p;
}

double smooth_integral(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  static boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(f, a, b, 1e-13);
}

std::size_t cell_count(double extent, double h) {
  return static_cast<std::size_t>(std::max(1.0, std::ceil(extent / h - 1e-9)));
}

// ---------------------------------------------------------------------------
// Curve pieces. Each piece is parametrized on [0, T].

class CurvePiece {
 public:
  virtual ~CurvePiece() = default;
  virtual double param_length() const = 0;
  virtual Point point(double t) const = 0;
  virtual Point unit_tangent(double t) const = 0;
  virtual double speed(double t) const = 0;
  virtual double max_speed() const = 0;
  virtual bool unit_speed() const { return true; }
  virtual double arc_length(double t0, double t1) const { return t1 - t0; }
  virtual double closest_param(const Point& x) const = 0;
  virtual std::vector<double> level_crossings(double c) const = 0;

  double length() const { return arc_length(0.0, param_length()); }

  double integrate(const std::function<double(const Point&)>& g, double level) const {
    std::vector<double> cuts{0.0, param_length()};
    for (double t : level_crossings(level))
      if (t > 0.0 && t < param_length()) cuts.push_back(t);
    std::sort(cuts.begin(), cuts.end());
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += integrate_range(g, cuts[i], cuts[i + 1]);
    return sum;
  }

 protected:
  virtual double integrate_range(const std::function<double(const Point&)>& g, double a, double b) const {
    return smooth_integral([&](double t) { return g(point(t)) * speed(t); }, a, b);
  }
};

class LinePiece final : public CurvePiece {
 public:
  LinePiece(Point from, Point to) : from_(std::move(from)), dir_(to - from_), length_(dir_.norm()) {
    dir_ /= length_;
  }
  double param_length() const override { return length_; }
  Point point(double t) const override { return from_ + t * dir_; }
  Point unit_tangent(double) const override { return dir_; }
  double speed(double) const override { return 1.0; }
  double max_speed() const override { return 1.0; }
  double closest_param(const Point& x) const override { return std::clamp((x - from_).dot(dir_), 0.0, length_); }
  std::vector<double> level_crossings(double c) const override {
    if (std::abs(dir_[0]) < 1e-15) return {};
    const double t = (c - from_[0]) / dir_[0];
    if (t < 0.0 || t > length_) return {};
    return {t};
  }

 private:
  Point from_;
  Point dir_;
  double length_;
};

// Arc of a circle in the plane; `sweep` is signed (positive = counter-clockwise).
class ArcPiece final : public CurvePiece {
 public:
  ArcPiece(Point center, double radius, double start_angle, double sweep)
      : center_(std::move(center)), radius_(radius), start_(start_angle), sweep_(sweep) {}
  double param_length() const override { return radius_ * std::abs(sweep_); }
  Point point(double t) const override {
    const double angle = angle_at(t);
    return center_ + radius_ * vec2(std::cos(angle), std::sin(angle));
  }
  Point unit_tangent(double t) const override {
    const double angle = angle_at(t);
    return vec2(-std::sin(angle), std::cos(angle)) * (sweep_ > 0 ? 1.0 : -1.0);
  }
  double speed(double) const override { return 1.0; }
  double max_speed() const override { return 1.0; }
  double closest_param(const Point& x) const override {
    const Point rel = x - center_;
    const double sign = sweep_ > 0 ? 1.0 : -1.0;
    double offset = std::fmod(sign * (std::atan2(rel[1], rel[0]) - start_), 2.0 * pi);
    if (offset < 0.0) offset += 2.0 * pi;
    if (offset <= std::abs(sweep_)) return radius_ * offset;
    const double to_end = offset - std::abs(sweep_);
    const double to_start = 2.0 * pi - offset;
    return to_start < to_end ? 0.0 : param_length();
  }
  std::vector<double> level_crossings(double c) const override {
    const double ratio = (c - center_[0]) / radius_;
    if (std::abs(ratio) > 1.0) return {};
    const double base = std::acos(ratio);
    std::vector<double> out;
    for (double angle : {base, -base}) {
      const double sign = sweep_ > 0 ? 1.0 : -1.0;
      double offset = std::fmod(sign * (angle - start_), 2.0 * pi);
      if (offset < 0.0) offset += 2.0 * pi;
      if (offset <= std::abs(sweep_)) out.push_back(radius_ * offset);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double a, double b) { return std::abs(a - b) < 1e-14; }),
              out.end());
    return out;
  }

 private:
  double angle_at(double t) const { return start_ + (sweep_ > 0 ? 1.0 : -1.0) * t / radius_; }

  Point center_;
  double radius_;
  double start_;
  double sweep_;
};

// Graph of F(x) = sum_{j<J} s^j sin(t^j x) / t^j over x in [0, 1].
class WeierstrassGraphPiece final : public CurvePiece {
 public:
  WeierstrassGraphPiece(double s, double t, int terms) : s_(s), t_(t), terms_(terms) {
    double bound = 0.0;
    double amp = 1.0;
    for (int j = 0; j < terms_; ++j, amp *= s_) bound += amp;
    max_speed_ = std::sqrt(1.0 + bound * bound);
    const double top_frequency = std::pow(t_, terms_ - 1);
    panel_ = std::min(1.0 / 64.0, 2.0 / top_frequency);
  }
  double param_length() const override { return 1.0; }
  double primitive(double x) const {
    double sum = 0.0, amp = 1.0, freq = 1.0;
    for (int j = 0; j < terms_; ++j, amp *= s_, freq *= t_) sum += amp * std::sin(freq * x) / freq;
    return sum;
  }
  double derivative(double x) const {
    double sum = 0.0, amp = 1.0, freq = 1.0;
    for (int j = 0; j < terms_; ++j, amp *= s_, freq *= t_) sum += amp * std::cos(freq * x);
    return sum;
  }
  Point point(double x) const override { return vec2(x, primitive(x)); }
  Point unit_tangent(double x) const override { return vec2(1.0, derivative(x)) / speed(x); }
  double speed(double x) const override {
    const double f = derivative(x);
    return std::sqrt(1.0 + f * f);
  }
  double max_speed() const override { return max_speed_; }
  bool unit_speed() const override { return false; }
  double arc_length(double a, double b) const override {
    return integrate_range([](const Point&) { return 1.0; }, a, b);
  }
  double closest_param(const Point& x) const override { return std::clamp(x[0], 0.0, 1.0); }
  std::vector<double> level_crossings(double c) const override {
    if (c < 0.0 || c > 1.0) return {};
    return {c};
  }

 protected:
  // composite 8-point Gauss-Legendre on panels resolving the top frequency
  double integrate_range(const std::function<double(const Point&)>& g, double a, double b) const override {
    if (!(b > a)) return 0.0;
    const auto panels = cell_count(b - a, panel_);
    const double width = (b - a) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t k = 0; k < panels; ++k) {
      const double lo = a + width * static_cast<double>(k);
      sum += boost::math::quadrature::gauss<double, 8>::integrate(
          [&](double x) { return g(point(x)) * speed(x); }, lo, lo + width);
    }
    return sum;
  }

 private:
  double s_, t_;
  int terms_;
  double max_speed_;
  double panel_;
};

// ---------------------------------------------------------------------------

struct CurveSpec {
  std::string name;
  std::vector<std::unique_ptr<CurvePiece>> pieces;
  std::vector<Point> singular_points;
  double ahlfors = 1.0;
  double diameter = 1.0;
  double holder_a = 1.0;
  Point anchor;
  double x1_extent = 1.0;
  double jump_level = 0.0;
};

class PiecewiseCurve final : public Geometry {
 public:
  explicit PiecewiseCurve(CurveSpec spec) : spec_(std::move(spec)) {
    for (const auto& piece : spec_.pieces) {
      lengths_.push_back(piece->length());
      for (double t : piece->level_crossings(spec_.jump_level)) {
        Point p = piece->point(t);
        const bool seen = std::any_of(jump_points_.begin(), jump_points_.end(),
                                      [&](const Point& q) { return (q - p).norm() < 1e-12; });
        if (!seen) jump_points_.push_back(std::move(p));
      }
    }
    total_length_ = std::accumulate(lengths_.begin(), lengths_.end(), 0.0);
  }

  std::string name() const override { return spec_.name; }
  int ambient_dim() const override { return 2; }
  int intrinsic_dim() const override { return 1; }
  double hausdorff_mass() const override { return total_length_; }
  double diameter() const override { return spec_.diameter; }
  double ahlfors_constant() const override { return spec_.ahlfors; }
  double holder_exponent() const override { return spec_.holder_a; }
  Point anchor() const override { return spec_.anchor; }
  double x1_extent() const override { return spec_.x1_extent; }
  double jump_level() const override { return spec_.jump_level; }

  double distance_to_jump_set(const Point& x) const override { return nearest(jump_points_, x); }
  SingularStratum jump_stratum() const override {
    return {0, static_cast<double>(jump_points_.size()), "density jump points"};
  }

  std::vector<SingularStratum> singular_strata() const override {
    if (spec_.singular_points.empty()) return {};
    return {{0, static_cast<double>(spec_.singular_points.size()), "singular points"}};
  }
  double singular_distance(const Point& x) const override { return nearest(spec_.singular_points, x); }

  Matrix tangent(const Point& x) const override {
    if (singular_distance(x) <= kSingularTol) throw SingularPointError(spec_.name + ": tangent requested at a singular point");
    double best = kInf;
    Point dir;
    for (const auto& piece : spec_.pieces) {
      const double t = piece->closest_param(x);
      const double dist = (piece->point(t) - x).norm();
      if (dist < best) {
        best = dist;
        dir = piece->unit_tangent(t);
      }
    }
    return dir * dir.transpose();
  }

  DiscreteVarifold quadrature(double h) const override {
    std::vector<Point> points;
    std::vector<double> weights;
    std::vector<Matrix> matrices;
    for (const auto& piece : spec_.pieces) {
      const double span = piece->param_length();
      const auto cells = cell_count(span * piece->max_speed(), h);
      const double step = span / static_cast<double>(cells);
      for (std::size_t k = 0; k < cells; ++k) {
        const double lo = step * static_cast<double>(k);
        const double mid = lo + 0.5 * step;
        points.push_back(piece->point(mid));
        weights.push_back(piece->unit_speed() ? step : piece->arc_length(lo, lo + step));
        const Point u = piece->unit_tangent(mid);
        matrices.push_back(u * u.transpose());
      }
    }
    DiscreteVarifold out;
    out.points.resize(2, static_cast<Eigen::Index>(points.size()));
    out.weights.resize(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      out.points.col(static_cast<Eigen::Index>(i)) = points[i];
      out.weights[static_cast<Eigen::Index>(i)] = weights[i];
    }
    out.matrices = std::move(matrices);
    out.projector = true;
    out.rank = 1;
    return out;
  }

  std::optional<Point> try_draw(Philox& rng) const override {
    double u = rng.uniform() * total_length_;
    std::size_t k = 0;
    while (k + 1 < lengths_.size() && u >= lengths_[k]) u -= lengths_[k++];
    const auto& piece = *spec_.pieces[k];
    if (piece.unit_speed()) return piece.point(std::min(u, piece.param_length()));
    const double t = rng.uniform() * piece.param_length();
    if (rng.uniform() * piece.max_speed() >= piece.speed(t)) return std::nullopt;
    return piece.point(t);
  }

  double integrate(const std::function<double(const Point&)>& g) const override {
    double sum = 0.0;
    for (const auto& piece : spec_.pieces) sum += piece->integrate(g, spec_.jump_level);
    return sum;
  }

 private:
  static double nearest(const std::vector<Point>& set, const Point& x) {
    double best = kInf;
    for (const auto& p : set) best = std::min(best, (p - x).norm());
    return best;
  }

  CurveSpec spec_;
  std::vector<double> lengths_;
  double total_length_ = 0.0;
  std::vector<Point> jump_points_;
};

// ---------------------------------------------------------------------------

// Round sphere in R^3 centred at the origin.
class Sphere final : public Geometry {
 public:
  explicit Sphere(double radius) : radius_(radius) {}
  std::string name() const override { return "sphere"; }
  int ambient_dim() const override { return 3; }
  int intrinsic_dim() const override { return 2; }
  double hausdorff_mass() const override { return 4.0 * pi * radius_ * radius_; }
  double diameter() const override { return 2.0 * radius_; }
  // mass of B(x, r) is exactly pi r^2 for r <= 2R (Archimedes)
  double ahlfors_constant() const override { return pi; }
  Point anchor() const override { return vec3(0.0, 0.0, radius_); }
  double x1_extent() const override { return radius_; }
  double jump_level() const override { return 0.0; }
  double distance_to_jump_set(const Point& x) const override {
    return std::hypot(x[0], std::hypot(x[1], x[2]) - radius_);
  }
  SingularStratum jump_stratum() const override { return {1, 2.0 * pi * radius_, "density jump circle"}; }
  std::vector<SingularStratum> singular_strata() const override { return {}; }
  double singular_distance(const Point&) const override { return kInf; }

  Matrix tangent(const Point& x) const override {
    const Point normal = x.normalized();
    return Matrix::Identity(3, 3) - normal * normal.transpose();
  }

  DiscreteVarifold quadrature(double h) const override {
    const double side = h / std::sqrt(2.0);
    const auto bands = cell_count(pi * radius_, side);
    const double dpolar = pi / static_cast<double>(bands);
    std::vector<Point> points;
    std::vector<double> weights;
    for (std::size_t b = 0; b < bands; ++b) {
      const double lo = dpolar * static_cast<double>(b);
      const double hi = lo + dpolar;
      const double widest = (lo <= pi / 2 && hi >= pi / 2) ? 1.0 : std::max(std::sin(lo), std::sin(hi));
      const auto sectors = cell_count(2.0 * pi * radius_ * widest, side);
      const double dazimuth = 2.0 * pi / static_cast<double>(sectors);
      const double area = radius_ * radius_ * (std::cos(lo) - std::cos(hi)) * dazimuth;
      const double polar = 0.5 * (lo + hi);
      for (std::size_t s = 0; s < sectors; ++s) {
        const double azimuth = dazimuth * (static_cast<double>(s) + 0.5);
        points.push_back(radius_ * vec3(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                                        std::cos(polar)));
        weights.push_back(area);
      }
    }
    return assemble(points, weights);
  }

  std::optional<Point> try_draw(Philox& rng) const override {
    const double z = 2.0 * rng.uniform() - 1.0;
    const double azimuth = 2.0 * pi * rng.uniform();
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    return radius_ * vec3(rho * std::cos(azimuth), rho * std::sin(azimuth), z);
  }

  double integrate(const std::function<double(const Point&)>& g) const override {
    auto ring = [&](double polar) {
      const double sp = std::sin(polar), cp = std::cos(polar);
      auto f = [&](double azimuth) {
        return g(radius_ * vec3(sp * std::cos(azimuth), sp * std::sin(azimuth), cp));
      };
      return smooth_integral(f, 0.0, pi / 2) + smooth_integral(f, pi / 2, 3 * pi / 2) +
             smooth_integral(f, 3 * pi / 2, 2 * pi);
    };
    return radius_ * radius_ * smooth_integral([&](double polar) { return ring(polar) * std::sin(polar); }, 0.0, pi);
  }

 private:
  DiscreteVarifold assemble(const std::vector<Point>& points, const std::vector<double>& weights) const {
    DiscreteVarifold out;
    out.points.resize(3, static_cast<Eigen::Index>(points.size()));
    out.weights.resize(static_cast<Eigen::Index>(points.size()));
    out.matrices.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      out.points.col(static_cast<Eigen::Index>(i)) = points[i];
      out.weights[static_cast<Eigen::Index>(i)] = weights[i];
      out.matrices.push_back(tangent(points[i]));
    }
    out.projector = true;
    out.rank = 2;
    return out;
  }

  double radius_;
};

// Flat closed disk {x_3 = 0, |x| <= R} in R^3; its boundary circle is a 1-dimensional stratum.
class FlatDisk final : public Geometry {
 public:
  explicit FlatDisk(double radius) : radius_(radius) {}
  std::string name() const override { return "disk"; }
  int ambient_dim() const override { return 3; }
  int intrinsic_dim() const override { return 2; }
  double hausdorff_mass() const override { return pi * radius_ * radius_; }
  double diameter() const override { return 2.0 * radius_; }
  double ahlfors_constant() const override { return 4.0; }
  Point anchor() const override { return vec3(0.0, 0.0, 0.0); }
  double x1_extent() const override { return radius_; }
  double jump_level() const override { return 0.0; }
  double distance_to_jump_set(const Point& x) const override {
    const double y = std::clamp(x[1], -radius_, radius_);
    return std::sqrt(x[0] * x[0] + (x[1] - y) * (x[1] - y) + x[2] * x[2]);
  }
  SingularStratum jump_stratum() const override { return {1, 2.0 * radius_, "density jump segment"}; }
  std::vector<SingularStratum> singular_strata() const override {
    return {{1, 2.0 * pi * radius_, "boundary circle"}};
  }
  double singular_distance(const Point& x) const override {
    return std::hypot(x[2], std::hypot(x[0], x[1]) - radius_);
  }

  Matrix tangent(const Point& x) const override {
    if (singular_distance(x) <= kSingularTol) throw SingularPointError("disk: tangent requested on the boundary");
    Matrix p = Matrix::Zero(3, 3);
    p(0, 0) = p(1, 1) = 1.0;
    return p;
  }

  DiscreteVarifold quadrature(double h) const override {
    const double side = h / std::sqrt(2.0);
    const auto rings = cell_count(radius_, side);
    const double dr = radius_ / static_cast<double>(rings);
    DiscreteVarifold out;
    std::vector<Point> points;
    std::vector<double> weights;
    for (std::size_t k = 0; k < rings; ++k) {
      const double lo = dr * static_cast<double>(k);
      const double hi = lo + dr;
      const auto sectors = cell_count(2.0 * pi * hi, side);
      const double dphi = 2.0 * pi / static_cast<double>(sectors);
      const double area = 0.5 * (hi * hi - lo * lo) * dphi;
      const double rho = 0.5 * (lo + hi);
      for (std::size_t s = 0; s < sectors; ++s) {
        const double phi = dphi * (static_cast<double>(s) + 0.5);
        points.push_back(vec3(rho * std::cos(phi), rho * std::sin(phi), 0.0));
        weights.push_back(area);
      }
    }
    out.points.resize(3, static_cast<Eigen::Index>(points.size()));
    out.weights.resize(static_cast<Eigen::Index>(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
      out.points.col(static_cast<Eigen::Index>(i)) = points[i];
      out.weights[static_cast<Eigen::Index>(i)] = weights[i];
      out.matrices.push_back(tangent(points[i]));
    }
    out.projector = true;
    out.rank = 2;
    return out;
  }

  std::optional<Point> try_draw(Philox& rng) const override {
    const double rho = radius_ * std::sqrt(rng.uniform());
    const double phi = 2.0 * pi * rng.uniform();
    return vec3(rho * std::cos(phi), rho * std::sin(phi), 0.0);
  }

  double integrate(const std::function<double(const Point&)>& g) const override {
    auto ring = [&](double rho) {
      auto f = [&](double phi) { return g(vec3(rho * std::cos(phi), rho * std::sin(phi), 0.0)); };
      return smooth_integral(f, 0.0, pi / 2) + smooth_integral(f, pi / 2, 3 * pi / 2) +
             smooth_integral(f, 3 * pi / 2, 2 * pi);
    };
    return smooth_integral([&](double rho) { return ring(rho) * rho; }, 0.0, radius_);
  }

 private:
  double radius_;
};

}  // namespace

std::shared_ptr<const Geometry> make_circle(double radius) {
  if (!(radius > 0)) throw ArgumentError("circle radius must be positive");
  CurveSpec spec;
  spec.name = "circle";
  spec.pieces.push_back(std::make_unique<ArcPiece>(vec2(0, 0), radius, 0.0, 2.0 * pi));
  spec.ahlfors = pi;
  spec.diameter = 2.0 * radius;
  spec.anchor = vec2(radius, 0.0);
  spec.x1_extent = radius;
  spec.jump_level = 0.0;
  return std::make_shared<PiecewiseCurve>(std::move(spec));
}

std::shared_ptr<const Geometry> make_sphere(double radius) {
  if (!(radius > 0)) throw ArgumentError("sphere radius must be positive");
  return std::make_shared<Sphere>(radius);
}

std::shared_ptr<const Geometry> make_segment(double length) {
  if (!(length > 0)) throw ArgumentError("segment length must be positive");
  CurveSpec spec;
  spec.name = "segment";
  spec.pieces.push_back(std::make_unique<LinePiece>(vec2(0, 0), vec2(length, 0)));
  spec.singular_points = {vec2(0, 0), vec2(length, 0)};
  spec.ahlfors = 2.0;
  spec.diameter = length;
  spec.anchor = vec2(0, 0);
  spec.x1_extent = length;
  spec.jump_level = 0.5 * length;
  return std::make_shared<PiecewiseCurve>(std::move(spec));
}

std::shared_ptr<const Geometry> make_stadium(double radius, double length) {
  if (!(radius > 0) || !(length > 0)) throw ArgumentError("stadium radius and length must be positive");
  const double half = 0.5 * length;
  CurveSpec spec;
  spec.name = "stadium";
  spec.pieces.push_back(std::make_unique<LinePiece>(vec2(half, radius), vec2(-half, radius)));
  spec.pieces.push_back(std::make_unique<ArcPiece>(vec2(-half, 0), radius, pi / 2, pi));
  spec.pieces.push_back(std::make_unique<LinePiece>(vec2(-half, -radius), vec2(half, -radius)));
  spec.pieces.push_back(std::make_unique<ArcPiece>(vec2(half, 0), radius, -pi / 2, pi));
  spec.singular_points = {vec2(half, radius), vec2(-half, radius), vec2(-half, -radius), vec2(half, -radius)};
  spec.ahlfors = pi + length / std::min(radius, length);
  spec.diameter = length + 2.0 * radius;
  spec.anchor = vec2(half, radius);
  spec.x1_extent = half + radius;
  spec.jump_level = 0.0;
  return std::make_shared<PiecewiseCurve>(std::move(spec));
}

std::shared_ptr<const Geometry> make_square_boundary(double side) {
  if (!(side > 0)) throw ArgumentError("square side must be positive");
  const double h = 0.5 * side;
  const std::vector<Point> corners = {vec2(h, h), vec2(-h, h), vec2(-h, -h), vec2(h, -h)};
  CurveSpec spec;
  spec.name = "square";
  for (std::size_t k = 0; k < 4; ++k)
    spec.pieces.push_back(std::make_unique<LinePiece>(corners[k], corners[(k + 1) % 4]));
  spec.singular_points = corners;
  spec.ahlfors = 4.0;
  spec.diameter = side * std::sqrt(2.0);
  spec.anchor = corners[0];
  spec.x1_extent = h;
  spec.jump_level = 0.0;
  return std::make_shared<PiecewiseCurve>(std::move(spec));
}

std::shared_ptr<const Geometry> make_cross_segments(double arm) {
  if (!(arm > 0)) throw ArgumentError("cross arm length must be positive");
  CurveSpec spec;
  spec.name = "cross";
  const std::vector<Point> tips = {vec2(arm, 0), vec2(0, arm), vec2(-arm, 0), vec2(0, -arm)};
  for (const auto& tip : tips) spec.pieces.push_back(std::make_unique<LinePiece>(vec2(0, 0), tip));
  spec.singular_points = {vec2(0, 0)};
  spec.singular_points.insert(spec.singular_points.end(), tips.begin(), tips.end());
  spec.ahlfors = 4.0;
  spec.diameter = 2.0 * arm;
  spec.anchor = vec2(0, 0);
  spec.x1_extent = arm;
  // off the vertical arm, so the jump set is a single point
  spec.jump_level = 0.5 * arm;
  return std::make_shared<PiecewiseCurve>(std::move(spec));
}

std::shared_ptr<const Geometry> make_flat_disk(double radius) {
  if (!(radius > 0)) throw ArgumentError("disk radius must be positive");
  return std::make_shared<FlatDisk>(radius);
}

std::shared_ptr<const Geometry> make_holder_graph(double s, double t, int terms) {
  if (!(s > 0 && s < 1) || !(t > 1) || terms < 1) throw ArgumentError("weier: need 0 < s < 1, t > 1, J >= 1");
  auto piece = std::make_unique<WeierstrassGraphPiece>(s, t, terms);
  double lo = kInf, hi = -kInf;
  for (int k = 0; k <= 4096; ++k) {
    const double y = piece->primitive(k / 4096.0);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  CurveSpec spec;
  spec.name = "weier";
  spec.singular_points = {piece->point(0.0), piece->point(1.0)};
  spec.ahlfors = 2.0 * piece->max_speed();
  spec.diameter = std::hypot(1.0, hi - lo);
  spec.holder_a = std::min(1.0, -std::log(s) / std::log(t));
  spec.anchor = piece->point(0.0);
  spec.x1_extent = 1.0;
  spec.jump_level = 0.5;
  spec.pieces.push_back(std::move(piece));
  return std::make_shared<PiecewiseCurve>(std::move(spec));
}

}  // namespace varinf
