#include <varinf/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include <varinf/errors.hpp>

namespace varinf {

namespace {

// "name:key=value,key=value" -> (name, {key: value})
std::pair<std::string, std::map<std::string, double>> parse_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  std::map<std::string, double> params;
  if (colon == std::string::npos) return {name, params};
  std::stringstream rest(spec.substr(colon + 1));
  std::string item;
  while (std::getline(rest, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ArgumentError("malformed parameter '" + item + "' in '" + spec + "'");
    try {
      params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw ArgumentError("non-numeric parameter '" + item + "' in '" + spec + "'");
    }
  }
  return {name, params};
}

double take(std::map<std::string, double>& params, const std::string& key, double fallback) {
  auto it = params.find(key);
  if (it == params.end()) return fallback;
  const double v = it->second;
  params.erase(it);
  return v;
}

void reject_leftovers(const std::map<std::string, double>& params, const std::string& spec) {
  if (!params.empty()) throw ArgumentError("unknown parameter '" + params.begin()->first + "' in '" + spec + "'");
}

}  // namespace

ShapeModel::ShapeModel(std::shared_ptr<const Geometry> geometry, DensitySpec density)
    : geometry_(std::move(geometry)), density_(density) {
  if (!geometry_) throw ArgumentError("ShapeModel needs a geometry");
  double g_min = 1.0;
  double b = 1.0;
  switch (density_.kind) {
    case DensityKind::uniform:
      g_max_ = 1.0;
      break;
    case DensityKind::tilt:
      g_max_ = 3.0;
      break;
    case DensityKind::holder_bump:
      if (!(density_.holder_b > 0.0 && density_.holder_b <= 1.0))
        throw ArgumentError("bump exponent b must lie in (0, 1]");
      g_max_ = 1.0 + std::pow(geometry_->diameter(), density_.holder_b);
      b = density_.holder_b;
      break;
    case DensityKind::jump:
      g_max_ = 2.0;
      break;
  }
  normalizer_ = geometry_->integrate([this](const Point& x) { return unnormalized(x); });

  regularity_.a = geometry_->holder_exponent();
  regularity_.b = b;
  regularity_.theta_min = g_min / normalizer_;
  regularity_.theta_max = g_max_ / normalizer_;
  regularity_.ahlfors_c0 =
      geometry_->ahlfors_constant() * std::max(1.0 / regularity_.theta_min, regularity_.theta_max);
  regularity_.singular_strata = geometry_->singular_strata();
  if (density_.kind == DensityKind::jump) regularity_.singular_strata.push_back(geometry_->jump_stratum());
}

std::string ShapeModel::id() const { return geometry_->name() + "/" + density_name(density_); }

double ShapeModel::unnormalized(const Point& x) const {
  switch (density_.kind) {
    case DensityKind::uniform:
      return 1.0;
    case DensityKind::tilt:
      return 2.0 + x[0] / geometry_->x1_extent();
    case DensityKind::holder_bump:
      return 1.0 + std::pow((x - geometry_->anchor()).norm(), density_.holder_b);
    case DensityKind::jump:
      return x[0] >= geometry_->jump_level() ? 2.0 : 1.0;
  }
  return 1.0;
}

double ShapeModel::density_at(const Point& x) const { return unnormalized(x) / normalizer_; }

double ShapeModel::singular_distance(const Point& x) const {
  double dist = geometry_->singular_distance(x);
  if (density_.kind == DensityKind::jump) dist = std::min(dist, geometry_->distance_to_jump_set(x));
  return dist;
}

GroundTruthVarifold ShapeModel::quadrature_varifold(double h) const {
  if (!(h > 0.0) || h > geometry_->diameter() / 10.0)
    throw ArgumentError("quadrature resolution must lie in (0, diam/10]");
  return {geometry_->quadrature(h), h};
}

Point ShapeModel::draw(Philox& rng, std::uint64_t& trials, std::uint64_t budget) const {
  while (true) {
    if (++trials > budget) throw SamplerFailureError(id() + ": rejection budget exhausted");
    auto candidate = geometry_->try_draw(rng);
    if (!candidate) continue;
    if (density_.kind == DensityKind::uniform) return *candidate;
    if (rng.uniform() * g_max_ < unnormalized(*candidate)) return *candidate;
  }
}

std::shared_ptr<const Geometry> geometry_by_name(const std::string& spec) {
  auto [name, params] = parse_spec(spec);
  std::shared_ptr<const Geometry> out;
  if (name == "circle") {
    out = make_circle(take(params, "radius", 1.0));
  } else if (name == "sphere") {
    out = make_sphere(take(params, "radius", 1.0));
  } else if (name == "segment") {
    out = make_segment(take(params, "length", 1.0));
  } else if (name == "stadium") {
    const double radius = take(params, "radius", 1.0);
    out = make_stadium(radius, take(params, "length", 2.0));
  } else if (name == "square") {
    out = make_square_boundary(take(params, "side", 1.0));
  } else if (name == "cross") {
    out = make_cross_segments(take(params, "arm", 1.0));
  } else if (name == "disk") {
    out = make_flat_disk(take(params, "radius", 1.0));
  } else if (name == "weier") {
    const double s = take(params, "s", 0.3);
    const double t = take(params, "t", 4.0);
    out = make_holder_graph(s, t, static_cast<int>(take(params, "J", 8)));
  } else {
    throw ArgumentError("unknown shape '" + spec + "'");
  }
  reject_leftovers(params, spec);
  return out;
}

DensitySpec density_by_name(const std::string& spec) {
  auto [name, params] = parse_spec(spec);
  DensitySpec out;
  if (name == "uniform") {
    out.kind = DensityKind::uniform;
  } else if (name == "tilt") {
    out.kind = DensityKind::tilt;
  } else if (name == "bump") {
    out.kind = DensityKind::holder_bump;
    out.holder_b = take(params, "b", 0.5);
  } else if (name == "jump") {
    out.kind = DensityKind::jump;
  } else {
    throw ArgumentError("unknown density '" + spec + "'");
  }
  reject_leftovers(params, spec);
  return out;
}

std::string density_name(const DensitySpec& density) {
  switch (density.kind) {
    case DensityKind::uniform:
      return "uniform";
    case DensityKind::tilt:
      return "tilt";
    case DensityKind::holder_bump: {
      std::ostringstream os;
      os << "bump:b=" << density.holder_b;
      return os.str();
    }
    case DensityKind::jump:
      return "jump";
  }
  return "uniform";
}

double offset_mass(const ShapeModel& shape, const DiscreteVarifold& quadrature, double rho) {
  double mass = 0.0;
  for (std::size_t i = 0; i < quadrature.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (shape.singular_distance(quadrature.points.col(k)) < rho) mass += quadrature.weights[k];
  }
  return mass;
}

DiscreteMeasure flat_plane_quadrature(int d, int n, const Point& x, const Matrix& projector, double extent,
                                      double h) {
  if (d < 1 || d > n || x.size() != n || projector.rows() != n || projector.cols() != n)
    throw ArgumentError("flat_plane_quadrature: inconsistent dimensions");
  if (!(extent > 0.0) || !(h > 0.0)) throw ArgumentError("flat_plane_quadrature: extent and h must be positive");
  const Matrix frame = jacobi_eigen(projector).vectors.leftCols(d);

  const auto per_axis = static_cast<Eigen::Index>(std::ceil(2.0 * extent / h - 1e-9));
  const double step = 2.0 * extent / static_cast<double>(per_axis);
  Eigen::Index total = 1;
  for (int k = 0; k < d; ++k) total *= per_axis;

  DiscreteMeasure out;
  out.points.resize(n, total);
  out.weights = Eigen::VectorXd::Constant(total, std::pow(step, d));
  Eigen::VectorXd coords(d);
  for (Eigen::Index idx = 0; idx < total; ++idx) {
    Eigen::Index rest = idx;
    for (int k = 0; k < d; ++k) {
      coords[k] = -extent + step * (static_cast<double>(rest % per_axis) + 0.5);
      rest /= per_axis;
    }
    out.points.col(idx) = x + frame * coords;
  }
  return out;
}

}  // namespace varinf
