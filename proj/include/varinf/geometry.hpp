#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <varinf/linalg.hpp>
#include <varinf/measures.hpp>
#include <varinf/rng.hpp>

namespace varinf {

/// A lower-dimensional piece of the singular set: dimension l and its H^l mass.
struct SingularStratum {
  int dim = 0;
  double mass = 0.0;
  std::string label;
};

/// A compact d-rectifiable set S in R^n carrying the measure H^d restricted to S.
///
/// Every oracle is closed form. Implementations are immutable after construction.
class Geometry {
 public:
  virtual ~Geometry() = default;

  virtual std::string name() const = 0;
  virtual int ambient_dim() const = 0;
  virtual int intrinsic_dim() const = 0;
  /// H^d(S)
  virtual double hausdorff_mass() const = 0;
  virtual double diameter() const = 0;
  /// Ahlfors constant of H^d restricted to S.
  virtual double ahlfors_constant() const = 0;
  /// Holder exponent a of the tangent map away from the singular set.
  virtual double holder_exponent() const { return 1.0; }

  /// Reference point on S used by the Holder bump density.
  virtual Point anchor() const = 0;
  /// max |x_1| over S
  virtual double x1_extent() const = 0;
  /// Level c of the hyperplane {x_1 = c} across which the jump density is discontinuous.
  virtual double jump_level() const = 0;
  /// Distance to S intersected with {x_1 = jump_level()}.
  virtual double distance_to_jump_set(const Point& x) const = 0;
  virtual SingularStratum jump_stratum() const = 0;

  virtual std::vector<SingularStratum> singular_strata() const = 0;
  /// Distance to the geometric singular set; +infinity when it is empty.
  virtual double singular_distance(const Point& x) const = 0;

  /// Rank-d projector onto the tangent plane at x in S. Throws SingularPointError
  /// within 1e-12 of the geometric singular set.
  virtual Matrix tangent(const Point& x) const = 0;

  /// Cells of diameter <= h, exact H^d weights, centre representatives.
  /// Matrices are the tangent projectors at the representatives.
  virtual DiscreteVarifold quadrature(double h) const = 0;

  /// One attempt at an H^d-uniform draw; nullopt when an internal rejection step fails.
  virtual std::optional<Point> try_draw(Philox& rng) const = 0;

  /// int_S g dH^d. The domain is cut along the jump hyperplane and charts start at
  /// the anchor, so the catalog densities are smooth on every integration panel.
  virtual double integrate(const std::function<double(const Point&)>& g) const = 0;
};

enum class DensityKind { uniform, tilt, holder_bump, jump };

struct DensitySpec {
  DensityKind kind = DensityKind::uniform;
  double holder_b = 0.5;  // exponent of the bump density
};

/// Regularity metadata of mu = theta H^d|_S.
struct Regularity {
  double a = 1.0;
  double b = 1.0;
  double ahlfors_c0 = 1.0;  // Ahlfors constant of mu
  double theta_min = 0.0;
  double theta_max = 0.0;
  std::vector<SingularStratum> singular_strata;
};

/// A ground-truth shape: geometry plus a probability density theta on it.
class ShapeModel {
 public:
  ShapeModel(std::shared_ptr<const Geometry> geometry, DensitySpec density);

  const Geometry& geometry() const { return *geometry_; }
  const DensitySpec& density() const { return density_; }
  const Regularity& regularity() const { return regularity_; }
  int ambient_dim() const { return geometry_->ambient_dim(); }
  int intrinsic_dim() const { return geometry_->intrinsic_dim(); }
  /// "circle/uniform" etc.
  std::string id() const;

  /// theta(x); x must lie on S (unchecked contract).
  double density_at(const Point& x) const;
  Matrix tangent_at(const Point& x) const { return geometry_->tangent(x); }
  /// Distance to the full singular set (geometric strata plus density jumps).
  double singular_distance(const Point& x) const;
  GroundTruthVarifold quadrature_varifold(double h) const;

  /// One mu-distributed point; at most `budget` attempts are consumed from the counter.
  /// Throws SamplerFailureError once `trials` exceeds `budget`.
  Point draw(Philox& rng, std::uint64_t& trials, std::uint64_t budget) const;

 private:
  double unnormalized(const Point& x) const;

  std::shared_ptr<const Geometry> geometry_;
  DensitySpec density_;
  double normalizer_ = 1.0;
  double g_max_ = 1.0;
  Regularity regularity_;
};

// Shape catalog.
std::shared_ptr<const Geometry> make_circle(double radius = 1.0);
std::shared_ptr<const Geometry> make_sphere(double radius = 1.0);
std::shared_ptr<const Geometry> make_segment(double length = 1.0);
std::shared_ptr<const Geometry> make_stadium(double radius = 1.0, double length = 2.0);
std::shared_ptr<const Geometry> make_square_boundary(double side = 1.0);
std::shared_ptr<const Geometry> make_cross_segments(double arm = 1.0);
std::shared_ptr<const Geometry> make_flat_disk(double radius = 1.0);
/// Graph over [0, 1] of F(x) = sum_{j<J} s^j sin(t^j x) / t^j, a primitive of a
/// truncated Weierstrass sum. Declared Holder exponent a = min(1, -ln s / ln t).
std::shared_ptr<const Geometry> make_holder_graph(double s = 0.3, double t = 4.0, int terms = 8);

/// Parses "circle", "sphere", "segment", "stadium:radius=1,length=2", "square",
/// "cross", "disk", "weier:s=0.3,t=4,J=8".
std::shared_ptr<const Geometry> geometry_by_name(const std::string& spec);
/// Parses "uniform", "tilt", "bump:b=0.5", "jump".
DensitySpec density_by_name(const std::string& spec);
std::string density_name(const DensitySpec& density);

/// H^d quadrature mass of the points of `quadrature` lying within rho of the singular set.
double offset_mass(const ShapeModel& shape, const DiscreteVarifold& quadrature, double rho);

/// Grid quadrature of H^d on the affine plane x + range(P), over the cube [-extent, extent]^d
/// in an orthonormal frame of range(P). Cells have side at most h; points are cell centres.
DiscreteMeasure flat_plane_quadrature(int d, int n, const Point& x, const Matrix& projector, double extent, double h);

}  // namespace varinf
