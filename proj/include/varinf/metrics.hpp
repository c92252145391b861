#pragma once

#include <optional>
#include <vector>

#include <varinf/linalg.hpp>
#include <varinf/measures.hpp>

namespace varinf {

enum class MetricKind { euclidean, product_varifold };
enum class MatrixNorm { operator_norm, frobenius };

/// Open ball B(center, radius) in R^n used for localization.
struct Ball {
  Point center;
  double radius = 0.0;
};

/// |x - y| + ||A - B|| (operator norm unless told otherwise).
double varifold_metric(const Point& x, const Matrix& a, const Point& y, const Matrix& b,
                       MatrixNorm norm = MatrixNorm::operator_norm);

/// The merged support of a flat-metric problem together with its distance.
class MetricSpaceView {
 public:
  MetricSpaceView(Matrix points, std::vector<Matrix> matrices, MetricKind kind, MatrixNorm norm);

  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  MetricKind kind() const { return kind_; }
  const Matrix& points() const { return points_; }
  const std::vector<Matrix>& matrices() const { return matrices_; }

  double distance(std::size_t i, std::size_t j) const;
  /// Euclidean distance of the spatial components; a lower bound for distance().
  double spatial_distance(std::size_t i, std::size_t j) const;

 private:
  Matrix points_;
  std::vector<Matrix> matrices_;
  MetricKind kind_;
  MatrixNorm norm_;
};

struct FlatMetricOptions {
  std::size_t max_support = 4000;
  std::size_t neighbors = 32;          // nearest spatial neighbours wired up before pricing
  std::size_t dense_threshold = 600;   // all pairs are wired up at or below this support size
  std::size_t max_pricing_rounds = 200;
  std::optional<double> coarsen_grid;  // coarsen both inputs first
};

/// Two discrete measures, or two discrete varifolds on R^n x Sym(n).
/// Measures are stored as varifolds with empty matrix lists.
struct FlatMetricProblem {
  DiscreteVarifold a;
  DiscreteVarifold b;
  MetricKind kind = MetricKind::euclidean;
  MatrixNorm norm = MatrixNorm::operator_norm;
  std::optional<Ball> ball;
  FlatMetricOptions options;

  static FlatMetricProblem measures(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                    std::optional<Ball> ball = std::nullopt);
  static FlatMetricProblem varifolds(const DiscreteVarifold& a, const DiscreteVarifold& b,
                                     std::optional<Ball> ball = std::nullopt,
                                     MatrixNorm norm = MatrixNorm::operator_norm);
};

struct FlowArc {
  int from = 0;  // -1 stands for the creation/destruction node
  int to = 0;
  double amount = 0.0;
};

struct FlatMetricResult {
  double value = 0.0;
  /// Optimal test function on the merged support (|f_i| <= 1, |f_i - f_j| <= d_ij).
  Eigen::VectorXd witness;
  /// Merged support with its charges (a minus b).
  Matrix support;
  Eigen::VectorXd charge;
  std::vector<FlowArc> flow;
  /// True when pricing certified the witness feasible for every pair.
  bool exact = false;
  std::size_t arcs = 0;
  std::size_t pricing_rounds = 0;
  /// Upper bound on |value - value before coarsening|; 0 without coarsening.
  double coarsening_bound = 0.0;
};

/// Solves the flat-metric problem (localized when problem.ball is set).
FlatMetricResult solve_flat_metric(const FlatMetricProblem& problem);

/// beta(a, b). Ignores problem.ball.
double bl_distance(const FlatMetricProblem& problem);
/// beta_B(a, b). Throws ArgumentError when problem.ball is unset.
double bl_distance_localized(const FlatMetricProblem& problem);

/// Merges atoms falling into the same cell of a grid whose cells have diameter grid_h.
/// Merged atoms sit at the weighted centroid of their cell.
DiscreteMeasure coarsen(const DiscreteMeasure& measure, double grid_h);

struct CoarseVarifold {
  DiscreteVarifold varifold;
  /// grid_h * mass plus the weighted matrix movement.
  double transport_bound = 0.0;
};

/// As above; matrices are weight-averaged per cell and, for projector varifolds,
/// truncated back to rank-d projectors.
CoarseVarifold coarsen(const DiscreteVarifold& varifold, double grid_h, MatrixNorm norm = MatrixNorm::operator_norm);

/// Dense-simplex solution of the primal LP over all O(m^2) Lipschitz constraints.
/// Test oracle for merged supports of at most 15 points.
double lp_oracle(const FlatMetricProblem& problem);

namespace detail {

/// Merged support: atoms with identical point and matrix are combined.
struct MergedSupport {
  Matrix points;
  std::vector<Matrix> matrices;
  Eigen::VectorXd charge;
};
MergedSupport merge_support(const FlatMetricProblem& problem);

/// Box bound on |f_i|: 1, or min(1, dist(x_i, complement of the ball)).
Eigen::VectorXd box_bounds(const Matrix& points, const std::optional<Ball>& ball);

}  // namespace detail

}  // namespace varinf
