#pragma once

#include <cstddef>
#include <vector>

#include <varinf/linalg.hpp>

namespace varinf {

/// Finite sum of weighted Dirac masses in R^n. Column k of `points` is atom k.
struct DiscreteMeasure {
  Matrix points;
  Eigen::VectorXd weights;

  int dim() const { return static_cast<int>(points.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
  double total_mass() const { return weights.sum(); }
};

/// Weighted atoms in R^n x Sym_+(n): each atom carries a symmetric matrix.
/// When `projector` is set every matrix is a rank-`rank` orthogonal projector.
struct DiscreteVarifold {
  Matrix points;
  Eigen::VectorXd weights;
  std::vector<Matrix> matrices;
  bool projector = false;
  int rank = 0;

  int dim() const { return static_cast<int>(points.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
  double total_mass() const { return weights.sum(); }

  /// Spatial marginal (drops the matrices).
  DiscreteMeasure mass() const { return {points, weights}; }

  /// Throws ArgumentError if lengths differ, a weight is negative, a matrix
  /// is asymmetric beyond 1e-12, or (projector flag) P^2 != P / trace != rank beyond 1e-10.
  void validate() const;
};

/// Quadrature of H^d restricted to a shape, paired with exact tangent projectors.
/// Weights sum to H^d(S); `resolution` bounds every cell diameter.
struct GroundTruthVarifold {
  DiscreteVarifold varifold;
  double resolution = 0.0;
};

}  // namespace varinf
