#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <varinf/geometry.hpp>
#include <varinf/linalg.hpp>
#include <varinf/measures.hpp>

namespace varinf {

/// Rejection attempts allowed per requested point.
inline constexpr std::uint64_t kRejectionBudgetPerPoint = 1000000;

/// i.i.d. draws from mu; column k of `points` is X_{k+1}.
struct SampleBatch {
  Matrix points;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string shape_id;

  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }
  int dim() const { return static_cast<int>(points.rows()); }
  /// mu_N: unit mass 1/N on every draw.
  DiscreteMeasure empirical() const;
};

/// Four independent parts X, Y, Y~, Z of equal size.
struct SplitSample {
  std::array<SampleBatch, 4> parts;

  const SampleBatch& x() const { return parts[0]; }
  const SampleBatch& y() const { return parts[1]; }
  const SampleBatch& y_tilde() const { return parts[2]; }
  const SampleBatch& z() const { return parts[3]; }
  std::size_t part_size() const { return parts[0].size(); }
};

/// N draws from the Philox stream (seed, stream). Bit-reproducible.
SampleBatch sample(const ShapeModel& shape, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// Part k receives indices k, k + 4, k + 8, ...
SplitSample split(const SampleBatch& batch);

/// Four parts of size n, each drawn from its own child stream of (seed, stream).
SplitSample sample_split(const ShapeModel& shape, std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

/// One point per row, comma separated, with a header line x1,...,xn.
void save_sample_csv(const std::string& path, const SampleBatch& batch);
SampleBatch load_sample_csv(const std::string& path);

/// Fixed-radius neighbour queries over a static point set.
/// kd-tree for dimension <= 8, brute force above.
class SpatialIndex {
 public:
  explicit SpatialIndex(Matrix points, std::size_t leaf_size = 16);

  const Matrix& points() const { return points_; }
  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }

  /// { i : |p_i - x| < r }, sorted ascending.
  std::vector<std::size_t> range_query(const Point& x, double r) const;

  /// Calls visit(i, |p_i - x|^2) for every i with |p_i - x| < r, in tree order.
  void for_each_in_ball(const Point& x, double r, const std::function<void(std::size_t, double)>& visit) const;

  /// Indices of the k nearest points (fewer if size() < k), nearest first.
  std::vector<std::size_t> nearest(const Point& x, std::size_t k) const;

 private:
  struct Node {
    Eigen::VectorXd lo, hi;
    std::size_t begin = 0, end = 0;
    int left = -1, right = -1;
  };

  int build(std::size_t begin, std::size_t end);
  double box_distance2(const Node& node, const Point& x) const;

  Matrix points_;
  std::size_t leaf_size_;
  bool use_tree_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace varinf
