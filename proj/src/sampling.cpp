#include <varinf/sampling.hpp>

#include <algorithm>
#include <numeric>
#include <queue>

#include <varinf/errors.hpp>
#include <varinf/io.hpp>

namespace varinf {

DiscreteMeasure SampleBatch::empirical() const {
  const auto n = points.cols();
  return {points, Eigen::VectorXd::Constant(n, n > 0 ? 1.0 / static_cast<double>(n) : 0.0)};
}

SampleBatch sample(const ShapeModel& shape, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  if (n == 0) throw ArgumentError("sample size must be positive");
  Philox rng(seed, stream);
  SampleBatch batch;
  batch.seed = seed;
  batch.stream = stream;
  batch.shape_id = shape.id();
  batch.points.resize(shape.ambient_dim(), static_cast<Eigen::Index>(n));
  std::uint64_t trials = 0;
  const std::uint64_t budget = kRejectionBudgetPerPoint * n;
  for (std::size_t i = 0; i < n; ++i) batch.points.col(static_cast<Eigen::Index>(i)) = shape.draw(rng, trials, budget);
  return batch;
}

SplitSample split(const SampleBatch& batch) {
  const std::size_t total = batch.size();
  if (total == 0 || total % 4 != 0) throw ArgumentError("split: sample size must be a positive multiple of 4");
  const auto part = static_cast<Eigen::Index>(total / 4);
  SplitSample out;
  for (Eigen::Index k = 0; k < 4; ++k) {
    SampleBatch& p = out.parts[static_cast<std::size_t>(k)];
    p.seed = batch.seed;
    p.stream = batch.stream;
    p.shape_id = batch.shape_id;
    p.points.resize(batch.points.rows(), part);
    for (Eigen::Index j = 0; j < part; ++j) p.points.col(j) = batch.points.col(k + 4 * j);
  }
  return out;
}

SplitSample sample_split(const ShapeModel& shape, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  SplitSample out;
  for (std::uint64_t k = 0; k < 4; ++k)
    out.parts[k] = sample(shape, n, seed, Philox::child_stream(stream, k));
  return out;
}

void save_sample_csv(const std::string& path, const SampleBatch& batch) {
  CsvTable table;
  for (int k = 1; k <= batch.dim(); ++k) table.header.push_back("x" + std::to_string(k));
  for (Eigen::Index i = 0; i < batch.points.cols(); ++i)
    table.rows.emplace_back(batch.points.col(i).data(), batch.points.col(i).data() + batch.dim());
  write_csv(path, table);
}

SampleBatch load_sample_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  const auto n = static_cast<Eigen::Index>(table.header.size());
  SampleBatch batch;
  batch.shape_id = path;
  batch.points.resize(n, static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i)
    for (Eigen::Index k = 0; k < n; ++k)
      batch.points(k, static_cast<Eigen::Index>(i)) = table.rows[i][static_cast<std::size_t>(k)];
  return batch;
}

// ---------------------------------------------------------------------------

SpatialIndex::SpatialIndex(Matrix points, std::size_t leaf_size)
    : points_(std::move(points)), leaf_size_(std::max<std::size_t>(leaf_size, 1)), use_tree_(points_.rows() <= 8) {
  order_.resize(size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (use_tree_ && size() > 0) {
    nodes_.reserve(2 * size() / leaf_size_ + 1);
    build(0, size());
  }
}

int SpatialIndex::build(std::size_t begin, std::size_t end) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo = points_.col(static_cast<Eigen::Index>(order_[begin]));
  node.hi = node.lo;
  for (std::size_t i = begin + 1; i < end; ++i) {
    const auto p = points_.col(static_cast<Eigen::Index>(order_[i]));
    node.lo = node.lo.cwiseMin(p);
    node.hi = node.hi.cwiseMax(p);
  }
  if (end - begin > leaf_size_) {
    Eigen::Index axis = 0;
    (node.hi - node.lo).maxCoeff(&axis);
    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin), order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end), [&](std::size_t a, std::size_t b) {
                       return points_(axis, static_cast<Eigen::Index>(a)) < points_(axis, static_cast<Eigen::Index>(b));
                     });
    node.left = build(begin, mid);
    node.right = build(mid, end);
  }
  nodes_[static_cast<std::size_t>(id)] = std::move(node);
  return id;
}

double SpatialIndex::box_distance2(const Node& node, const Point& x) const {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double gap = std::max({node.lo[k] - x[k], 0.0, x[k] - node.hi[k]});
    sum += gap * gap;
  }
  return sum;
}

void SpatialIndex::for_each_in_ball(const Point& x, double r, const std::function<void(std::size_t, double)>& visit) const {
  const double r2 = r * r;
  auto check = [&](std::size_t i) {
    const double dist2 = (points_.col(static_cast<Eigen::Index>(i)) - x).squaredNorm();
    if (dist2 < r2) visit(i, dist2);
  };
  if (!use_tree_) {
    for (std::size_t i = 0; i < size(); ++i) check(i);
    return;
  }
  if (nodes_.empty()) return;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
    stack.pop_back();
    if (box_distance2(node, x) >= r2) continue;
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) check(order_[i]);
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
}

std::vector<std::size_t> SpatialIndex::range_query(const Point& x, double r) const {
  std::vector<std::size_t> out;
  for_each_in_ball(x, r, [&](std::size_t i, double) { out.push_back(i); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> SpatialIndex::nearest(const Point& x, std::size_t k) const {
  // max-heap of (distance^2, index) holding the best k seen so far
  std::priority_queue<std::pair<double, std::size_t>> best;
  auto offer = [&](std::size_t i) {
    const double dist2 = (points_.col(static_cast<Eigen::Index>(i)) - x).squaredNorm();
    if (best.size() < k) {
      best.emplace(dist2, i);
    } else if (std::make_pair(dist2, i) < best.top()) {
      best.pop();
      best.emplace(dist2, i);
    }
  };
  if (k == 0) return {};
  if (!use_tree_) {
    for (std::size_t i = 0; i < size(); ++i) offer(i);
  } else if (!nodes_.empty()) {
    std::vector<int> stack{0};
    while (!stack.empty()) {
      const Node& node = nodes_[static_cast<std::size_t>(stack.back())];
      stack.pop_back();
      if (best.size() == k && box_distance2(node, x) > best.top().first) continue;
      if (node.left < 0) {
        for (std::size_t i = node.begin; i < node.end; ++i) offer(order_[i]);
        continue;
      }
      // descend into the nearer child first
      const Node& l = nodes_[static_cast<std::size_t>(node.left)];
      const Node& r = nodes_[static_cast<std::size_t>(node.right)];
      if (box_distance2(l, x) <= box_distance2(r, x)) {
        stack.push_back(node.right);
        stack.push_back(node.left);
      } else {
        stack.push_back(node.left);
        stack.push_back(node.right);
      }
    }
  }
  std::vector<std::size_t> out(best.size());
  for (std::size_t j = best.size(); j-- > 0;) {
    out[j] = best.top().second;
    best.pop();
  }
  return out;
}

}  // namespace varinf
