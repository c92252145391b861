#include <varinf/metrics.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include <varinf/errors.hpp>
#include <varinf/estimators.hpp>
#include <varinf/network_simplex.hpp>
#include <varinf/sampling.hpp>

namespace varinf {

namespace {

constexpr double kCostScale = 1e9;

std::int64_t scaled(double cost) { return std::llround(cost * kCostScale); }

double matrix_distance(const Matrix& a, const Matrix& b, MatrixNorm norm) {
  const Matrix diff = a - b;
  return norm == MatrixNorm::frobenius ? diff.norm() : symmetric_operator_norm(diff);
}

DiscreteVarifold as_varifold(const DiscreteMeasure& m) {
  DiscreteVarifold v;
  v.points = m.points;
  v.weights = m.weights;
  return v;
}

}  // namespace

double varifold_metric(const Point& x, const Matrix& a, const Point& y, const Matrix& b, MatrixNorm norm) {
  return (x - y).norm() + matrix_distance(a, b, norm);
}

MetricSpaceView::MetricSpaceView(Matrix points, std::vector<Matrix> matrices, MetricKind kind, MatrixNorm norm)
    : points_(std::move(points)), matrices_(std::move(matrices)), kind_(kind), norm_(norm) {
  if (kind_ == MetricKind::product_varifold && matrices_.size() != size())
    throw ArgumentError("product metric needs one matrix per point");
}

double MetricSpaceView::spatial_distance(std::size_t i, std::size_t j) const {
  return (points_.col(static_cast<Eigen::Index>(i)) - points_.col(static_cast<Eigen::Index>(j))).norm();
}

double MetricSpaceView::distance(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  const double spatial = spatial_distance(i, j);
  if (kind_ == MetricKind::euclidean) return spatial;
  return spatial + matrix_distance(matrices_[i], matrices_[j], norm_);
}

FlatMetricProblem FlatMetricProblem::measures(const DiscreteMeasure& a, const DiscreteMeasure& b,
                                              std::optional<Ball> ball) {
  FlatMetricProblem p;
  p.a = as_varifold(a);
  p.b = as_varifold(b);
  p.kind = MetricKind::euclidean;
  p.ball = std::move(ball);
  return p;
}

FlatMetricProblem FlatMetricProblem::varifolds(const DiscreteVarifold& a, const DiscreteVarifold& b,
                                               std::optional<Ball> ball, MatrixNorm norm) {
  FlatMetricProblem p;
  p.a = a;
  p.b = b;
  p.kind = MetricKind::product_varifold;
  p.norm = norm;
  p.ball = std::move(ball);
  return p;
}

namespace detail {

MergedSupport merge_support(const FlatMetricProblem& problem) {
  const bool product = problem.kind == MetricKind::product_varifold;
  const auto n = problem.a.points.rows();
  if (problem.a.size() > 0 && problem.b.size() > 0 && problem.b.points.rows() != n)
    throw ArgumentError("flat metric: measures live in different dimensions");
  for (const DiscreteVarifold* v : {&problem.a, &problem.b}) {
    if (static_cast<std::size_t>(v->weights.size()) != v->size())
      throw ArgumentError("flat metric: one weight per atom expected");
    if ((v->weights.array() < 0.0).any()) throw ArgumentError("flat metric: weights must be nonnegative");
    if (product && v->matrices.size() != v->size()) throw ArgumentError("flat metric: one matrix per atom expected");
  }

  std::map<std::vector<double>, std::size_t> lookup;
  std::vector<std::vector<double>> keys;
  std::vector<double> charge;
  std::vector<std::size_t> origin_atom;
  std::vector<const DiscreteVarifold*> origin;
  auto add = [&](const DiscreteVarifold& v, double sign) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      std::vector<double> key(v.points.col(k).data(), v.points.col(k).data() + v.points.rows());
      if (product) key.insert(key.end(), v.matrices[i].data(), v.matrices[i].data() + v.matrices[i].size());
      auto [it, fresh] = lookup.emplace(key, charge.size());
      if (fresh) {
        charge.push_back(0.0);
        origin.push_back(&v);
        origin_atom.push_back(i);
      }
      charge[it->second] += sign * v.weights[k];
    }
  };
  add(problem.a, 1.0);
  add(problem.b, -1.0);

  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < charge.size(); ++i)
    if (charge[i] != 0.0) kept.push_back(i);
  MergedSupport out;
  out.points.resize(n, static_cast<Eigen::Index>(kept.size()));
  out.charge.resize(static_cast<Eigen::Index>(kept.size()));
  for (std::size_t j = 0; j < kept.size(); ++j) {
    const std::size_t i = kept[j];
    out.points.col(static_cast<Eigen::Index>(j)) = origin[i]->points.col(static_cast<Eigen::Index>(origin_atom[i]));
    out.charge[static_cast<Eigen::Index>(j)] = charge[i];
    if (product) out.matrices.push_back(origin[i]->matrices[origin_atom[i]]);
  }
  return out;
}

Eigen::VectorXd box_bounds(const Matrix& points, const std::optional<Ball>& ball) {
  Eigen::VectorXd g = Eigen::VectorXd::Ones(points.cols());
  if (!ball) return g;
  if (!(ball->radius > 0.0) || ball->center.size() != points.rows())
    throw ArgumentError("localization ball must have positive radius and matching dimension");
  for (Eigen::Index i = 0; i < points.cols(); ++i)
    g[i] = std::clamp(ball->radius - (points.col(i) - ball->center).norm(), 0.0, 1.0);
  return g;
}

}  // namespace detail

FlatMetricResult solve_flat_metric(const FlatMetricProblem& input) {
  FlatMetricResult result;
  const FlatMetricProblem* problem = &input;
  FlatMetricProblem coarse;
  if (input.options.coarsen_grid) {
    const double grid = *input.options.coarsen_grid;
    coarse = input;
    if (input.kind == MetricKind::product_varifold) {
      auto ca = coarsen(input.a, grid, input.norm);
      auto cb = coarsen(input.b, grid, input.norm);
      coarse.a = std::move(ca.varifold);
      coarse.b = std::move(cb.varifold);
      result.coarsening_bound = ca.transport_bound + cb.transport_bound;
    } else {
      coarse.a = as_varifold(coarsen(input.a.mass(), grid));
      coarse.b = as_varifold(coarsen(input.b.mass(), grid));
      result.coarsening_bound = grid * (input.a.total_mass() + input.b.total_mass());
    }
    problem = &coarse;
  }

  detail::MergedSupport merged = detail::merge_support(*problem);
  const std::size_t m = static_cast<std::size_t>(merged.charge.size());
  if (m > problem->options.max_support)
    throw ProblemTooLargeError("flat metric: merged support of " + std::to_string(m) + " atoms exceeds the cap of " +
                               std::to_string(problem->options.max_support));
  result.support = merged.points;
  result.charge = merged.charge;
  result.witness = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
  if (m == 0) {
    result.exact = true;
    return result;
  }

  const MetricSpaceView space(merged.points, merged.matrices, problem->kind, problem->norm);
  const Eigen::VectorXd g = detail::box_bounds(merged.points, problem->ball);
  const int ground = static_cast<int>(m);

  std::vector<double> supply(m + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    supply[i] = merged.charge[static_cast<Eigen::Index>(i)];
    total += supply[i];
  }
  supply[m] = -total;
  NetworkSimplex simplex(std::move(supply));

  for (std::size_t i = 0; i < m; ++i) {
    const std::int64_t c = scaled(g[static_cast<Eigen::Index>(i)]);
    simplex.add_arc(static_cast<int>(i), ground, c);
    simplex.add_arc(ground, static_cast<int>(i), c);
  }

  std::unordered_set<std::uint64_t> wired;
  auto wire = [&](std::size_t i, std::size_t j) {
    if (i == j) return;
    const std::size_t lo = std::min(i, j), hi = std::max(i, j);
    const double reach = g[static_cast<Eigen::Index>(lo)] + g[static_cast<Eigen::Index>(hi)];
    if (space.spatial_distance(lo, hi) >= reach) return;
    const double d = space.distance(lo, hi);
    // a transport arc at least as long as destroy + create is never needed
    if (d >= reach) return;
    if (!wired.insert(static_cast<std::uint64_t>(lo) * m + hi).second) return;
    const std::int64_t c = scaled(std::min(d, 2.0));
    simplex.add_arc(static_cast<int>(lo), static_cast<int>(hi), c);
    simplex.add_arc(static_cast<int>(hi), static_cast<int>(lo), c);
  };

  if (m <= problem->options.dense_threshold) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j) wire(i, j);
  } else {
    const SpatialIndex index(merged.points);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j : index.nearest(merged.points.col(static_cast<Eigen::Index>(i)), problem->options.neighbors + 1))
        wire(i, j);
  }

  // Column generation: re-solve until the dual witness satisfies every pairwise constraint.
  std::vector<std::int64_t> f(m);
  while (true) {
    simplex.solve();
    ++result.pricing_rounds;
    const std::int64_t base = simplex.dual(ground);
    for (std::size_t i = 0; i < m; ++i) f[i] = simplex.dual(static_cast<int>(i)) - base;

    std::size_t added = 0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const std::int64_t gap = f[i] > f[j] ? f[i] - f[j] : f[j] - f[i];
        if (gap == 0) continue;
        if (space.spatial_distance(i, j) * kCostScale >= static_cast<double>(gap) + 1.0) continue;
        const double d = space.distance(i, j);
        if (scaled(std::min(d, 2.0)) >= gap) continue;
        const std::size_t before = wired.size();
        wire(i, j);
        added += wired.size() - before;
      }
    }
    if (added == 0) {
      result.exact = true;
      break;
    }
    if (result.pricing_rounds >= problem->options.max_pricing_rounds) break;
  }

  if (simplex.artificial_flow() > 1e-9 * std::max(1.0, merged.charge.cwiseAbs().sum()))
    throw std::logic_error("flat metric: flow solver ended with artificial flow");

  double value = 0.0;
  for (std::size_t e = 0; e < simplex.arc_count(); ++e) {
    const double amount = simplex.flow(e);
    if (amount <= 0.0) continue;
    const int u = simplex.arc_source(e), v = simplex.arc_target(e);
    double cost;
    if (u == ground)
      cost = g[v];
    else if (v == ground)
      cost = g[u];
    else
      cost = std::min(space.distance(static_cast<std::size_t>(u), static_cast<std::size_t>(v)), 2.0);
    value += amount * cost;
    result.flow.push_back({u == ground ? -1 : u, v == ground ? -1 : v, amount});
  }
  for (std::size_t i = 0; i < m; ++i) result.witness[static_cast<Eigen::Index>(i)] = static_cast<double>(f[i]) / kCostScale;
  result.value = std::max(0.0, value);
  result.arcs = simplex.arc_count();
  return result;
}

double bl_distance(const FlatMetricProblem& problem) {
  if (!problem.ball) return solve_flat_metric(problem).value;
  FlatMetricProblem global = problem;
  global.ball.reset();
  return solve_flat_metric(global).value;
}

double bl_distance_localized(const FlatMetricProblem& problem) {
  if (!problem.ball) throw ArgumentError("bl_distance_localized needs a localization ball");
  return solve_flat_metric(problem).value;
}

namespace {

using CellKey = std::vector<long long>;

CellKey cell_of(const Eigen::Ref<const Eigen::VectorXd>& x, double side) {
  CellKey key(static_cast<std::size_t>(x.size()));
  for (Eigen::Index k = 0; k < x.size(); ++k) key[static_cast<std::size_t>(k)] = static_cast<long long>(std::floor(x[k] / side));
  return key;
}

// cell id per atom, numbered by first appearance
std::vector<std::size_t> assign_cells(const Matrix& points, double grid_h, std::size_t& cells) {
  if (!(grid_h > 0.0)) throw ArgumentError("coarsen: grid_h must be positive");
  const double side = grid_h / std::sqrt(static_cast<double>(std::max<Eigen::Index>(points.rows(), 1)));
  std::map<CellKey, std::size_t> lookup;
  std::vector<std::size_t> out(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    auto [it, fresh] = lookup.emplace(cell_of(points.col(i), side), lookup.size());
    out[static_cast<std::size_t>(i)] = it->second;
  }
  cells = lookup.size();
  return out;
}

}  // namespace

DiscreteMeasure coarsen(const DiscreteMeasure& measure, double grid_h) {
  std::size_t cells = 0;
  const auto cell = assign_cells(measure.points, grid_h, cells);
  const auto n = measure.points.rows();
  DiscreteMeasure out;
  out.points = Matrix::Zero(n, static_cast<Eigen::Index>(cells));
  out.weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells));
  Eigen::VectorXd count = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells));
  Matrix plain = Matrix::Zero(n, static_cast<Eigen::Index>(cells));
  for (Eigen::Index i = 0; i < measure.points.cols(); ++i) {
    const auto c = static_cast<Eigen::Index>(cell[static_cast<std::size_t>(i)]);
    out.points.col(c) += measure.weights[i] * measure.points.col(i);
    plain.col(c) += measure.points.col(i);
    out.weights[c] += measure.weights[i];
    count[c] += 1.0;
  }
  for (Eigen::Index c = 0; c < out.points.cols(); ++c) {
    if (count[c] == 1.0 || out.weights[c] == 0.0)
      out.points.col(c) = plain.col(c) / count[c];
    else
      out.points.col(c) /= out.weights[c];
  }
  return out;
}

CoarseVarifold coarsen(const DiscreteVarifold& varifold, double grid_h, MatrixNorm norm) {
  if (varifold.matrices.size() != varifold.size()) throw ArgumentError("coarsen: one matrix per atom expected");
  std::size_t cells = 0;
  const auto cell = assign_cells(varifold.points, grid_h, cells);
  const auto n = varifold.points.rows();
  const auto cn = static_cast<Eigen::Index>(cells);

  CoarseVarifold out;
  DiscreteVarifold& v = out.varifold;
  v.points = Matrix::Zero(n, cn);
  v.weights = Eigen::VectorXd::Zero(cn);
  v.matrices.assign(cells, Matrix::Zero(n, n));
  v.projector = varifold.projector;
  v.rank = varifold.rank;
  std::vector<Matrix> plain_matrix(cells, Matrix::Zero(n, n));
  Matrix plain = Matrix::Zero(n, cn);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(cn);
  for (Eigen::Index i = 0; i < varifold.points.cols(); ++i) {
    const auto ci = cell[static_cast<std::size_t>(i)];
    const auto c = static_cast<Eigen::Index>(ci);
    const double w = varifold.weights[i];
    v.points.col(c) += w * varifold.points.col(i);
    v.matrices[ci] += w * varifold.matrices[static_cast<std::size_t>(i)];
    plain.col(c) += varifold.points.col(i);
    plain_matrix[ci] += varifold.matrices[static_cast<std::size_t>(i)];
    v.weights[c] += w;
    count[c] += 1.0;
  }
  for (std::size_t ci = 0; ci < cells; ++ci) {
    const auto c = static_cast<Eigen::Index>(ci);
    if (count[c] == 1.0 || v.weights[c] == 0.0) {
      v.points.col(c) = plain.col(c) / count[c];
      v.matrices[ci] = plain_matrix[ci] / count[c];
    } else {
      v.points.col(c) /= v.weights[c];
      v.matrices[ci] /= v.weights[c];
    }
    v.matrices[ci] = 0.5 * (v.matrices[ci] + v.matrices[ci].transpose()).eval();
    if (v.projector && count[c] > 1.0) v.matrices[ci] = projector_truncate(v.matrices[ci], v.rank);
  }

  double moved = 0.0;
  for (Eigen::Index i = 0; i < varifold.points.cols(); ++i) {
    const auto ci = cell[static_cast<std::size_t>(i)];
    moved += varifold.weights[i] * matrix_distance(varifold.matrices[static_cast<std::size_t>(i)], v.matrices[ci], norm);
  }
  out.transport_bound = grid_h * varifold.total_mass() + moved;
  return out;
}

}  // namespace varinf
