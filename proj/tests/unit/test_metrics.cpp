#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <varinf/errors.hpp>
#include <varinf/estimators.hpp>
#include <varinf/metrics.hpp>
#include <varinf/network_simplex.hpp>
#include <varinf/rng.hpp>

using namespace varinf;

namespace {

DiscreteMeasure atoms(std::initializer_list<std::pair<Eigen::Vector2d, double>> list) {
  DiscreteMeasure m{Matrix(2, static_cast<Eigen::Index>(list.size())), Eigen::VectorXd(static_cast<Eigen::Index>(list.size()))};
  Eigen::Index k = 0;
  for (const auto& [x, w] : list) {
    m.points.col(k) = x;
    m.weights[k++] = w;
  }
  return m;
}

DiscreteMeasure random_measure(Philox& rng, int count, double spread) {
  DiscreteMeasure m{Matrix(2, count), Eigen::VectorXd(count)};
  for (int i = 0; i < count; ++i) {
    m.points.col(i) = Eigen::Vector2d(spread * rng.uniform(), spread * rng.uniform());
    m.weights[i] = rng.uniform();
  }
  return m;
}

DiscreteVarifold random_varifold(Philox& rng, int count, double spread) {
  DiscreteVarifold v;
  const DiscreteMeasure m = random_measure(rng, count, spread);
  v.points = m.points;
  v.weights = m.weights;
  for (int i = 0; i < count; ++i) {
    const double angle = 3.0 * rng.uniform();
    const Eigen::Vector2d t(std::cos(angle), std::sin(angle));
    v.matrices.push_back(t * t.transpose());
  }
  v.projector = true;
  v.rank = 1;
  return v;
}

double beta(const DiscreteMeasure& a, const DiscreteMeasure& b) { return bl_distance(FlatMetricProblem::measures(a, b)); }

}  // namespace

TEST_CASE("network simplex on a textbook transport problem") {
  // supplies 5, 3 -> demands 4, 4 with costs [[1, 3], [2, 1]]
  NetworkSimplex ns({5, 3, -4, -4});
  ns.add_arc(0, 2, 1);
  ns.add_arc(0, 3, 3);
  ns.add_arc(1, 2, 2);
  ns.add_arc(1, 3, 1);
  ns.solve();
  const double unit_cost[] = {1, 3, 2, 1};
  double cost = 0;
  for (std::size_t a = 0; a < 4; ++a) cost += ns.flow(a) * unit_cost[a];
  CHECK(cost == doctest::Approx(4 * 1 + 1 * 3 + 3 * 1));
  CHECK(ns.artificial_flow() == doctest::Approx(0.0));
  // dual feasibility, tight on arcs carrying flow
  for (std::size_t a = 0; a < 4; ++a) {
    const auto slack = static_cast<double>(unit_cost[a]) - static_cast<double>(ns.dual(ns.arc_source(a)) - ns.dual(ns.arc_target(a)));
    CHECK(slack >= 0.0);
    if (ns.flow(a) > 0) CHECK(slack == 0.0);
  }
}

TEST_CASE("flat metric examples") {
  const auto x = Eigen::Vector2d(0.0, 0.0);
  const auto a = atoms({{x, 1.0}});
  CHECK(beta(a, a) == 0.0);
  CHECK(beta(a, atoms({{Eigen::Vector2d(0.3, 0.0), 1.0}})) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(beta(a, atoms({{Eigen::Vector2d(3.0, 4.0), 1.0}})) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(beta(a, atoms({{x, 0.25}})) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(beta(a, DiscreteMeasure{Matrix(2, 0), Eigen::VectorXd(0)}) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("localized examples") {
  const auto c = Eigen::Vector2d(0.0, 0.0);
  const auto a = atoms({{Eigen::Vector2d(5.0, 5.0), 1.0}});
  const auto b = atoms({{Eigen::Vector2d(6.0, 5.0), 2.0}});
  CHECK(bl_distance_localized(FlatMetricProblem::measures(a, b, Ball{c, 1.0})) == 0.0);

  const auto p = atoms({{c, 1.0}}), q = atoms({{Eigen::Vector2d(0.3, 0.0), 1.0}});
  CHECK(bl_distance_localized(FlatMetricProblem::measures(p, q, Ball{c, 10.0})) == doctest::Approx(0.3).epsilon(1e-9));

  Philox rng(2, 0);
  const auto r = random_measure(rng, 8, 1.0), s = random_measure(rng, 8, 1.0);
  CHECK(bl_distance_localized(FlatMetricProblem::measures(r, s, Ball{c, 20.0})) == doctest::Approx(beta(r, s)).epsilon(1e-9));
  CHECK_THROWS_AS(bl_distance_localized(FlatMetricProblem::measures(r, s)), ArgumentError);
}

TEST_CASE("varifold metric examples") {
  const Eigen::Vector2d o(0, 0);
  Matrix e1 = Matrix::Zero(2, 2), e2 = Matrix::Zero(2, 2);
  e1(0, 0) = 1;
  e2(1, 1) = 1;
  CHECK(varifold_metric(o, e1, o, e1) == 0.0);
  CHECK(varifold_metric(o, e1, o, e2) == doctest::Approx(1.0));
  CHECK(varifold_metric(o, e1, o, e2, MatrixNorm::frobenius) == doctest::Approx(std::sqrt(2.0)));
  CHECK(varifold_metric(o, e1, Eigen::Vector2d(3, 4), e1) == doctest::Approx(5.0));
}

TEST_CASE("flow solver agrees with the LP oracle") {
  Philox rng(41, 0);
  for (int trial = 0; trial < 60; ++trial) {
    const int na = 1 + trial % 6, nb = 1 + (trial / 6) % 6;
    const double spread = trial % 3 == 0 ? 0.5 : (trial % 3 == 1 ? 2.0 : 6.0);
    FlatMetricProblem problem = trial % 2 ? FlatMetricProblem::measures(random_measure(rng, na, spread), random_measure(rng, nb, spread))
                                          : FlatMetricProblem::varifolds(random_varifold(rng, na, spread), random_varifold(rng, nb, spread));
    if (trial % 4 == 3) problem.ball = Ball{Eigen::Vector2d(spread / 2, spread / 2), spread / 2};
    const FlatMetricResult r = solve_flat_metric(problem);
    CHECK(r.exact);
    CHECK(r.value == doctest::Approx(lp_oracle(problem)).epsilon(1e-6));
    // the witness is feasible and certifies the value
    CHECK(r.witness.cwiseAbs().maxCoeff() <= 1.0 + 1e-9);
    CHECK(r.witness.dot(r.charge) == doctest::Approx(r.value).epsilon(1e-6));
  }
  FlatMetricProblem big = FlatMetricProblem::measures(random_measure(rng, 10, 1.0), random_measure(rng, 10, 1.0));
  CHECK_THROWS_AS(lp_oracle(big), OracleTooLargeError);
}

TEST_CASE("sparse pricing matches the dense arc set") {
  Philox rng(43, 0);
  for (int trial = 0; trial < 3; ++trial) {
    FlatMetricProblem sparse = FlatMetricProblem::measures(random_measure(rng, 400, 3.0), random_measure(rng, 400, 3.0));
    sparse.options.dense_threshold = 0;
    sparse.options.neighbors = 4;
    FlatMetricProblem dense = sparse;
    dense.options.dense_threshold = 10000;
    const auto a = solve_flat_metric(sparse), b = solve_flat_metric(dense);
    CHECK(a.exact);
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-9));
    CHECK(a.arcs < b.arcs);
  }
}

TEST_CASE("metric axioms") {
  Philox rng(47, 0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto a = random_measure(rng, 4, 2.0), b = random_measure(rng, 4, 2.0), c = random_measure(rng, 4, 2.0);
    const double ab = beta(a, b), ba = beta(b, a), bc = beta(b, c), ac = beta(a, c);
    CHECK(ab >= 0.0);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ac <= ab + bc + 1e-9);
    CHECK(beta(a, a) == 0.0);
    const Ball ball{Eigen::Vector2d(1.0, 1.0), 0.8};
    CHECK(bl_distance_localized(FlatMetricProblem::measures(a, b, ball)) <= ab + 1e-9);
  }
}

TEST_CASE("support cap") {
  Philox rng(53, 0);
  FlatMetricProblem p = FlatMetricProblem::measures(random_measure(rng, 30, 1.0), random_measure(rng, 30, 1.0));
  p.options.max_support = 20;
  CHECK_THROWS_AS(solve_flat_metric(p), ProblemTooLargeError);
}

TEST_CASE("coarsening") {
  const auto two = atoms({{Eigen::Vector2d(0.01, 0.01), 0.2}, {Eigen::Vector2d(0.02, 0.02), 0.3}});
  const auto merged = coarsen(two, 0.5);
  REQUIRE(merged.size() == 1);
  CHECK(merged.weights[0] == doctest::Approx(0.5));

  Philox rng(59, 0);
  const auto spread = random_measure(rng, 50, 100.0);
  const auto same = coarsen(spread, 1e-6);
  CHECK(same.size() == 50);
  CHECK(same.total_mass() == doctest::Approx(spread.total_mass()));

  for (int trial = 0; trial < 4; ++trial) {
    const auto a = random_measure(rng, 500, 1.0), b = random_measure(rng, 500, 1.0);
    const double h = 0.05;
    const double exact = beta(a, b), coarse = beta(coarsen(a, h), coarsen(b, h));
    CHECK(std::abs(coarse - exact) <= h * (a.total_mass() + b.total_mass()));
    FlatMetricProblem p = FlatMetricProblem::measures(a, b);
    p.options.coarsen_grid = h;
    const auto r = solve_flat_metric(p);
    CHECK(r.value == doctest::Approx(coarse).epsilon(1e-9));
    CHECK(std::abs(r.value - exact) <= r.coarsening_bound + 1e-12);
  }

  const auto v = random_varifold(rng, 300, 1.0);
  const auto cv = coarsen(v, 0.1);
  CHECK(cv.varifold.projector);
  CHECK_NOTHROW(cv.varifold.validate());
  CHECK(cv.varifold.total_mass() == doctest::Approx(v.total_mass()));
  const auto w = random_varifold(rng, 300, 1.0);
  const double exact = bl_distance(FlatMetricProblem::varifolds(v, w));
  const auto cw = coarsen(w, 0.1);
  const double coarse = bl_distance(FlatMetricProblem::varifolds(cv.varifold, cw.varifold));
  CHECK(std::abs(coarse - exact) <= cv.transport_bound + cw.transport_bound + 1e-12);
}

TEST_CASE("merged support") {
  const auto a = atoms({{Eigen::Vector2d(0, 0), 1.0}, {Eigen::Vector2d(1, 0), 0.5}});
  const auto b = atoms({{Eigen::Vector2d(0, 0), 1.0}, {Eigen::Vector2d(2, 0), 0.5}});
  const auto merged = detail::merge_support(FlatMetricProblem::measures(a, b));
  CHECK(merged.charge.size() == 2);
  CHECK(merged.charge.sum() == doctest::Approx(0.0));
  const Eigen::VectorXd g = detail::box_bounds(merged.points, Ball{Eigen::Vector2d(0, 0), 1.5});
  CHECK(g.maxCoeff() <= 1.0);
  CHECK(g.minCoeff() >= 0.0);
}
