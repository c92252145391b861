#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <varinf/errors.hpp>
#include <varinf/geometry.hpp>
#include <varinf/rng.hpp>
#include <varinf/sampling.hpp>

using namespace varinf;

namespace {

Matrix random_cloud(Philox& rng, int n, int count) {
  Matrix m(n, count);
  for (int j = 0; j < count; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = rng.uniform();
  return m;
}

std::vector<std::size_t> brute_force(const Matrix& pts, const Point& x, double r) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < pts.cols(); ++i)
    if ((pts.col(i) - x).norm() < r) out.push_back(static_cast<std::size_t>(i));
  return out;
}

}  // namespace

TEST_CASE("circle samples lie on the circle") {
  const ShapeModel circle(make_circle(), {});
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto batch = sample(circle, 4, seed);
    CHECK(batch.size() == 4);
    for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(batch.points.col(i).norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("sample means") {
  const auto seg = sample(ShapeModel(make_segment(), {}), 100000, 7);
  CHECK(std::abs(seg.points.row(0).mean() - 0.5) < 0.005);
  const auto tilt = sample(ShapeModel(make_circle(), {DensityKind::tilt}), 100000, 7);
  CHECK(std::abs(tilt.points.row(0).mean() - 0.25) < 0.01);
  const auto jump = sample(ShapeModel(make_segment(), {DensityKind::jump}), 100000, 7);
  // density 2/3 on [1/2, 1], 1/3 on [0, 1/2]
  const double right = static_cast<double>((jump.points.row(0).array() >= 0.5).count()) / 100000.0;
  CHECK(std::abs(right - 2.0 / 3.0) < 0.01);
}

TEST_CASE("sphere samples are uniform on the sphere") {
  const auto s = sample(ShapeModel(make_sphere(), {}), 60000, 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(s.points.row(k).mean()) < 0.015);
    CHECK(std::abs(s.points.row(k).array().square().mean() - 1.0 / 3.0) < 0.01);
  }
}

TEST_CASE("sampling is reproducible") {
  const ShapeModel shape(make_stadium(), {DensityKind::holder_bump, 0.5});
  const auto a = sample(shape, 500, 5, 3), b = sample(shape, 500, 5, 3), c = sample(shape, 500, 5, 4);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
  CHECK(a.shape_id == "stadium/bump:b=0.5");
}

TEST_CASE("split rule") {
  const auto batch = sample(ShapeModel(make_circle(), {}), 8, 1);
  const SplitSample s = split(batch);
  CHECK(s.part_size() == 2);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(s.parts[k].points.col(0) == batch.points.col(static_cast<Eigen::Index>(k)));
    CHECK(s.parts[k].points.col(1) == batch.points.col(static_cast<Eigen::Index>(k + 4)));
  }
  CHECK(split(sample(ShapeModel(make_circle(), {}), 4, 1)).part_size() == 1);
  CHECK_THROWS_AS(split(sample(ShapeModel(make_circle(), {}), 6, 1)), ArgumentError);

  const SplitSample parts = sample_split(ShapeModel(make_circle(), {}), 10, 1);
  for (std::size_t k = 0; k < 4; ++k) CHECK(parts.parts[k].size() == 10);
  CHECK(parts.x().points != parts.y().points);
}

TEST_CASE("range query examples") {
  Matrix pts(1, 3);
  pts << 0, 1, 2;
  const SpatialIndex index(pts);
  CHECK(index.range_query(Point::Zero(1), 1.5) == std::vector<std::size_t>{0, 1});
  Matrix spread(2, 3);
  spread << 0, 1, 2, 0, 0, 0;
  CHECK(SpatialIndex(spread).range_query(Eigen::Vector2d(0.5, 0.3), 0.1).empty());
}

TEST_CASE("kd-tree agrees with brute force") {
  Philox rng(17, 0);
  for (int n : {1, 2, 3, 9}) {
    const Matrix pts = random_cloud(rng, n, 1000);
    const SpatialIndex index(pts);
    for (int q = 0; q < 50; ++q) {
      Point x(n);
      for (int i = 0; i < n; ++i) x[i] = rng.uniform() * 1.2 - 0.1;
      const double r = 0.05 + 0.4 * rng.uniform();
      CHECK(index.range_query(x, r) == brute_force(pts, x, r));

      std::vector<std::size_t> visited;
      index.for_each_in_ball(x, r, [&](std::size_t i, double d2) {
        CHECK(d2 == doctest::Approx((pts.col(static_cast<Eigen::Index>(i)) - x).squaredNorm()));
        visited.push_back(i);
      });
      std::sort(visited.begin(), visited.end());
      CHECK(visited == brute_force(pts, x, r));

      const auto near = index.nearest(x, 7);
      REQUIRE(near.size() == 7);
      std::vector<double> all;
      for (Eigen::Index i = 0; i < pts.cols(); ++i) all.push_back((pts.col(i) - x).norm());
      std::sort(all.begin(), all.end());
      for (std::size_t k = 0; k < 7; ++k)
        CHECK((pts.col(static_cast<Eigen::Index>(near[k])) - x).norm() == doctest::Approx(all[k]));
    }
  }
}

TEST_CASE("sample CSV round trip") {
  const auto batch = sample(ShapeModel(make_sphere(), {}), 50, 2);
  save_sample_csv("sample_roundtrip.csv", batch);
  const auto back = load_sample_csv("sample_roundtrip.csv");
  CHECK(back.points == batch.points);
  std::remove("sample_roundtrip.csv");
}
