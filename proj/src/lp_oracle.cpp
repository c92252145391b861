// Brute-force primal LP for the flat metric, used to cross-check the flow solver.
//
// Variables u_i = f_i + g_i move the box |f_i| <= g_i to 0 <= u_i <= 2 g_i, which
// puts the origin inside the feasible set, so a single simplex phase suffices.

#include <algorithm>
#include <cmath>
#include <vector>

#include <varinf/errors.hpp>
#include <varinf/metrics.hpp>

namespace varinf {

namespace {

// max c^T u  s.t.  A u <= b, u >= 0, with b >= 0. Bland's rule, dense tableau.
double simplex_max(const std::vector<std::vector<double>>& a, const std::vector<double>& b, const std::vector<double>& c) {
  const std::size_t rows = a.size();
  const std::size_t vars = c.size();
  const std::size_t cols = vars + rows + 1;
  const std::size_t rhs = cols - 1;
  std::vector<std::vector<double>> t(rows + 1, std::vector<double>(cols, 0.0));
  std::vector<std::size_t> basis(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < vars; ++j) t[r][j] = a[r][j];
    t[r][vars + r] = 1.0;
    t[r][rhs] = b[r];
    basis[r] = vars + r;
  }
  for (std::size_t j = 0; j < vars; ++j) t[rows][j] = -c[j];

  constexpr double eps = 1e-12;
  for (std::size_t iter = 0; iter < 100000; ++iter) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j < rhs; ++j)
      if (t[rows][j] < -eps) {
        enter = j;
        break;
      }
    if (enter == cols) return t[rows][rhs];

    std::size_t leave = rows;
    double best = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      if (t[r][enter] <= eps) continue;
      const double ratio = t[r][rhs] / t[r][enter];
      if (leave == rows || ratio < best - eps || (ratio <= best + eps && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == rows) throw std::logic_error("lp oracle: unbounded program");

    const double pivot = t[leave][enter];
    for (double& v : t[leave]) v /= pivot;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == leave || t[r][enter] == 0.0) continue;
      const double factor = t[r][enter];
      for (std::size_t j = 0; j < cols; ++j) t[r][j] -= factor * t[leave][j];
    }
    basis[leave] = enter;
  }
  throw std::logic_error("lp oracle: iteration limit reached");
}

}  // namespace

double lp_oracle(const FlatMetricProblem& problem) {
  const detail::MergedSupport merged = detail::merge_support(problem);
  const std::size_t m = static_cast<std::size_t>(merged.charge.size());
  if (m > 15) throw OracleTooLargeError("lp oracle: merged support has " + std::to_string(m) + " > 15 atoms");
  if (m == 0) return 0.0;

  const MetricSpaceView space(merged.points, merged.matrices, problem.kind, problem.norm);
  const Eigen::VectorXd g = detail::box_bounds(merged.points, problem.ball);

  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      std::vector<double> row(m, 0.0);
      row[i] = 1.0;
      row[j] = -1.0;
      a.push_back(std::move(row));
      const double gi = g[static_cast<Eigen::Index>(i)], gj = g[static_cast<Eigen::Index>(j)];
      b.push_back(std::max(0.0, std::min(space.distance(i, j), 2.0) + gi - gj));
    }
    std::vector<double> row(m, 0.0);
    row[i] = 1.0;
    a.push_back(std::move(row));
    b.push_back(2.0 * g[static_cast<Eigen::Index>(i)]);
  }
  std::vector<double> c(merged.charge.data(), merged.charge.data() + m);
  const double shifted = simplex_max(a, b, c);
  return shifted - merged.charge.dot(g);
}

}  // namespace varinf
