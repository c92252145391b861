#include <varinf/measures.hpp>

#include <cmath>
#include <string>

#include <varinf/errors.hpp>

namespace varinf {

void DiscreteVarifold::validate() const {
  const auto m = size();
  if (static_cast<std::size_t>(weights.size()) != m || matrices.size() != m)
    throw ArgumentError("varifold: points, weights and matrices differ in length");
  const auto n = points.rows();
  for (std::size_t i = 0; i < m; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (!(weights[k] >= 0.0)) throw ArgumentError("varifold: negative weight at atom " + std::to_string(i));
    const Matrix& a = matrices[i];
    if (a.rows() != n || a.cols() != n) throw ArgumentError("varifold: matrix of wrong size at atom " + std::to_string(i));
    if (asymmetry(a) > 1e-12) throw ArgumentError("varifold: asymmetric matrix at atom " + std::to_string(i));
    if (projector) {
      if ((a * a - a).cwiseAbs().maxCoeff() > 1e-10 || std::abs(a.trace() - rank) > 1e-10)
        throw ArgumentError("varifold: atom " + std::to_string(i) + " is not a rank-" + std::to_string(rank) +
                            " projector");
    }
  }
}

}  // namespace varinf
