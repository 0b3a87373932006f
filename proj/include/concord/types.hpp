#pragma once

#include <Eigen/Dense>
#include <utility>

namespace concord {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Real = double;
using Index = Eigen::Index;

using Matrix = MatrixX<Real>;
using Vector = VectorX<Real>;
using IntMatrix = MatrixX<int>;

using IndexPair = std::pair<Index, Index>;

}  // namespace concord
