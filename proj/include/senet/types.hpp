#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace senet {

using Index = Eigen::Index;

// Dense column-major types shared by every module. All numerical state is
// kept in f64; the scalar-templated aliases exist for the few kernels that
// are generic over the scalar type.
template <class Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

using MatrixRef = Eigen::Ref<const Matrix>;
using VectorRef = Eigen::Ref<const Vector>;

// Ground-truth or predicted cluster ids, 0-based.
using Labels = std::vector<int>;

}  // namespace senet
