#pragma once

#include <vector>

#include "senet/types.hpp"

namespace senet::linalg {

// Eigenpairs of a symmetric matrix, sorted by ascending eigenvalue.
// Columns of `vectors` are unit-norm eigenvectors matching `values`.
struct EigenResult {
  Vector values;
  Matrix vectors;
};

// k algebraically smallest eigenpairs of a symmetric matrix.
// Throws NotSymmetric if max |A_ij - A_ji| > 1e-8, DimensionMismatch if
// k > rows or A is not square.
EigenResult sym_eig_smallest(const MatrixRef& A, Index k);

// Indices of the k largest-magnitude entries of v, largest first; ties are
// broken toward the lower index. Throws DimensionMismatch if k > length.
std::vector<Index> topk_abs(const VectorRef& v, Index k);

}  // namespace senet::linalg
