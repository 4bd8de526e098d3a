#include "senet/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "senet/errors.hpp"

namespace senet::linalg {

EigenResult sym_eig_smallest(const MatrixRef& A, Index k) {
  const Index n = A.rows();
  if (A.cols() != n) {
    throw DimensionMismatch("sym_eig_smallest: matrix is " + std::to_string(n) + "x" +
                            std::to_string(A.cols()) + ", expected square");
  }
  if (k > n) {
    throw DimensionMismatch("sym_eig_smallest: k=" + std::to_string(k) + " exceeds dimension " +
                            std::to_string(n));
  }
  const double asym = (A - A.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8) {
    throw NotSymmetric("sym_eig_smallest: asymmetry " + std::to_string(asym) + " exceeds 1e-8");
  }

  Eigen::SelfAdjointEigenSolver<Matrix> solver(A);
  if (solver.info() != Eigen::Success) {
    throw Error("sym_eig_smallest: eigendecomposition failed to converge");
  }
  // SelfAdjointEigenSolver already returns eigenvalues in increasing order.
  EigenResult out;
  out.values = solver.eigenvalues().head(k);
  out.vectors = solver.eigenvectors().leftCols(k);
  return out;
}

std::vector<Index> topk_abs(const VectorRef& v, Index k) {
  const Index n = v.size();
  if (k > n) {
    throw DimensionMismatch("topk_abs: k=" + std::to_string(k) + " exceeds length " +
                            std::to_string(n));
  }
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  auto larger = [&v](Index a, Index b) {
    const double ma = std::abs(v[a]);
    const double mb = std::abs(v[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), larger);
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace senet::linalg
