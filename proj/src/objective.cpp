#include "senet/objective.hpp"

#include <string>

#include "senet/errors.hpp"

namespace senet::objective {

void validate(const HyperParams& hyper) {
  if (!(hyper.gamma > 0.0)) {
    throw InvalidSpec("hyper: gamma must be > 0, got " + std::to_string(hyper.gamma));
  }
  if (!(hyper.lambda >= 0.0 && hyper.lambda <= 1.0)) {
    throw InvalidSpec("hyper: lambda must be in [0,1], got " + std::to_string(hyper.lambda));
  }
}

namespace {

void check_column(const MatrixRef& X, Index j, const VectorRef& coeffs) {
  if (coeffs.size() != X.cols()) {
    throw DimensionMismatch("coefficient vector length " + std::to_string(coeffs.size()) +
                            " does not match column count " + std::to_string(X.cols()));
  }
  if (j < 0 || j >= X.cols()) {
    throw DimensionMismatch("column index " + std::to_string(j) + " out of range");
  }
  if (coeffs[j] != 0.0) {
    throw NonzeroDiagonal("self-coefficient c[" + std::to_string(j) + "] = " +
                          std::to_string(coeffs[j]) + ", expected exactly 0");
  }
}

}  // namespace

Vector residual(const MatrixRef& X, Index j, const VectorRef& coeffs, double gamma) {
  check_column(X, j, coeffs);
  return gamma * (X.col(j) - X * coeffs);
}

double point_loss(const MatrixRef& X, Index j, const VectorRef& coeffs,
                  const HyperParams& hyper) {
  check_column(X, j, coeffs);
  const double rec = (X.col(j) - X * coeffs).squaredNorm();
  double reg_sum = 0.0;
  for (Index i = 0; i < coeffs.size(); ++i) {
    if (i == j) continue;
    reg_sum += elastic_net(coeffs[i], hyper.lambda);
  }
  return 0.5 * hyper.gamma * rec + reg_sum;
}

LossBreakdown total_loss(const MatrixRef& X, const MatrixRef& C, const HyperParams& hyper) {
  if (C.rows() != X.cols() || C.cols() != X.cols()) {
    throw DimensionMismatch("coefficient matrix is " + std::to_string(C.rows()) + "x" +
                            std::to_string(C.cols()) + ", expected " + std::to_string(X.cols()) +
                            "x" + std::to_string(X.cols()));
  }
  for (Index j = 0; j < C.cols(); ++j) {
    if (C(j, j) != 0.0) {
      throw NonzeroDiagonal("C[" + std::to_string(j) + "][" + std::to_string(j) +
                            "] = " + std::to_string(C(j, j)) + ", expected exactly 0");
    }
  }
  LossBreakdown out;
  for (Index j = 0; j < C.cols(); ++j) {
    out.rec += (X.col(j) - X * C.col(j)).squaredNorm();
    for (Index i = 0; i < C.rows(); ++i) {
      if (i == j) continue;
      out.reg += elastic_net(C(i, j), hyper.lambda);
    }
  }
  out.total = 0.5 * hyper.gamma * out.rec + out.reg;
  return out;
}

}  // namespace senet::objective
