#pragma once

#include <cmath>

#include "senet/types.hpp"

namespace senet::objective {

// Objective constants: gamma > 0 weights the reconstruction term, lambda in
// [0,1] interpolates between pure l1 (lambda=1) and pure ridge (lambda=0)
// regularization.
struct HyperParams {
  double gamma{50.0};
  double lambda{0.9};
};

void validate(const HyperParams& hyper);

// Loss decomposition. `rec` is the plain squared-residual sum (no gamma/2
// factor); `total` = (gamma/2)*rec + reg.
struct LossBreakdown {
  double total{0.0};
  double rec{0.0};
  double reg{0.0};
};

// Elastic-net penalty r(c) = lambda*|c| + (1-lambda)/2 * c^2.
template <class Scalar>
inline Scalar elastic_net(Scalar c, Scalar lambda) {
  return lambda * std::abs(c) + Scalar(0.5) * (Scalar(1) - lambda) * c * c;
}

// Subgradient choice r'(0) = 0; elsewhere lambda*sgn(c) + (1-lambda)*c.
template <class Scalar>
inline Scalar elastic_net_deriv(Scalar c, Scalar lambda) {
  if (c == Scalar(0)) return Scalar(0);
  const Scalar sign = c > Scalar(0) ? Scalar(1) : Scalar(-1);
  return lambda * sign + (Scalar(1) - lambda) * c;
}

inline double reg(double c, double lambda) { return elastic_net(c, lambda); }
inline double reg_deriv(double c, double lambda) { return elastic_net_deriv(c, lambda); }

// Residual vector q_j = gamma * (x_j - X * c_j), expecting c_j[j] = 0 so the
// self term never participates. Throws NonzeroDiagonal otherwise.
Vector residual(const MatrixRef& X, Index j, const VectorRef& coeffs, double gamma);

// Per-point objective (gamma/2)*||x_j - X c_j||^2 + sum_{i != j} r(c_ij).
double point_loss(const MatrixRef& X, Index j, const VectorRef& coeffs,
                  const HyperParams& hyper);

// Sum of point_loss over all columns, with the rec/reg split reported
// separately. Throws NonzeroDiagonal if any C_jj != 0.
LossBreakdown total_loss(const MatrixRef& X, const MatrixRef& C, const HyperParams& hyper);

}  // namespace senet::objective
