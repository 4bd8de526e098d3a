#pragma once

#include "senet/objective.hpp"
#include "senet/types.hpp"

namespace senet::ensc {

struct SolverConfig {
  int max_iters{5000};
  double tol{1e-8};  // relative objective decrease
  objective::HyperParams hyper{};
};

// Closed-form proximal operator of t*r(.) with the elastic-net penalty:
// the unique minimizer of (1/(2t))(c - z)^2 + lambda*|c| + ((1-lambda)/2)c^2,
// i.e. T_{t*lambda}(z) / (1 + t*(1 - lambda)).
double prox_elastic_net(double z, double step, double lambda);

// Per-column elastic-net self-expression by monotone proximal gradient
// (backtracking ISTA). Returns c_j of length N with c_j[j] = 0.
Vector solve_column(const MatrixRef& X, Index j, const SolverConfig& cfg);

// Coefficient matrix whose column j is solve_column(X, j). Columns are
// independent; `threads` workers split them.
Matrix solve_all(const MatrixRef& X, const SolverConfig& cfg, int threads = 1);

}  // namespace senet::ensc
