#include "senet/ensc.hpp"

#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "senet/errors.hpp"
#include "senet/model.hpp"

namespace senet::ensc {

double prox_elastic_net(double z, double step, double lambda) {
  return model::soft_threshold(z, step * lambda) / (1.0 + step * (1.0 - lambda));
}

namespace {

// Largest eigenvalue of X_{-j}^T X_{-j} by power iteration, never touching
// coordinate j explicitly (it is masked out of the iterate instead).
double spectral_norm_sq(const MatrixRef& X, Index j, int iters = 30) {
  const Index N = X.cols();
  Vector v = X.transpose() * X.col(j);
  v[j] = 0.0;
  if (v.norm() == 0.0) {
    v.setOnes();
    v[j] = 0.0;
  }
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < iters; ++it) {
    Vector w = X * v;
    Vector next = X.transpose() * w;
    next[j] = 0.0;
    estimate = next.norm();
    if (estimate == 0.0) return 0.0;
    v = next / estimate;
  }
  return estimate;
}

double objective_value(const MatrixRef& X, Index j, const Vector& c,
                       const objective::HyperParams& hyper) {
  double reg_sum = 0.0;
  for (Index i = 0; i < c.size(); ++i) {
    if (i == j) continue;
    reg_sum += objective::elastic_net(c[i], hyper.lambda);
  }
  return 0.5 * hyper.gamma * (X.col(j) - X * c).squaredNorm() + reg_sum;
}

}  // namespace

Vector solve_column(const MatrixRef& X, Index j, const SolverConfig& cfg) {
  const Index N = X.cols();
  if (N < 2) {
    throw DimensionMismatch("ensc: need at least two columns, got " + std::to_string(N));
  }
  if (j < 0 || j >= N) {
    throw DimensionMismatch("ensc: column index " + std::to_string(j) + " out of range");
  }
  objective::validate(cfg.hyper);
  const double gamma = cfg.hyper.gamma;
  const double lambda = cfg.hyper.lambda;

  double lipschitz = gamma * spectral_norm_sq(X, j);
  if (lipschitz <= 0.0) lipschitz = gamma;
  double step = 1.0 / lipschitz;

  Vector c = Vector::Zero(N);
  Vector next(N);
  double obj = objective_value(X, j, c, cfg.hyper);

  for (int it = 0; it < cfg.max_iters; ++it) {
    Vector grad = gamma * (X.transpose() * (X * c - X.col(j)));
    grad[j] = 0.0;

    // Backtracking: halve the step until the objective does not increase.
    double next_obj = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      for (Index i = 0; i < N; ++i) {
        next[i] = i == j ? 0.0 : prox_elastic_net(c[i] - step * grad[i], step, lambda);
      }
      next_obj = objective_value(X, j, next, cfg.hyper);
      if (next_obj <= obj) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // step underflow; current iterate is the answer

    c.swap(next);
    const double decrease = obj - next_obj;
    obj = next_obj;
    if (decrease <= cfg.tol * std::max(obj, 1e-300)) break;
  }
  return c;
}

Matrix solve_all(const MatrixRef& X, const SolverConfig& cfg, int threads) {
  const Index N = X.cols();
  Matrix C(N, N);
  auto solve_range = [&](Index begin, Index end) {
    for (Index j = begin; j < end; ++j) C.col(j) = solve_column(X, j, cfg);
  };
  if (threads <= 1 || N < 2 * static_cast<Index>(threads)) {
    solve_range(0, N);
  } else {
    std::vector<std::thread> pool;
    const Index n_workers = static_cast<Index>(threads);
    for (Index w = 0; w < n_workers; ++w) {
      pool.emplace_back(solve_range, w * N / n_workers, (w + 1) * N / n_workers);
    }
    for (auto& t : pool) t.join();
  }
  return C;
}

}  // namespace senet::ensc
