#include "senet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "senet/errors.hpp"
#include "senet/linalg.hpp"
#include "senet/rng.hpp"

namespace senet::spectral {

namespace {

void check_zero_diagonal(const MatrixRef& C, const char* where) {
  if (C.rows() != C.cols()) {
    throw DimensionMismatch(std::string(where) + ": matrix is " + std::to_string(C.rows()) +
                            "x" + std::to_string(C.cols()) + ", expected square");
  }
  for (Index j = 0; j < C.cols(); ++j) {
    if (C(j, j) != 0.0) {
      throw NonzeroDiagonal(std::string(where) + ": diagonal entry " + std::to_string(j) +
                            " is " + std::to_string(C(j, j)) + ", expected exactly 0");
    }
  }
}

}  // namespace

Matrix build_affinity(const MatrixRef& C, const AffinityOptions& opts) {
  check_zero_diagonal(C, "build_affinity");
  const Index N = C.rows();
  if (opts.mode == AffinityMode::SymAbs) {
    return C.cwiseAbs() + C.transpose().cwiseAbs();
  }
  if (opts.knn < 1 || opts.knn > N) {
    throw InvalidSpec("build_affinity: knn " + std::to_string(opts.knn) +
                      " out of range for N=" + std::to_string(N));
  }
  Matrix sparsified = Matrix::Zero(N, N);
  for (Index j = 0; j < N; ++j) {
    for (Index i : linalg::topk_abs(C.col(j), opts.knn)) {
      sparsified(i, j) = std::abs(C(i, j));
    }
  }
  return sparsified.cwiseMax(sparsified.transpose());
}

Matrix normalized_laplacian(const MatrixRef& W, double degree_regularization) {
  const Index N = W.rows();
  if (W.cols() != N) {
    throw DimensionMismatch("normalized_laplacian: affinity must be square");
  }
  Vector degrees = W.rowwise().sum();
  if (degree_regularization > 0.0) {
    degrees.array() += degree_regularization;
  } else {
    for (Index i = 0; i < N; ++i) {
      if (degrees[i] == 0.0) {
        throw IsolatedVertex("normalized_laplacian: vertex " + std::to_string(i) +
                                 " has zero degree",
                             i);
      }
    }
  }
  const Vector inv_sqrt = degrees.cwiseSqrt().cwiseInverse();
  // Filled per (i, j) pair so the result is symmetric to the last bit.
  Matrix L(N, N);
  for (Index j = 0; j < N; ++j) {
    for (Index i = j; i < N; ++i) {
      const double value = -W(i, j) * inv_sqrt[i] * inv_sqrt[j];
      L(i, j) = value;
      L(j, i) = value;
    }
    L(j, j) += 1.0;
  }
  return L;
}

Matrix spectral_embed(const MatrixRef& W, Index m, double degree_regularization) {
  const Index N = W.rows();
  if (m > N) {
    throw DimensionMismatch("spectral_embed: m=" + std::to_string(m) + " exceeds N=" +
                            std::to_string(N));
  }
  const Matrix L = normalized_laplacian(W, degree_regularization);
  Matrix embedding = linalg::sym_eig_smallest(L, m).vectors;
  // Ng-Jordan-Weiss row normalization; all-zero rows stay zero.
  for (Index i = 0; i < N; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }
  return embedding;
}

namespace {

KmeansResult lloyd_once(const MatrixRef& points, Index k, Rng& rng, int max_iters) {
  const Index N = points.rows();
  const Index m = points.cols();

  // k-means++ seeding.
  Matrix centers(k, m);
  Vector dist2 = Vector::Constant(N, std::numeric_limits<double>::infinity());
  centers.row(0) = points.row(rng.uniform_int(N));
  for (Index c = 1; c < k; ++c) {
    for (Index i = 0; i < N; ++i) {
      dist2[i] = std::min(dist2[i], (points.row(i) - centers.row(c - 1)).squaredNorm());
    }
    const double total = dist2.sum();
    Index chosen = N - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (Index i = 0; i < N; ++i) {
        cumulative += dist2[i];
        if (cumulative >= target) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = rng.uniform_int(N);
    }
    centers.row(c) = points.row(chosen);
  }

  KmeansResult result;
  result.assignments.assign(static_cast<std::size_t>(N), 0);
  std::vector<Index> counts(static_cast<std::size_t>(k), 0);
  for (int it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (Index i = 0; i < N; ++i) {
      Index best = 0;
      double best_dist = (points.row(i) - centers.row(0)).squaredNorm();
      for (Index c = 1; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_dist) {
          best_dist = d;
          best = c;
        }
      }
      if (result.assignments[static_cast<std::size_t>(i)] != static_cast<int>(best)) {
        result.assignments[static_cast<std::size_t>(i)] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed && it > 0) break;

    centers.setZero();
    std::fill(counts.begin(), counts.end(), Index{0});
    for (Index i = 0; i < N; ++i) {
      const auto c = static_cast<Index>(result.assignments[static_cast<std::size_t>(i)]);
      centers.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    std::vector<Index> empty;
    for (Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centers.row(c) /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        empty.push_back(c);
      }
    }
    // Reseed empty clusters at the point farthest from its own center.
    for (Index c : empty) {
      Index farthest = 0;
      double worst = -1.0;
      for (Index i = 0; i < N; ++i) {
        const auto a = static_cast<Index>(result.assignments[static_cast<std::size_t>(i)]);
        if (counts[static_cast<std::size_t>(a)] == 0) continue;
        const double d = (points.row(i) - centers.row(a)).squaredNorm();
        if (d > worst) {
          worst = d;
          farthest = i;
        }
      }
      centers.row(c) = points.row(farthest);
    }
  }

  result.inertia = 0.0;
  for (Index i = 0; i < N; ++i) {
    const auto c = static_cast<Index>(result.assignments[static_cast<std::size_t>(i)]);
    result.inertia += (points.row(i) - centers.row(c)).squaredNorm();
  }
  return result;
}

}  // namespace

KmeansResult kmeans(const MatrixRef& points, Index k, std::uint64_t seed, int restarts,
                    int max_iters) {
  const Index N = points.rows();
  if (k < 1 || k > N) {
    throw InvalidSpec("kmeans: k=" + std::to_string(k) + " out of range for N=" +
                      std::to_string(N));
  }
  KmeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(restarts, 1); ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    KmeansResult candidate = lloyd_once(points, k, rng, max_iters);
    if (candidate.inertia < best.inertia) best = std::move(candidate);
  }
  return best;
}

ClusterResult cluster(const MatrixRef& C, const ClusterOptions& opts) {
  const Matrix W = build_affinity(C, opts.affinity);
  const Index m = opts.embed_dim > 0 ? opts.embed_dim : opts.k;
  ClusterResult result;
  result.embedding = spectral_embed(W, m, opts.degree_regularization);
  KmeansResult km = kmeans(result.embedding, opts.k, opts.seed, opts.restarts);
  result.assignments = std::move(km.assignments);
  result.kmeans_inertia = km.inertia;
  return result;
}

}  // namespace senet::spectral
