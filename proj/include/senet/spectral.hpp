#pragma once

#include <cstdint>
#include <utility>

#include "senet/types.hpp"

namespace senet::spectral {

enum class AffinityMode { SymAbs, Knn };

struct AffinityOptions {
  AffinityMode mode{AffinityMode::SymAbs};
  Index knn{3};  // neighbors kept per column in Knn mode
};

// Symmetric non-negative affinity with zero diagonal. SymAbs: |C| + |C^T|.
// Knn: keep the k largest-magnitude entries per column, take absolute
// values, symmetrize by elementwise max. Throws NonzeroDiagonal if the
// input diagonal is not exactly zero.
Matrix build_affinity(const MatrixRef& C, const AffinityOptions& opts);

// Row-normalized eigenvectors of L_sym = I - D^{-1/2} W D^{-1/2} for the m
// smallest eigenvalues (rows of the returned N x m matrix). A zero-degree
// vertex raises IsolatedVertex unless degree_regularization > 0, which is
// added to every degree instead.
Matrix spectral_embed(const MatrixRef& W, Index m, double degree_regularization = 0.0);

// Normalized graph Laplacian of a symmetric non-negative affinity,
// symmetric by construction.
Matrix normalized_laplacian(const MatrixRef& W, double degree_regularization = 0.0);

struct KmeansResult {
  Labels assignments;
  double inertia{0.0};
};

// Lloyd's algorithm with k-means++ seeding, best of `restarts` by inertia
// (ties toward the lower restart index). Points are rows of `points`.
KmeansResult kmeans(const MatrixRef& points, Index k, std::uint64_t seed, int restarts = 10,
                    int max_iters = 300);

struct ClusterOptions {
  Index k{0};
  AffinityOptions affinity{};
  Index embed_dim{0};  // 0 means use k
  std::uint64_t seed{0};
  int restarts{10};
  double degree_regularization{0.0};
};

struct ClusterResult {
  Labels assignments;
  Matrix embedding;
  double kmeans_inertia{0.0};
};

// Full pipeline: build_affinity -> spectral_embed -> kmeans.
ClusterResult cluster(const MatrixRef& C, const ClusterOptions& opts);

}  // namespace senet::spectral
