#pragma once

#include <optional>
#include <string>

#include "senet/objective.hpp"
#include "senet/types.hpp"

namespace senet::metrics {

struct MetricsReport {
  double sre{0.0};
  double conn{0.0};
  double acc{0.0};
  double nmi{0.0};
  double ari{0.0};
  std::optional<objective::LossBreakdown> losses;
};

// JSON object {"sre":..,"conn":..,"acc":..,"nmi":..,"ari":..,"L":..,
// "L_rec":..,"L_reg":..}; loss fields are null when absent.
std::string to_json(const MetricsReport& report);

// Subspace recovery error: share of the off-diagonal l1 mass of C that
// connects points with different labels. All-zero C returns 0 (with a
// warning on stderr).
double sre(const MatrixRef& C, const Labels& labels);

// Algebraic connectivity: for each ground-truth class, the second smallest
// eigenvalue of the normalized Laplacian of the induced affinity subgraph,
// minimized over classes. A class containing a zero-degree vertex (or a
// disconnected subgraph) contributes 0. Throws ClassTooSmall for classes
// with fewer than 2 members.
double conn(const MatrixRef& W, const Labels& labels);

// Clustering accuracy under the best one-to-one cluster matching (Hungarian
// algorithm on the confusion matrix, square-padded).
double acc(const Labels& pred, const Labels& truth);

// Normalized mutual information with geometric-mean normalization. Returns 1
// when both sides are the same single-cluster partition, 0 when either
// entropy is zero and the partitions differ.
double nmi(const Labels& pred, const Labels& truth);

// Adjusted Rand index (pair-counting form).
double ari(const Labels& pred, const Labels& truth);

// Minimum-cost assignment for a square cost matrix; returns column index per
// row. O(n^3) shortest augmenting path. Exposed for tests.
std::vector<Index> hungarian(const MatrixRef& cost);

}  // namespace senet::metrics
