#pragma once

#include <cstdint>
#include <optional>

#include "senet/metrics.hpp"
#include "senet/spectral.hpp"
#include "senet/types.hpp"

namespace senet::experiments {

struct EvalOptions {
  Index k{0};  // number of clusters
  spectral::AffinityOptions affinity{};
  Index embed_dim{0};  // 0 means k
  std::uint64_t seed{0};
  int restarts{10};
  double degree_regularization{0.0};
};

// Scores a coefficient matrix against ground truth: SRE, CONN on the induced
// affinity, then spectral clustering for ACC/NMI/ARI. Losses are filled when
// the data matrix is supplied.
metrics::MetricsReport evaluate_coefficients(const MatrixRef& C, const Labels& truth,
                                             const EvalOptions& opts,
                                             const Matrix* X = nullptr,
                                             const objective::HyperParams* hyper = nullptr);

}  // namespace senet::experiments
