#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "senet/mlp.hpp"
#include "senet/objective.hpp"
#include "senet/types.hpp"

namespace senet::model {

// Self-expressive coefficient model: f(x_i, x_j) = alpha * T_b(u_j . v_i)
// with query network u and key network v mapping R^D -> R^p. alpha is fixed
// at 1/p; the threshold b is trainable and clamped to b >= 0.
struct SENetParams {
  mlp::MlpParams query_net;  // u(., theta_u), applied to the expressed point x_j
  mlp::MlpParams key_net;    // v(., theta_v), applied to the expressing points x_i
  double threshold{0.0};
  double alpha{0.0};

  Index input_dim() const { return query_net.input_dim(); }
  Index embed_dim() const { return query_net.output_dim(); }
  std::vector<Index> hidden_dims() const;
};

// Queries and keys use the same architecture; seeds for the two nets are
// derived from `seed`. b starts at 0 so the initial coefficient map is dense.
SENetParams make_senet(Index input_dim, const std::vector<Index>& hidden_dims, Index embed_dim,
                       std::uint64_t seed);

void validate(const SENetParams& params);

// T_b(t) = sgn(t) * max(0, |t| - b).
template <class Scalar>
inline Scalar soft_threshold(Scalar t, Scalar b) {
  const Scalar shrunk = std::abs(t) - b;
  if (shrunk <= Scalar(0)) return Scalar(0);
  return t > Scalar(0) ? shrunk : -shrunk;
}

struct CoeffEval {
  double value{0.0};
  double pre_threshold{0.0};  // u_j . v_i before T_b
  mlp::MlpTape query_tape;
  mlp::MlpTape key_tape;
};

// Single-pair coefficient f(x_i, x_j); tapes are retained for backprop.
CoeffEval coeff(const SENetParams& params, const VectorRef& x_i, const VectorRef& x_j);

// N x N coefficient matrix with zero diagonal: C(i, j) = f(x_i, x_j).
// Embeds every column once through the same per-column kernel as coeff(), so
// entries are bit-identical to the pairwise evaluations. `block` tiles the
// inner-product loop; `threads` workers split the columns (disjoint writes,
// result independent of thread count).
Matrix coeff_matrix(const SENetParams& params, const MatrixRef& X, Index block = 1024,
                    int threads = 1);

// Checkpoint = architecture + hyper-parameters + all tensors, bit-exact.
void save_checkpoint(const SENetParams& params, const objective::HyperParams& hyper,
                     const std::filesystem::path& path);
std::pair<SENetParams, objective::HyperParams> load_checkpoint(
    const std::filesystem::path& path);

}  // namespace senet::model
