#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "senet/types.hpp"

namespace senet::mlp {

enum class Activation { Tanh, Identity };

// Feed-forward network with ReLU hidden layers. The output layer uses tanh
// (the model default); Identity exists for isolating the linear map in tests.
struct MlpParams {
  std::vector<Matrix> weights;  // out x in per layer
  std::vector<Vector> biases;
  Activation output_activation{Activation::Tanh};

  Index num_layers() const { return static_cast<Index>(weights.size()); }
  Index input_dim() const { return weights.front().cols(); }
  Index output_dim() const { return weights.back().rows(); }
};

// Gradient container shaped like MlpParams.
struct MlpGrads {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static MlpGrads zeros_like(const MlpParams& params);
  void set_zero();
};

// Per-layer pre-activations and activations recorded by a forward pass;
// act[0] holds the input, act[l] the output of layer l.
struct MlpTape {
  std::vector<Vector> pre;
  std::vector<Vector> act;
};

// Column-batched tape: same layout with one column per input point.
struct BatchTape {
  std::vector<Matrix> pre;
  std::vector<Matrix> act;
};

// Reusable workspace for the batched backward pass (per-layer deltas).
struct BackwardWorkspace {
  std::vector<Matrix> delta;
};

// Weights drawn from N(0, 2/fan_in), biases zero. dims = [in, h1, ..., out].
MlpParams init(const std::vector<Index>& dims, std::uint64_t seed);

// y = act_out(W_L(ReLU(... ReLU(W_1 x + b_1) ...)) + b_L). The returned tape
// supports one backward pass.
std::pair<Vector, MlpTape> forward(const MlpParams& params, const VectorRef& x);

// Reverse-mode gradients of <dy, y> w.r.t. all parameters and the input.
// ReLU subgradient at 0 is taken as 0; tanh' computed as 1 - y^2.
std::pair<MlpGrads, Vector> backward(const MlpParams& params, const MlpTape& tape,
                                     const VectorRef& dy);

// Batched variants used by the trainers. forward_batch fills `tape` in place
// (the output lives in tape.act.back()); backward_batch adds the gradient of
// sum_j <dY_j, y_j> into `grads`.
void forward_batch(const MlpParams& params, const MatrixRef& X, BatchTape& tape);
void backward_batch(const MlpParams& params, const BatchTape& tape, const MatrixRef& dY,
                    MlpGrads& grads, BackwardWorkspace& ws);

// Workspace footprints in bytes for a batch of `cols` columns, as allocated
// by the batched passes. Used by the training memory accountant.
std::size_t tape_bytes(const MlpParams& params, Index cols);
std::size_t workspace_bytes(const MlpParams& params, Index cols);
std::size_t param_bytes(const MlpParams& params);

}  // namespace senet::mlp
