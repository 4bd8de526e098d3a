#include "senet/mlp.hpp"

#include <cmath>
#include <string>

#include "senet/errors.hpp"
#include "senet/rng.hpp"

namespace senet::mlp {

namespace {

void check_input_dim(const MlpParams& params, Index got) {
  if (got != params.input_dim()) {
    throw DimensionMismatch("mlp: input has dimension " + std::to_string(got) + ", expected " +
                            std::to_string(params.input_dim()));
  }
}

double apply_output(double z, Activation act) {
  return act == Activation::Tanh ? std::tanh(z) : z;
}

// Derivative of the output activation from the stored activation value.
double output_deriv(double y, Activation act) {
  return act == Activation::Tanh ? 1.0 - y * y : 1.0;
}

}  // namespace

MlpGrads MlpGrads::zeros_like(const MlpParams& params) {
  MlpGrads g;
  g.weights.reserve(params.weights.size());
  g.biases.reserve(params.biases.size());
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    g.weights.push_back(Matrix::Zero(params.weights[l].rows(), params.weights[l].cols()));
    g.biases.push_back(Vector::Zero(params.biases[l].size()));
  }
  return g;
}

void MlpGrads::set_zero() {
  for (auto& W : weights) W.setZero();
  for (auto& b : biases) b.setZero();
}

MlpParams init(const std::vector<Index>& dims, std::uint64_t seed) {
  if (dims.size() < 2) {
    throw InvalidSpec("mlp::init: need at least input and output dimensions, got " +
                      std::to_string(dims.size()));
  }
  for (Index d : dims) {
    if (d < 1) throw InvalidSpec("mlp::init: all layer dimensions must be >= 1");
  }
  Rng rng(seed);
  MlpParams params;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const Index fan_in = dims[l];
    const Index fan_out = dims[l + 1];
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Matrix W(fan_out, fan_in);
    for (Index j = 0; j < fan_in; ++j) {
      for (Index i = 0; i < fan_out; ++i) W(i, j) = stddev * rng.gaussian();
    }
    params.weights.push_back(std::move(W));
    params.biases.push_back(Vector::Zero(fan_out));
  }
  return params;
}

std::pair<Vector, MlpTape> forward(const MlpParams& params, const VectorRef& x) {
  check_input_dim(params, x.size());
  const Index L = params.num_layers();
  MlpTape tape;
  tape.pre.resize(static_cast<std::size_t>(L));
  tape.act.resize(static_cast<std::size_t>(L) + 1);
  tape.act[0] = x;
  for (Index l = 0; l < L; ++l) {
    const auto li = static_cast<std::size_t>(l);
    Vector& z = tape.pre[li];
    z.noalias() = params.weights[li] * tape.act[li];
    z += params.biases[li];
    if (l + 1 < L) {
      tape.act[li + 1] = z.cwiseMax(0.0);
    } else {
      tape.act[li + 1] = z.unaryExpr(
          [act = params.output_activation](double v) { return apply_output(v, act); });
    }
  }
  return {tape.act.back(), tape};
}

std::pair<MlpGrads, Vector> backward(const MlpParams& params, const MlpTape& tape,
                                     const VectorRef& dy) {
  const Index L = params.num_layers();
  if (tape.pre.size() != static_cast<std::size_t>(L)) {
    throw DimensionMismatch("mlp::backward: tape has " + std::to_string(tape.pre.size()) +
                            " layers, expected " + std::to_string(L));
  }
  if (dy.size() != params.output_dim()) {
    throw DimensionMismatch("mlp::backward: dy has dimension " + std::to_string(dy.size()) +
                            ", expected " + std::to_string(params.output_dim()));
  }
  MlpGrads grads = MlpGrads::zeros_like(params);
  const auto Li = static_cast<std::size_t>(L);
  Vector delta = dy.cwiseProduct(tape.act[Li].unaryExpr(
      [act = params.output_activation](double y) { return output_deriv(y, act); }));
  for (Index l = L - 1; l >= 0; --l) {
    const auto li = static_cast<std::size_t>(l);
    grads.weights[li].noalias() = delta * tape.act[li].transpose();
    grads.biases[li] = delta;
    if (l > 0) {
      Vector da = params.weights[li].transpose() * delta;
      // ReLU subgradient at exactly 0 taken as 0.
      delta = da.cwiseProduct(
          tape.pre[li - 1].unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; }));
    } else {
      delta = params.weights[0].transpose() * delta;
    }
  }
  return {std::move(grads), std::move(delta)};
}

void forward_batch(const MlpParams& params, const MatrixRef& X, BatchTape& tape) {
  check_input_dim(params, X.rows());
  const Index L = params.num_layers();
  tape.pre.resize(static_cast<std::size_t>(L));
  tape.act.resize(static_cast<std::size_t>(L) + 1);
  tape.act[0] = X;
  for (Index l = 0; l < L; ++l) {
    const auto li = static_cast<std::size_t>(l);
    Matrix& Z = tape.pre[li];
    Z.noalias() = params.weights[li] * tape.act[li];
    Z.colwise() += params.biases[li];
    if (l + 1 < L) {
      tape.act[li + 1] = Z.cwiseMax(0.0);
    } else {
      tape.act[li + 1] = Z.unaryExpr(
          [act = params.output_activation](double v) { return apply_output(v, act); });
    }
  }
}

void backward_batch(const MlpParams& params, const BatchTape& tape, const MatrixRef& dY,
                    MlpGrads& grads, BackwardWorkspace& ws) {
  const Index L = params.num_layers();
  if (tape.pre.size() != static_cast<std::size_t>(L)) {
    throw DimensionMismatch("mlp::backward_batch: tape/param layer mismatch");
  }
  ws.delta.resize(static_cast<std::size_t>(L));
  const auto Li = static_cast<std::size_t>(L);
  ws.delta[Li - 1] = dY.cwiseProduct(tape.act[Li].unaryExpr(
      [act = params.output_activation](double y) { return output_deriv(y, act); }));
  for (Index l = L - 1; l >= 0; --l) {
    const auto li = static_cast<std::size_t>(l);
    grads.weights[li].noalias() += ws.delta[li] * tape.act[li].transpose();
    grads.biases[li] += ws.delta[li].rowwise().sum();
    if (l > 0) {
      ws.delta[li - 1].noalias() = params.weights[li].transpose() * ws.delta[li];
      ws.delta[li - 1] = ws.delta[li - 1].cwiseProduct(
          tape.pre[li - 1].unaryExpr([](double z) { return z > 0.0 ? 1.0 : 0.0; }));
    }
  }
}

std::size_t tape_bytes(const MlpParams& params, Index cols) {
  std::size_t doubles = static_cast<std::size_t>(params.input_dim()) *
                        static_cast<std::size_t>(cols);
  for (const auto& W : params.weights) {
    // one pre-activation and one activation matrix per layer
    doubles += 2 * static_cast<std::size_t>(W.rows()) * static_cast<std::size_t>(cols);
  }
  return doubles * sizeof(double);
}

std::size_t workspace_bytes(const MlpParams& params, Index cols) {
  std::size_t doubles = 0;
  for (const auto& W : params.weights) {
    doubles += static_cast<std::size_t>(W.rows()) * static_cast<std::size_t>(cols);
  }
  return doubles * sizeof(double);
}

std::size_t param_bytes(const MlpParams& params) {
  std::size_t doubles = 0;
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    doubles += static_cast<std::size_t>(params.weights[l].size()) +
               static_cast<std::size_t>(params.biases[l].size());
  }
  return doubles * sizeof(double);
}

}  // namespace senet::mlp
