#include "senet/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <utility>

#include "senet/errors.hpp"

namespace senet::train {

void validate(const TrainConfig& cfg) {
  if (cfg.iterations < 0) throw InvalidSpec("train: iterations must be >= 0");
  if (cfg.batch_size < 1) throw InvalidSpec("train: batch_size must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw InvalidSpec("train: learning_rate must be > 0");
  if (cfg.lr_min < 0.0) throw InvalidSpec("train: lr_min must be >= 0");
  if (!(cfg.clip_norm > 0.0)) throw InvalidSpec("train: clip_norm must be > 0");
  if (cfg.block < 1) throw InvalidSpec("train: block must be >= 1");
  if (cfg.log_every < 1) throw InvalidSpec("train: log_every must be >= 1");
}

SENetGrads SENetGrads::zeros_like(const model::SENetParams& params) {
  SENetGrads g;
  g.query = mlp::MlpGrads::zeros_like(params.query_net);
  g.key = mlp::MlpGrads::zeros_like(params.key_net);
  g.threshold = 0.0;
  return g;
}

void SENetGrads::set_zero() {
  query.set_zero();
  key.set_zero();
  threshold = 0.0;
}

double SENetGrads::squared_norm() const {
  double total = threshold * threshold;
  for (const auto& net : {&query, &key}) {
    for (const auto& W : net->weights) total += W.squaredNorm();
    for (const auto& b : net->biases) total += b.squaredNorm();
  }
  return total;
}

void SENetGrads::scale(double factor) {
  for (auto* net : {&query, &key}) {
    for (auto& W : net->weights) W *= factor;
    for (auto& b : net->biases) b *= factor;
  }
  threshold *= factor;
}

AdamState AdamState::zeros_like(const model::SENetParams& params) {
  AdamState state;
  state.m = SENetGrads::zeros_like(params);
  state.v = SENetGrads::zeros_like(params);
  state.step = 0;
  return state;
}

double cosine_lr(int t, int total, double eta_max, double eta_min) {
  if (total <= 0) return eta_max;
  const double phase = M_PI * static_cast<double>(t) / static_cast<double>(total);
  return eta_min + 0.5 * (eta_max - eta_min) * (1.0 + std::cos(phase));
}

double clip_gradient(SENetGrads& grads, double clip_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > clip_norm) grads.scale(clip_norm / norm);
  return norm;
}

namespace {

void check_same_shape(const mlp::MlpGrads& a, const mlp::MlpGrads& b) {
  if (a.weights.size() != b.weights.size()) {
    throw DimensionMismatch("adam_step: layer count mismatch");
  }
  for (std::size_t l = 0; l < a.weights.size(); ++l) {
    if (a.weights[l].rows() != b.weights[l].rows() ||
        a.weights[l].cols() != b.weights[l].cols() ||
        a.biases[l].size() != b.biases[l].size()) {
      throw DimensionMismatch("adam_step: tensor shape mismatch at layer " + std::to_string(l));
    }
  }
}

}  // namespace

void adam_step(model::SENetParams& params, const SENetGrads& grads, AdamState& state,
               double lr) {
  check_same_shape(grads.query, state.m.query);
  check_same_shape(grads.key, state.m.key);
  state.step += 1;
  const double bc1 = 1.0 - std::pow(AdamState::kBeta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(AdamState::kBeta2, static_cast<double>(state.step));

  auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m.array() = AdamState::kBeta1 * m.array() + (1.0 - AdamState::kBeta1) * g.array();
    v.array() = AdamState::kBeta2 * v.array() + (1.0 - AdamState::kBeta2) * g.array().square();
    theta.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + AdamState::kEpsilon);
  };
  for (std::size_t l = 0; l < params.query_net.weights.size(); ++l) {
    update(params.query_net.weights[l], grads.query.weights[l], state.m.query.weights[l],
           state.v.query.weights[l]);
    update(params.query_net.biases[l], grads.query.biases[l], state.m.query.biases[l],
           state.v.query.biases[l]);
  }
  for (std::size_t l = 0; l < params.key_net.weights.size(); ++l) {
    update(params.key_net.weights[l], grads.key.weights[l], state.m.key.weights[l],
           state.v.key.weights[l]);
    update(params.key_net.biases[l], grads.key.biases[l], state.m.key.biases[l],
           state.v.key.biases[l]);
  }
  double& mb = state.m.threshold;
  double& vb = state.v.threshold;
  mb = AdamState::kBeta1 * mb + (1.0 - AdamState::kBeta1) * grads.threshold;
  vb = AdamState::kBeta2 * vb + (1.0 - AdamState::kBeta2) * grads.threshold * grads.threshold;
  params.threshold -= lr * (mb / bc1) / (std::sqrt(vb / bc2) + AdamState::kEpsilon);
  if (params.threshold < 0.0) params.threshold = 0.0;
}

std::size_t AllocationStats::peak_bytes() const {
  std::size_t total = 0;
  for (const auto& [name, bytes] : buffers) total += bytes;
  return total;
}

std::vector<Index> sample_batch(Index n, Index count, Rng& rng) {
  if (count > n) {
    throw InvalidSpec("sample_batch: count " + std::to_string(count) + " exceeds population " +
                      std::to_string(n));
  }
  std::vector<Index> chosen;
  chosen.reserve(static_cast<std::size_t>(count));
  for (Index t = n - count; t < n; ++t) {
    const Index idx = rng.uniform_int(t + 1);
    if (std::find(chosen.begin(), chosen.end(), idx) != chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(idx);
    }
  }
  return chosen;
}

namespace {

// All working buffers of one gradient evaluation. Everything is allocated at
// plan() shapes and reused across iterations, so the registered sizes are the
// true peak.
struct Workspace {
  Matrix batch_cols;  // D x B gather of the sampled columns
  mlp::BatchTape query_tape;
  mlp::BatchTape key_tape;
  mlp::BackwardWorkspace query_ws;
  mlp::BackwardWorkspace key_ws;
  Matrix inner;   // cols_i x B pre-threshold inner products
  Matrix coeffs;  // cols_i x B thresholded coefficients
  Matrix weight;  // cols_i x B Eq-weight / cotangent scratch
  Matrix xbar;    // D x B reconstruction, then residual
  Matrix q;       // D x B scaled residuals
  Matrix du;      // p x B query cotangents
  Matrix dv;      // p x cols_i key cotangents
  Vector reg_acc;  // per-point regularizer sums
  AllocationStats stats;

  void plan(const model::SENetParams& params, Index D, Index B, Index cols_i,
            const char* key_scope) {
    const Index p = params.embed_dim();
    auto mat = [](Index r, Index c) {
      return static_cast<std::size_t>(r) * static_cast<std::size_t>(c) * sizeof(double);
    };
    stats.track("batch_columns", mat(D, B));
    stats.track("query_tape", mlp::tape_bytes(params.query_net, B));
    stats.track("query_backward", mlp::workspace_bytes(params.query_net, B));
    stats.track(std::string("key_tape_") + key_scope, mlp::tape_bytes(params.key_net, cols_i));
    stats.track(std::string("key_backward_") + key_scope,
                mlp::workspace_bytes(params.key_net, cols_i));
    stats.track("inner_products", mat(cols_i, B));
    stats.track("coefficients", mat(cols_i, B));
    stats.track("eq_weights", mat(cols_i, B));
    stats.track("reconstruction", mat(D, B));
    stats.track("residuals", mat(D, B));
    stats.track("query_cotangent", mat(p, B));
    stats.track("key_cotangent", mat(p, cols_i));
    stats.track("reg_accumulator", mat(B, 1));
    stats.track("batch_indices", static_cast<std::size_t>(B) * sizeof(Index));
  }
};

struct LossParts {
  double loss{0.0};
  double rec{0.0};
  double reg{0.0};
};

// Thresholded coefficients for one block of pre-threshold inner products;
// the self-pair entry of each batch column is forced to zero.
void threshold_block(const Matrix& inner, Index rows, Index row_offset,
                     const std::vector<Index>& batch, double alpha, double b, Matrix& coeffs) {
  const auto B = static_cast<Index>(batch.size());
  for (Index bi = 0; bi < B; ++bi) {
    for (Index i = 0; i < rows; ++i) {
      coeffs(i, bi) = row_offset + i == batch[static_cast<std::size_t>(bi)]
                          ? 0.0
                          : alpha * model::soft_threshold(inner(i, bi), b);
    }
  }
}

// Converts `weight` (holding -<x_i, q_j>) into the scaled backprop weights
// S = (1/B) * alpha * (r'(f) - <x_i, q_j>) * gate, returning the raw
// threshold-gradient sum over the block.
double weight_block(const Matrix& inner, const Matrix& coeffs, Index rows, Index row_offset,
                    const std::vector<Index>& batch, double alpha, double b, double lambda,
                    double inv_batch, Matrix& weight) {
  const auto B = static_cast<Index>(batch.size());
  double db_raw = 0.0;
  for (Index bi = 0; bi < B; ++bi) {
    for (Index i = 0; i < rows; ++i) {
      const double t = inner(i, bi);
      const bool self = row_offset + i == batch[static_cast<std::size_t>(bi)];
      if (self || std::abs(t) <= b) {
        weight(i, bi) = 0.0;
        continue;
      }
      const double g = objective::elastic_net_deriv(coeffs(i, bi), lambda) + weight(i, bi);
      db_raw += t > 0.0 ? -g : g;
      weight(i, bi) = inv_batch * alpha * g;
    }
  }
  return db_raw;
}

void gather_batch(const MatrixRef& X, const std::vector<Index>& batch, Matrix& out) {
  out.resize(X.rows(), static_cast<Index>(batch.size()));
  for (std::size_t bi = 0; bi < batch.size(); ++bi) {
    out.col(static_cast<Index>(bi)) = X.col(batch[bi]);
  }
}

LossParts compute_naive(const model::SENetParams& params, const MatrixRef& X,
                        const std::vector<Index>& batch, const objective::HyperParams& hyper,
                        bool train_threshold, Workspace& ws, SENetGrads& grads) {
  const Index N = X.cols();
  const auto B = static_cast<Index>(batch.size());
  const double inv_batch = 1.0 / static_cast<double>(B);
  const double alpha = params.alpha;
  const double b = params.threshold;

  gather_batch(X, batch, ws.batch_cols);
  mlp::forward_batch(params.query_net, ws.batch_cols, ws.query_tape);
  const Matrix& U = ws.query_tape.act.back();
  mlp::forward_batch(params.key_net, X, ws.key_tape);
  const Matrix& V = ws.key_tape.act.back();

  ws.inner.noalias() = V.transpose() * U;
  threshold_block(ws.inner, N, 0, batch, alpha, b, ws.coeffs);

  ws.xbar.noalias() = X * ws.coeffs;
  ws.xbar = ws.batch_cols - ws.xbar;  // residual before scaling
  LossParts parts;
  for (Index bi = 0; bi < B; ++bi) {
    const double rec = ws.xbar.col(bi).squaredNorm();
    double reg_sum = 0.0;
    for (Index i = 0; i < N; ++i) {
      reg_sum += objective::elastic_net(ws.coeffs(i, bi), hyper.lambda);
    }
    parts.rec += rec;
    parts.reg += reg_sum;
    parts.loss += 0.5 * hyper.gamma * rec + reg_sum;
  }
  parts.rec *= inv_batch;
  parts.reg *= inv_batch;
  parts.loss *= inv_batch;

  ws.q = hyper.gamma * ws.xbar;
  ws.weight.noalias() = -(X.transpose() * ws.q);
  const double db_raw =
      weight_block(ws.inner, ws.coeffs, N, 0, batch, alpha, b, hyper.lambda, inv_batch,
                   ws.weight);

  ws.du.noalias() = V * ws.weight;
  ws.dv.noalias() = U * ws.weight.transpose();

  grads.set_zero();
  mlp::backward_batch(params.key_net, ws.key_tape, ws.dv, grads.key, ws.key_ws);
  mlp::backward_batch(params.query_net, ws.query_tape, ws.du, grads.query, ws.query_ws);
  grads.threshold = train_threshold ? inv_batch * alpha * db_raw : 0.0;
  return parts;
}

LossParts compute_two_pass(const model::SENetParams& params, const MatrixRef& X,
                           const std::vector<Index>& batch,
                           const objective::HyperParams& hyper, Index block,
                           bool train_threshold, Workspace& ws, SENetGrads& grads) {
  const Index D = X.rows();
  const Index N = X.cols();
  const auto B = static_cast<Index>(batch.size());
  const Index blk = std::min(block, N);
  const double inv_batch = 1.0 / static_cast<double>(B);
  const double alpha = params.alpha;
  const double b = params.threshold;

  gather_batch(X, batch, ws.batch_cols);
  mlp::forward_batch(params.query_net, ws.batch_cols, ws.query_tape);
  const Matrix& U = ws.query_tape.act.back();

  // First pass (forward only): accumulate xbar_j = sum_i f_ij x_i blockwise.
  ws.xbar.setZero(D, B);
  ws.reg_acc.setZero(B);
  for (Index s = 0; s < N; s += blk) {
    const Index bn = std::min(blk, N - s);
    mlp::forward_batch(params.key_net, X.middleCols(s, bn), ws.key_tape);
    const Matrix& Vb = ws.key_tape.act.back();
    ws.inner.topRows(bn).noalias() = Vb.transpose() * U;
    threshold_block(ws.inner, bn, s, batch, alpha, b, ws.coeffs);
    ws.xbar.noalias() += X.middleCols(s, bn) * ws.coeffs.topRows(bn);
    for (Index bi = 0; bi < B; ++bi) {
      for (Index i = 0; i < bn; ++i) {
        ws.reg_acc[bi] += objective::elastic_net(ws.coeffs(i, bi), hyper.lambda);
      }
    }
  }
  ws.xbar = ws.batch_cols - ws.xbar;
  LossParts parts;
  for (Index bi = 0; bi < B; ++bi) {
    const double rec = ws.xbar.col(bi).squaredNorm();
    parts.rec += rec;
    parts.reg += ws.reg_acc[bi];
    parts.loss += 0.5 * hyper.gamma * rec + ws.reg_acc[bi];
  }
  parts.rec *= inv_batch;
  parts.reg *= inv_batch;
  parts.loss *= inv_batch;
  ws.q = hyper.gamma * ws.xbar;

  // Second pass: accumulate the weighted coefficient gradients blockwise.
  grads.set_zero();
  ws.du.setZero(params.embed_dim(), B);
  double db_raw = 0.0;
  for (Index s = 0; s < N; s += blk) {
    const Index bn = std::min(blk, N - s);
    mlp::forward_batch(params.key_net, X.middleCols(s, bn), ws.key_tape);
    const Matrix& Vb = ws.key_tape.act.back();
    ws.inner.topRows(bn).noalias() = Vb.transpose() * U;
    threshold_block(ws.inner, bn, s, batch, alpha, b, ws.coeffs);
    ws.weight.topRows(bn).noalias() = -(X.middleCols(s, bn).transpose() * ws.q);
    db_raw += weight_block(ws.inner, ws.coeffs, bn, s, batch, alpha, b, hyper.lambda,
                           inv_batch, ws.weight);
    ws.du.noalias() += Vb * ws.weight.topRows(bn);
    ws.dv.leftCols(bn).noalias() = U * ws.weight.topRows(bn).transpose();
    mlp::backward_batch(params.key_net, ws.key_tape, ws.dv.leftCols(bn), grads.key, ws.key_ws);
  }
  mlp::backward_batch(params.query_net, ws.query_tape, ws.du, grads.query, ws.query_ws);
  grads.threshold = train_threshold ? inv_batch * alpha * db_raw : 0.0;
  return parts;
}

void preallocate(Workspace& ws, const model::SENetParams& params, Index D, Index B,
                 Index cols_i) {
  const Index p = params.embed_dim();
  ws.inner.resize(cols_i, B);
  ws.coeffs.resize(cols_i, B);
  ws.weight.resize(cols_i, B);
  ws.xbar.resize(D, B);
  ws.q.resize(D, B);
  ws.du.resize(p, B);
  ws.dv.resize(p, cols_i);
  ws.reg_acc.resize(B);
}

TrainResult run_training(const MatrixRef& X, const objective::HyperParams& hyper,
                         const TrainConfig& cfg, model::SENetParams init, Algorithm alg) {
  validate(cfg);
  objective::validate(hyper);
  model::validate(init);
  if (X.rows() != init.input_dim()) {
    throw InvalidSpec("train: data dimension " + std::to_string(X.rows()) +
                      " does not match network input " + std::to_string(init.input_dim()));
  }
  const Index N = X.cols();
  const Index B = std::min<Index>(cfg.batch_size, N);
  const Index cols_i = alg == Algorithm::Naive ? N : std::min(cfg.block, N);

  TrainResult result;
  result.params = std::move(init);
  result.history.reserve(static_cast<std::size_t>(cfg.iterations));

  Workspace ws;
  ws.plan(result.params, X.rows(), B, cols_i, alg == Algorithm::Naive ? "full" : "block");
  preallocate(ws, result.params, X.rows(), B, cols_i);
  SENetGrads grads = SENetGrads::zeros_like(result.params);
  AdamState adam = AdamState::zeros_like(result.params);
  const std::size_t pbytes = mlp::param_bytes(result.params.query_net) +
                             mlp::param_bytes(result.params.key_net) + sizeof(double);
  ws.stats.track("gradients", pbytes);
  ws.stats.track("adam_moments", 2 * pbytes);

  Rng rng(derive_seed(cfg.seed, 0xBA7C4));
  for (int t = 0; t < cfg.iterations; ++t) {
    const std::vector<Index> batch = sample_batch(N, B, rng);
    LossParts parts;
    if (alg == Algorithm::Naive) {
      parts = compute_naive(result.params, X, batch, hyper, cfg.train_threshold, ws, grads);
    } else {
      parts = compute_two_pass(result.params, X, batch, hyper, cfg.block, cfg.train_threshold,
                               ws, grads);
    }
    clip_gradient(grads, cfg.clip_norm);
    const double lr = cosine_lr(t, cfg.iterations, cfg.learning_rate, cfg.lr_min);
    adam_step(result.params, grads, adam, lr);
    result.history.push_back({t + 1, lr, parts.loss, parts.rec, parts.reg});
  }
  result.workspace = std::move(ws.stats);
  return result;
}

}  // namespace

BatchGradient batch_gradient_naive(const model::SENetParams& params, const MatrixRef& X,
                                   const std::vector<Index>& batch,
                                   const objective::HyperParams& hyper,
                                   AllocationStats* stats) {
  Workspace ws;
  ws.plan(params, X.rows(), static_cast<Index>(batch.size()), X.cols(), "full");
  preallocate(ws, params, X.rows(), static_cast<Index>(batch.size()), X.cols());
  BatchGradient out;
  out.grads = SENetGrads::zeros_like(params);
  const LossParts parts = compute_naive(params, X, batch, hyper, true, ws, out.grads);
  out.loss = parts.loss;
  out.rec = parts.rec;
  out.reg = parts.reg;
  if (stats != nullptr) *stats = std::move(ws.stats);
  return out;
}

BatchGradient batch_gradient_two_pass(const model::SENetParams& params, const MatrixRef& X,
                                      const std::vector<Index>& batch,
                                      const objective::HyperParams& hyper, Index block,
                                      AllocationStats* stats) {
  Workspace ws;
  const Index blk = std::min(block, X.cols());
  ws.plan(params, X.rows(), static_cast<Index>(batch.size()), blk, "block");
  preallocate(ws, params, X.rows(), static_cast<Index>(batch.size()), blk);
  BatchGradient out;
  out.grads = SENetGrads::zeros_like(params);
  const LossParts parts = compute_two_pass(params, X, batch, hyper, block, true, ws, out.grads);
  out.loss = parts.loss;
  out.rec = parts.rec;
  out.reg = parts.reg;
  if (stats != nullptr) *stats = std::move(ws.stats);
  return out;
}

TrainResult train_naive(const MatrixRef& X, const objective::HyperParams& hyper,
                        const TrainConfig& cfg, model::SENetParams init) {
  return run_training(X, hyper, cfg, std::move(init), Algorithm::Naive);
}

TrainResult train_two_pass(const MatrixRef& X, const objective::HyperParams& hyper,
                           const TrainConfig& cfg, model::SENetParams init) {
  return run_training(X, hyper, cfg, std::move(init), Algorithm::TwoPass);
}

TrainResult train(const MatrixRef& X, const objective::HyperParams& hyper,
                  const TrainConfig& cfg, model::SENetParams init) {
  return run_training(X, hyper, cfg, std::move(init), cfg.algorithm);
}

void write_history_csv(const std::filesystem::path& path, const std::vector<LossRow>& history,
                       int log_every) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "iteration,lr,L,L_rec,L_reg\n";
  char buf[160];
  const auto total = static_cast<int>(history.size());
  for (const LossRow& row : history) {
    if (row.iteration % log_every != 0 && row.iteration != 1 && row.iteration != total) {
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g\n", row.iteration, row.lr,
                  row.loss, row.rec, row.reg);
    out << buf;
  }
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace senet::train
