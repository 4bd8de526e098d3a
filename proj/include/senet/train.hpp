#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "senet/mlp.hpp"
#include "senet/model.hpp"
#include "senet/objective.hpp"
#include "senet/rng.hpp"
#include "senet/types.hpp"

namespace senet::train {

enum class Algorithm { Naive, TwoPass };

struct TrainConfig {
  int iterations{500};
  int batch_size{100};
  double learning_rate{1e-3};
  double lr_min{0.0};
  double clip_norm{1.0};
  Index block{1024};  // columns per block in the two-pass data sweeps
  std::uint64_t seed{0};
  Algorithm algorithm{Algorithm::Naive};
  bool train_threshold{true};  // false freezes b at its initial value
  int log_every{10};
};

void validate(const TrainConfig& cfg);

// Gradient (or moment) container shaped like SENetParams.
struct SENetGrads {
  mlp::MlpGrads query;
  mlp::MlpGrads key;
  double threshold{0.0};

  static SENetGrads zeros_like(const model::SENetParams& params);
  void set_zero();
  double squared_norm() const;
  void scale(double factor);
};

struct AdamState {
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEpsilon = 1e-8;

  SENetGrads m;
  SENetGrads v;
  long step{0};

  static AdamState zeros_like(const model::SENetParams& params);
};

// eta_min + (eta_max - eta_min) * (1 + cos(pi t / T)) / 2.
double cosine_lr(int t, int total, double eta_max, double eta_min);

// Rescales to global l2 norm exactly clip_norm when above it; returns the
// pre-clip norm.
double clip_gradient(SENetGrads& grads, double clip_norm);

// Standard Adam update with bias correction; the threshold is clamped to
// b >= 0 afterwards.
void adam_step(model::SENetParams& params, const SENetGrads& grads, AdamState& state,
               double lr);

// Named working buffers registered by the gradient routines; all buffers are
// allocated up front and live for the whole call, so the peak equals the sum.
struct AllocationStats {
  std::vector<std::pair<std::string, std::size_t>> buffers;

  void track(std::string name, std::size_t bytes) {
    buffers.emplace_back(std::move(name), bytes);
  }
  std::size_t peak_bytes() const;
};

// Mean gradient of the per-point objective over the sampled batch, with the
// matching loss decomposition (also batch means).
struct BatchGradient {
  SENetGrads grads;
  double loss{0.0};
  double rec{0.0};
  double reg{0.0};
};

// Full-data reverse mode: embeds every column per step and backpropagates
// through the whole coefficient row at once.
BatchGradient batch_gradient_naive(const model::SENetParams& params, const MatrixRef& X,
                                   const std::vector<Index>& batch,
                                   const objective::HyperParams& hyper,
                                   AllocationStats* stats = nullptr);

// Two-pass accumulation: a forward-only sweep forms the residuals q_j, then a
// second sweep accumulates the weighted coefficient gradients block by block.
// Working memory depends on (D, p, widths, block, batch) but not on N.
BatchGradient batch_gradient_two_pass(const model::SENetParams& params, const MatrixRef& X,
                                      const std::vector<Index>& batch,
                                      const objective::HyperParams& hyper, Index block,
                                      AllocationStats* stats = nullptr);

// Uniform batch without replacement (Floyd's algorithm, O(batch) space).
std::vector<Index> sample_batch(Index n, Index count, Rng& rng);

struct LossRow {
  int iteration{0};
  double lr{0.0};
  double loss{0.0};
  double rec{0.0};
  double reg{0.0};
};

struct TrainResult {
  model::SENetParams params;
  std::vector<LossRow> history;  // one row per iteration (batch means)
  AllocationStats workspace;
};

// SGD loop shared by both algorithms: sample batch, gradient, clip, Adam
// update with cosine-annealed lr. `init` supplies the architecture and the
// starting point.
TrainResult train_naive(const MatrixRef& X, const objective::HyperParams& hyper,
                        const TrainConfig& cfg, model::SENetParams init);
TrainResult train_two_pass(const MatrixRef& X, const objective::HyperParams& hyper,
                           const TrainConfig& cfg, model::SENetParams init);
TrainResult train(const MatrixRef& X, const objective::HyperParams& hyper,
                  const TrainConfig& cfg, model::SENetParams init);

// CSV history: iteration, lr, L, L_rec, L_reg, one row per log interval
// (first and last iterations always included).
void write_history_csv(const std::filesystem::path& path, const std::vector<LossRow>& history,
                       int log_every);

}  // namespace senet::train
