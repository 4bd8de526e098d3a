// Acceptance suite: one pass/fail line per criterion, exit code 0 only when
// every criterion holds. Runs on one CPU core in minutes.
#include <Eigen/QR>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "senet/data.hpp"
#include "senet/ensc.hpp"
#include "senet/experiments.hpp"
#include "senet/linalg.hpp"
#include "senet/metrics.hpp"
#include "senet/model.hpp"
#include "senet/objective.hpp"
#include "senet/rng.hpp"
#include "senet/spectral.hpp"
#include "senet/train.hpp"

namespace fs = std::filesystem;
using senet::Index;
using senet::Labels;
using senet::Matrix;
using senet::Rng;
using senet::Vector;
namespace data = senet::data;
namespace ensc = senet::ensc;
namespace experiments = senet::experiments;
namespace metrics = senet::metrics;
namespace model = senet::model;
namespace objective = senet::objective;
namespace spectral = senet::spectral;
namespace train = senet::train;

namespace {

struct Harness {
  int failures = 0;

  void report(int index, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", ok ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
};

std::string fmt(const char* format, ...) {
  char buffer[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

// Shared experiment knobs: the desk-scale architecture used throughout the
// suite (the full-size 1024-wide network is the CLI default, not needed for
// the synthetic-scale checks here).
const std::vector<Index> kHidden{64, 64, 64};
constexpr Index kEmbed = 64;

train::TrainConfig base_train_config(std::uint64_t seed, int iterations) {
  train::TrainConfig cfg;
  cfg.iterations = iterations;
  cfg.batch_size = 100;
  cfg.learning_rate = 1e-3;
  cfg.lr_min = 0.0;
  cfg.clip_norm = 1.0;
  cfg.block = 1024;
  cfg.seed = seed;
  return cfg;
}

experiments::EvalOptions eval_options(Index k, std::uint64_t seed) {
  experiments::EvalOptions opts;
  opts.k = k;
  opts.seed = seed;
  return opts;
}

data::Dataset synthetic(Index D, Index d, Index n, Index per, std::uint64_t seed) {
  data::SyntheticSpec spec;
  spec.ambient_dim = D;
  spec.subspace_dim = d;
  spec.num_subspaces = n;
  spec.points_per_subspace = per;
  spec.seed = seed;
  return data::gen_synthetic(spec);
}

std::vector<double> gradient_values(const train::SENetGrads& grads) {
  std::vector<double> values;
  for (const auto* net : {&grads.query, &grads.key}) {
    for (const auto& W : net->weights) {
      values.insert(values.end(), W.data(), W.data() + W.size());
    }
    for (const auto& b : net->biases) {
      values.insert(values.end(), b.data(), b.data() + b.size());
    }
  }
  values.push_back(grads.threshold);
  return values;
}

std::string file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// --------------------------------------------------------------------------
// 1. Synthetic SENet reproduction
// --------------------------------------------------------------------------
void criterion_1(Harness& h) {
  double sre_sum = 0.0;
  double acc_sum = 0.0;
  const int n_seeds = 3;
  for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
    const data::Dataset ds = synthetic(15, 6, 5, 200, seed);
    auto [tr, te] = data::split(ds, 500, seed + 100);

    const auto result = train::train_naive(
        tr.features, {50.0, 0.9}, base_train_config(seed, 500),
        model::make_senet(15, kHidden, kEmbed, seed + 200));
    const Matrix C = model::coeff_matrix(result.params, tr.features);
    sre_sum += metrics::sre(C, tr.labels);
    const auto report =
        experiments::evaluate_coefficients(C, tr.labels, eval_options(5, seed + 300));
    acc_sum += report.acc;
  }
  const double mean_sre = sre_sum / n_seeds;
  const double mean_acc = acc_sum / n_seeds;
  h.report(1, "synthetic SENet reproduction", mean_sre <= 0.15 && mean_acc >= 0.99,
           fmt("mean train SRE %.4f (<= 0.15), mean train ACC %.4f (>= 0.99)", mean_sre,
               mean_acc));
}

// --------------------------------------------------------------------------
// 2. Table-1 trend: SENet loss tracks EnSC, EnSC SRE decreases with N_i
// --------------------------------------------------------------------------
void criterion_2(Harness& h) {
  const std::vector<Index> sizes{20, 100, 200};
  std::vector<double> ensc_sre;
  std::vector<double> gaps;
  double acc_at_200 = 0.0;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const Index per = sizes[s];
    const data::Dataset ds = synthetic(9, 6, 5, per, 11 + s);

    ensc::SolverConfig scfg;
    scfg.hyper = {50.0, 0.9};
    const Matrix C_ensc = ensc::solve_all(ds.features, scfg, 4);
    const objective::LossBreakdown ensc_loss =
        objective::total_loss(ds.features, C_ensc, scfg.hyper);
    ensc_sre.push_back(metrics::sre(C_ensc, ds.labels));
    if (per == 200) {
      acc_at_200 = experiments::evaluate_coefficients(C_ensc, ds.labels,
                                                      eval_options(5, 17))
                       .acc;
    }

    const auto result = train::train_naive(
        ds.features, scfg.hyper, base_train_config(21 + s, 3000),
        model::make_senet(9, kHidden, kEmbed, 31 + s));
    const Matrix C_senet = model::coeff_matrix(result.params, ds.features);
    const objective::LossBreakdown senet_loss =
        objective::total_loss(ds.features, C_senet, scfg.hyper);
    gaps.push_back(std::abs(senet_loss.total - ensc_loss.total) / ensc_loss.total);
  }
  const bool gaps_ok = gaps[0] <= 0.02 && gaps[1] <= 0.02 && gaps[2] <= 0.02;
  const bool sre_monotone = ensc_sre[0] > ensc_sre[1] && ensc_sre[1] > ensc_sre[2];
  const bool acc_ok = acc_at_200 >= 0.90;
  h.report(2, "Table-1 trend reproduction", gaps_ok && sre_monotone && acc_ok,
           fmt("loss gaps %.4f/%.4f/%.4f (<= 0.02), EnSC SRE %.3f > %.3f > %.3f, "
               "EnSC ACC@200 %.3f (>= 0.90)",
               gaps[0], gaps[1], gaps[2], ensc_sre[0], ensc_sre[1], ensc_sre[2], acc_at_200));
}

// --------------------------------------------------------------------------
// 3. Out-of-sample behaviour and the data-size trend
// --------------------------------------------------------------------------
void criterion_3(Harness& h) {
  const std::vector<Index> train_sizes{100, 300, 500};
  int monotone_seeds = 0;
  bool within_gap = true;
  bool finite_sre = true;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const data::Dataset ds = synthetic(15, 6, 5, 200, 400 + seed);
    auto [pool, test] = data::split(ds, 500, 500 + seed);

    std::vector<double> test_accs;
    double train_acc_at_500 = 0.0;
    for (Index size : train_sizes) {
      data::Dataset tr;
      tr.features = pool.features.leftCols(size);
      tr.labels.assign(pool.labels.begin(), pool.labels.begin() + size);

      const auto result = train::train_naive(
          tr.features, {50.0, 0.9}, base_train_config(seed * 7 + size, 500),
          model::make_senet(15, kHidden, kEmbed, seed * 13 + size));

      const Matrix C_test = model::coeff_matrix(result.params, test.features);
      finite_sre = finite_sre && std::isfinite(metrics::sre(C_test, test.labels));
      const double test_acc =
          experiments::evaluate_coefficients(C_test, test.labels,
                                             eval_options(5, seed * 17 + size))
              .acc;
      test_accs.push_back(test_acc);

      if (size == 500) {
        const Matrix C_train = model::coeff_matrix(result.params, tr.features);
        train_acc_at_500 = experiments::evaluate_coefficients(
                               C_train, tr.labels, eval_options(5, seed * 19))
                               .acc;
        within_gap = within_gap && std::abs(test_acc - train_acc_at_500) <= 0.25;
      }
    }
    // Non-decreasing within a 0.05 noise margin.
    const bool monotone = test_accs[1] >= test_accs[0] - 0.05 &&
                          test_accs[2] >= test_accs[1] - 0.05;
    if (monotone) ++monotone_seeds;
    detail += fmt("seed%llu: %.2f/%.2f/%.2f ", static_cast<unsigned long long>(seed),
                  test_accs[0], test_accs[1], test_accs[2]);
  }
  h.report(3, "out-of-sample property", within_gap && finite_sre && monotone_seeds >= 2,
           detail + fmt("(monotone %d/3 seeds, gap ok %d)", monotone_seeds,
                        within_gap ? 1 : 0));
}

// --------------------------------------------------------------------------
// 4. Algorithm equivalence: gradients, end-to-end parity, memory contract
// --------------------------------------------------------------------------
void criterion_4(Harness& h) {
  // (a) 20 gradient probes on D=10, N=200, p=8.
  Rng rng(904);
  double worst = 0.0;
  for (int probe = 0; probe < 20; ++probe) {
    Matrix X(10, 200);
    for (Index j = 0; j < 200; ++j) {
      for (Index i = 0; i < 10; ++i) X(i, j) = rng.gaussian();
      X.col(j).normalize();
    }
    model::SENetParams params = model::make_senet(10, {16, 16}, 8, rng.engine()());
    params.threshold = 0.02;
    const std::vector<Index> batch{rng.uniform_int(200)};
    const auto a = train::batch_gradient_naive(params, X, batch, {50.0, 0.9});
    const auto b = train::batch_gradient_two_pass(params, X, batch, {50.0, 0.9}, 64);
    const auto va = gradient_values(a.grads);
    const auto vb = gradient_values(b.grads);
    for (std::size_t i = 0; i < va.size(); ++i) {
      const double denom = std::max(std::abs(va[i]), std::abs(vb[i]));
      if (denom > 0.0) worst = std::max(worst, std::abs(va[i] - vb[i]) / denom);
    }
  }
  const bool grads_ok = worst < 1e-10;

  // (b) paired end-to-end runs differ by at most 0.02 in ACC.
  const data::Dataset ds = synthetic(9, 4, 3, 60, 77);
  train::TrainConfig cfg = base_train_config(5, 300);
  cfg.batch_size = 50;
  cfg.block = 64;
  const auto naive_run = train::train_naive(ds.features, {50.0, 0.9}, cfg,
                                            model::make_senet(9, {32, 32}, 16, 9));
  const auto two_pass_run = train::train_two_pass(ds.features, {50.0, 0.9}, cfg,
                                                  model::make_senet(9, {32, 32}, 16, 9));
  const double acc_naive =
      experiments::evaluate_coefficients(
          model::coeff_matrix(naive_run.params, ds.features), ds.labels, eval_options(3, 21))
          .acc;
  const double acc_two_pass =
      experiments::evaluate_coefficients(
          model::coeff_matrix(two_pass_run.params, ds.features), ds.labels,
          eval_options(3, 21))
          .acc;
  const bool acc_ok = std::abs(acc_naive - acc_two_pass) <= 0.02;

  // (c) two-pass peak workspace identical across N at fixed block.
  std::vector<std::size_t> peaks;
  for (Index n : {Index{200}, Index{2000}, Index{20000}}) {
    const data::Dataset mds = synthetic(10, 4, 4, n / 4, 600 + n);
    train::TrainConfig mcfg = base_train_config(3, 1);
    mcfg.batch_size = 50;
    mcfg.block = 100;
    const auto result = train::train_two_pass(mds.features, {50.0, 0.9}, mcfg,
                                              model::make_senet(10, {16, 16}, 8, 5));
    peaks.push_back(result.workspace.peak_bytes());
  }
  const bool memory_ok = peaks[0] == peaks[1] && peaks[1] == peaks[2];

  h.report(4, "algorithm equivalence", grads_ok && acc_ok && memory_ok,
           fmt("max grad rel err %.2e (< 1e-10), ACC %.3f vs %.3f, peaks %zu/%zu/%zu bytes",
               worst, acc_naive, acc_two_pass, peaks[0], peaks[1], peaks[2]));
}

// --------------------------------------------------------------------------
// 5. Gradient correctness against finite differences
// --------------------------------------------------------------------------
void criterion_5(Harness& h) {
  // Full-loss gradient over >= 100 parameter coordinates.
  const Matrix X = [] {
    const data::Dataset ds = synthetic(6, 3, 3, 8, 55);
    return ds.features;
  }();
  model::SENetParams params = model::make_senet(6, {10, 8}, 6, 550);
  params.threshold = 0.05;
  const objective::HyperParams hyper{8.0, 0.9};
  const std::vector<Index> batch{1, 5, 11, 17, 20};

  const auto bg = train::batch_gradient_naive(params, X, batch, hyper);
  const std::vector<double> analytic = gradient_values(bg.grads);

  std::vector<double*> ptrs;
  for (auto* net : {&params.query_net, &params.key_net}) {
    for (auto& W : net->weights) {
      for (Index i = 0; i < W.size(); ++i) ptrs.push_back(W.data() + i);
    }
    for (auto& b : net->biases) {
      for (Index i = 0; i < b.size(); ++i) ptrs.push_back(b.data() + i);
    }
  }
  ptrs.push_back(&params.threshold);

  auto loss_at = [&]() {
    const Matrix C = model::coeff_matrix(params, X);
    double total = 0.0;
    for (Index j : batch) total += objective::point_loss(X, j, C.col(j), hyper);
    return total / static_cast<double>(batch.size());
  };

  const double h_step = 1e-6;
  double worst_full = 0.0;
  int coords = 0;
  const std::size_t stride = ptrs.size() / 128 + 1;
  for (std::size_t i = 0; i < ptrs.size(); i += stride) {
    const double saved = *ptrs[i];
    *ptrs[i] = saved + h_step;
    const double up = loss_at();
    *ptrs[i] = saved - h_step;
    const double down = loss_at();
    *ptrs[i] = saved;
    const double fd = (up - down) / (2.0 * h_step);
    worst_full = std::max(worst_full,
                          std::abs(analytic[i] - fd) / (std::abs(analytic[i]) + 1e-8));
    ++coords;
  }

  // MLP-level check, tighter tolerance.
  Rng rng(56);
  senet::mlp::MlpParams net = senet::mlp::init({5, 16, 12, 3}, 57);
  Vector x(5), dy(3);
  for (Index i = 0; i < 5; ++i) x[i] = rng.gaussian();
  for (Index i = 0; i < 3; ++i) dy[i] = rng.gaussian();
  const auto [y, tape] = senet::mlp::forward(net, x);
  const auto [grads, dx] = senet::mlp::backward(net, tape, dy);
  double worst_mlp = 0.0;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    for (Index i = 0; i < net.weights[l].size(); ++i) {
      double* theta = net.weights[l].data() + i;
      const double saved = *theta;
      *theta = saved + h_step;
      const double up = dy.dot(senet::mlp::forward(net, x).first);
      *theta = saved - h_step;
      const double down = dy.dot(senet::mlp::forward(net, x).first);
      *theta = saved;
      const double fd = (up - down) / (2.0 * h_step);
      const double analytic_value = grads.weights[l].data()[i];
      worst_mlp = std::max(worst_mlp,
                           std::abs(analytic_value - fd) / (std::abs(analytic_value) + 1e-8));
    }
  }

  h.report(5, "gradient correctness", coords >= 100 && worst_full < 1e-4 && worst_mlp < 1e-5,
           fmt("full-loss max rel err %.2e over %d coords (< 1e-4), MLP max rel err %.2e "
               "(< 1e-5)",
               worst_full, coords, worst_mlp));
}

// --------------------------------------------------------------------------
// 6. Oracle correctness: prox, ridge endpoint, monotone ISTA
// --------------------------------------------------------------------------
void criterion_6(Harness& h) {
  // Refining grid search over c for each of 10^3 (z, t, lambda) combinations.
  double worst_prox = 0.0;
  for (int zi = 0; zi < 10; ++zi) {
    for (int ti = 0; ti < 10; ++ti) {
      for (int li = 0; li < 10; ++li) {
        const double z = -3.0 + 6.0 * zi / 9.0;
        const double t = 0.05 + ti * 0.3;
        const double lambda = li / 9.0;
        auto value = [&](double c) {
          return (c - z) * (c - z) / (2.0 * t) + lambda * std::abs(c) +
                 0.5 * (1.0 - lambda) * c * c;
        };
        double lo = -4.0;
        double hi = 4.0;
        double best = 0.0;
        for (int level = 0; level < 6; ++level) {
          double best_val = value(lo);
          best = lo;
          const double step = (hi - lo) / 400.0;
          for (double c = lo; c <= hi; c += step) {
            if (value(c) < best_val) {
              best_val = value(c);
              best = c;
            }
          }
          lo = best - step;
          hi = best + step;
        }
        worst_prox = std::max(worst_prox,
                              std::abs(ensc::prox_elastic_net(z, t, lambda) - best));
      }
    }
  }
  const bool prox_ok = worst_prox <= 1e-6;

  // Ridge endpoint.
  Rng rng(66);
  Matrix X(5, 8);
  for (Index j = 0; j < 8; ++j) {
    for (Index i = 0; i < 5; ++i) X(i, j) = rng.gaussian();
    X.col(j).normalize();
  }
  ensc::SolverConfig rcfg;
  rcfg.hyper = {10.0, 0.0};
  rcfg.tol = 1e-14;
  rcfg.max_iters = 200000;
  const Vector c = ensc::solve_column(X, 2, rcfg);
  Matrix Xm(5, 7);
  Index col = 0;
  for (Index i = 0; i < 8; ++i) {
    if (i != 2) Xm.col(col++) = X.col(i);
  }
  const Vector ridge =
      (rcfg.hyper.gamma * (Xm.transpose() * Xm) + Matrix::Identity(7, 7))
          .colPivHouseholderQr()
          .solve(rcfg.hyper.gamma * (Xm.transpose() * X.col(2)));
  double worst_ridge = 0.0;
  col = 0;
  for (Index i = 0; i < 8; ++i) {
    if (i != 2) worst_ridge = std::max(worst_ridge, std::abs(c[i] - ridge[col++]));
  }
  const bool ridge_ok = worst_ridge <= 1e-6;

  // Objective monotone in the iteration budget on 100 random instances.
  bool monotone = true;
  for (int instance = 0; instance < 100 && monotone; ++instance) {
    Matrix Xi(4, 8);
    for (Index j = 0; j < 8; ++j) {
      for (Index i = 0; i < 4; ++i) Xi(i, j) = rng.gaussian();
      Xi.col(j).normalize();
    }
    ensc::SolverConfig icfg;
    icfg.hyper = {50.0, 0.9};
    icfg.tol = 0.0;
    const Index j = rng.uniform_int(8);
    double previous = objective::point_loss(Xi, j, Vector::Zero(8), icfg.hyper);
    for (int budget = 1; budget <= 12; ++budget) {
      icfg.max_iters = budget;
      const double value =
          objective::point_loss(Xi, j, ensc::solve_column(Xi, j, icfg), icfg.hyper);
      if (value > previous + 1e-12) monotone = false;
      previous = value;
    }
  }

  h.report(6, "oracle correctness", prox_ok && ridge_ok && monotone,
           fmt("prox vs grid %.2e (<= 1e-6), ridge gap %.2e (<= 1e-6), ISTA monotone %s",
               worst_prox, worst_ridge, monotone ? "yes" : "no"));
}

// --------------------------------------------------------------------------
// 7. Metrics unit suite
// --------------------------------------------------------------------------
void criterion_7(Harness& h) {
  bool ok = true;
  std::string detail;

  const Labels truth{0, 0, 1, 1, 2, 2};
  const Labels pred{1, 1, 2, 2, 2, 0};
  const double a = metrics::acc(pred, truth);
  ok = ok && std::abs(a - 5.0 / 6.0) < 1e-12;
  detail += fmt("acc %.4f ", a);

  Matrix K3 = Matrix::Ones(3, 3);
  K3.diagonal().setZero();
  Matrix P3 = Matrix::Zero(3, 3);
  P3(0, 1) = P3(1, 0) = P3(1, 2) = P3(2, 1) = 1.0;
  const Labels one_class{0, 0, 0};
  const double conn_k3 = metrics::conn(K3, one_class);
  const double conn_p3 = metrics::conn(P3, one_class);
  ok = ok && std::abs(conn_k3 - 1.5) <= 1e-10 && std::abs(conn_p3 - 1.0) <= 1e-10;
  detail += fmt("conn(K3) %.10f conn(P3) %.10f ", conn_k3, conn_p3);

  const Labels permuted{2, 2, 0, 0, 1, 1};
  ok = ok && metrics::acc(truth, truth) == 1.0 && metrics::nmi(truth, truth) == 1.0 &&
       metrics::ari(truth, truth) == 1.0;
  ok = ok && metrics::acc(permuted, truth) == 1.0 &&
       std::abs(metrics::nmi(permuted, truth) - 1.0) < 1e-12 &&
       std::abs(metrics::ari(permuted, truth) - 1.0) < 1e-12;

  Matrix C = Matrix::Zero(4, 4);
  C(1, 0) = 0.8;
  C(2, 0) = 0.2;
  const Labels block_labels{0, 0, 1, 1};
  ok = ok && metrics::sre(C, block_labels) == 0.2;
  Matrix C_diag = Matrix::Zero(4, 4);
  C_diag(0, 1) = 1.0;
  C_diag(1, 0) = 0.5;
  ok = ok && metrics::sre(C_diag, block_labels) == 0.0;

  h.report(7, "metrics unit suite", ok, detail + "identity/permutation/sre cases exact");
}

// --------------------------------------------------------------------------
// 8. Soft-threshold ablation direction
// --------------------------------------------------------------------------
void criterion_8(Harness& h) {
  double with_sum = 0.0;
  double without_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const data::Dataset ds = synthetic(15, 6, 5, 200, 800 + seed);
    auto [tr, te] = data::split(ds, 500, 810 + seed);
    for (bool with_threshold : {true, false}) {
      train::TrainConfig cfg = base_train_config(820 + seed, 500);
      cfg.train_threshold = with_threshold;
      const auto result = train::train_naive(tr.features, {50.0, 0.9}, cfg,
                                             model::make_senet(15, kHidden, kEmbed, 830 + seed));
      const Matrix C = model::coeff_matrix(result.params, tr.features);
      const double acc =
          experiments::evaluate_coefficients(C, tr.labels, eval_options(5, 840 + seed)).acc;
      (with_threshold ? with_sum : without_sum) += acc;
    }
  }
  const double mean_with = with_sum / 3.0;
  const double mean_without = without_sum / 3.0;
  h.report(8, "soft-threshold ablation direction", mean_with >= mean_without,
           fmt("mean ACC with %.4f >= without %.4f", mean_with, mean_without));
}

// --------------------------------------------------------------------------
// 9. Spectral pipeline sanity
// --------------------------------------------------------------------------
void criterion_9(Harness& h) {
  // Perfect block-diagonal coefficients recover labels exactly.
  const Index per = 20;
  Matrix C = Matrix::Zero(3 * per, 3 * per);
  Labels truth;
  for (Index s = 0; s < 3; ++s) {
    for (Index a = 0; a < per; ++a) {
      truth.push_back(static_cast<int>(s));
      for (Index b = 0; b < per; ++b) {
        if (a != b) C(s * per + a, s * per + b) = 0.4;
      }
    }
  }
  spectral::ClusterOptions opts;
  opts.k = 3;
  opts.seed = 9;
  const double acc = metrics::acc(spectral::cluster(C, opts).assignments, truth);

  // Normalized-Laplacian eigenvalue range on 50 random graphs.
  Rng rng(99);
  bool range_ok = true;
  double worst_low = 0.0;
  double worst_high = 0.0;
  for (int g = 0; g < 50; ++g) {
    const Index n = 8 + rng.uniform_int(25);
    Matrix raw(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) raw(i, j) = rng.gaussian();
      raw(j, j) = 0.0;
    }
    const Matrix W =
        spectral::build_affinity(raw, {spectral::AffinityMode::SymAbs, 3});
    const Matrix L = spectral::normalized_laplacian(W);
    const auto eig = senet::linalg::sym_eig_smallest(L, n);
    worst_low = std::min(worst_low, eig.values[0]);
    worst_high = std::max(worst_high, eig.values[n - 1]);
    range_ok = range_ok && eig.values[0] >= -1e-10 && eig.values[n - 1] <= 2.0 + 1e-10;
  }
  h.report(9, "spectral pipeline sanity", acc == 1.0 && range_ok,
           fmt("block-diagonal ACC %.3f (== 1.0), eigenvalue range [%.1e, 2%+.1e]", acc,
               worst_low, worst_high - 2.0));
}

// --------------------------------------------------------------------------
// 10. CLI determinism
// --------------------------------------------------------------------------
void criterion_10(Harness& h) {
  const fs::path base = fs::temp_directory_path() / "senet_acceptance_cli";
  fs::remove_all(base);
  fs::create_directories(base);
  auto run = [&](const std::string& args) {
    const std::string command =
        std::string(SENET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(command.c_str()));
  };
  const std::string train_args =
      "train --seed 42 --threads 1 --ambient-dim 9 --subspace-dim 3 --num-subspaces 3 "
      "--points-per-subspace 30 --iterations 50 --batch-size 20 --hidden-dims 16 16 "
      "--embed-dim 8 --k 3 --out ";
  const bool ran = run(train_args + (base / "a").string()) == 0 &&
                   run(train_args + (base / "b").string()) == 0;
  bool identical = ran;
  for (const char* name :
       {"checkpoint.sent", "C_train.semx", "loss_history.csv", "features_train.semx",
        "labels_train.csv", "metrics.json", "effective_config.json"}) {
    identical = identical &&
                file_bytes(base / "a" / name) == file_bytes(base / "b" / name) &&
                !file_bytes(base / "a" / name).empty();
  }
  h.report(10, "CLI determinism", identical,
           ran ? "two identical train runs produced byte-identical outputs"
               : "CLI run failed");
}

}  // namespace

int main() {
  Harness h;
  criterion_1(h);
  criterion_2(h);
  criterion_3(h);
  criterion_4(h);
  criterion_5(h);
  criterion_6(h);
  criterion_7(h);
  criterion_8(h);
  criterion_9(h);
  criterion_10(h);
  if (h.failures > 0) {
    std::printf("%d criterion(s) failed\n", h.failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
