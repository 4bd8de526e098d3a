// Command-line front end: dataset generation, SENet training and inference,
// the EnSC oracle, spectral clustering, evaluation, and the comparison /
// ablation drivers. All randomness derives from the single top-level seed.
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "senet/data.hpp"
#include "senet/ensc.hpp"
#include "senet/errors.hpp"
#include "senet/experiments.hpp"
#include "senet/metrics.hpp"
#include "senet/model.hpp"
#include "senet/objective.hpp"
#include "senet/rng.hpp"
#include "senet/spectral.hpp"
#include "senet/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using senet::Index;
using senet::Labels;
using senet::Matrix;

namespace {

// Sub-seed streams derived from the top-level seed.
constexpr std::uint64_t kStreamSynthetic = 1;
constexpr std::uint64_t kStreamSplit = 2;
constexpr std::uint64_t kStreamInit = 3;
constexpr std::uint64_t kStreamTrain = 4;
constexpr std::uint64_t kStreamKmeans = 5;
constexpr std::uint64_t kStreamTest = 6;

struct DataConfig {
  senet::data::SyntheticSpec synthetic;
  bool use_synthetic{true};
  std::string features;
  std::string labels;
  Index n_train{0};  // 0 = no split
};

struct ArchConfig {
  std::vector<Index> hidden_dims{1024, 1024, 1024};
  Index embed_dim{1024};
};

struct SpectralConfig {
  std::string mode{"sym_abs"};
  Index knn{3};
  Index k{5};
  Index m{0};  // 0 = use k
  int restarts{10};
  double degree_regularization{0.0};
};

struct EnscConfig {
  int max_iters{5000};
  double tol{1e-8};
};

struct ExperimentConfig {
  std::uint64_t seed{0};
  int threads{1};
  std::string out{"out"};
  DataConfig data;
  senet::objective::HyperParams hyper{50.0, 0.9};
  senet::train::TrainConfig train;
  ArchConfig arch;
  SpectralConfig spectral;
  EnscConfig ensc;
};

json to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["out"] = cfg.out;
  j["data"]["synthetic"] = {{"ambient_dim", cfg.data.synthetic.ambient_dim},
                            {"subspace_dim", cfg.data.synthetic.subspace_dim},
                            {"num_subspaces", cfg.data.synthetic.num_subspaces},
                            {"points_per_subspace", cfg.data.synthetic.points_per_subspace}};
  j["data"]["use_synthetic"] = cfg.data.use_synthetic;
  j["data"]["features"] = cfg.data.features;
  j["data"]["labels"] = cfg.data.labels;
  j["data"]["n_train"] = cfg.data.n_train;
  j["hyper"] = {{"gamma", cfg.hyper.gamma}, {"lambda", cfg.hyper.lambda}};
  j["train"] = {{"iterations", cfg.train.iterations},
                {"batch_size", cfg.train.batch_size},
                {"learning_rate", cfg.train.learning_rate},
                {"lr_min", cfg.train.lr_min},
                {"clip_norm", cfg.train.clip_norm},
                {"block", cfg.train.block},
                {"algorithm",
                 cfg.train.algorithm == senet::train::Algorithm::Naive ? "naive" : "two_pass"},
                {"train_threshold", cfg.train.train_threshold},
                {"log_every", cfg.train.log_every}};
  j["architecture"] = {{"hidden_dims", cfg.arch.hidden_dims},
                       {"embed_dim", cfg.arch.embed_dim}};
  j["spectral"] = {{"mode", cfg.spectral.mode},
                   {"knn", cfg.spectral.knn},
                   {"k", cfg.spectral.k},
                   {"m", cfg.spectral.m},
                   {"restarts", cfg.spectral.restarts},
                   {"degree_regularization", cfg.spectral.degree_regularization}};
  j["ensc"] = {{"max_iters", cfg.ensc.max_iters}, {"tol", cfg.ensc.tol}};
  return j;
}

template <class T>
void maybe_get(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void from_json(const json& j, ExperimentConfig& cfg) {
  maybe_get(j, "seed", cfg.seed);
  maybe_get(j, "threads", cfg.threads);
  maybe_get(j, "out", cfg.out);
  if (j.contains("data")) {
    const json& d = j.at("data");
    if (d.contains("synthetic")) {
      const json& s = d.at("synthetic");
      maybe_get(s, "ambient_dim", cfg.data.synthetic.ambient_dim);
      maybe_get(s, "subspace_dim", cfg.data.synthetic.subspace_dim);
      maybe_get(s, "num_subspaces", cfg.data.synthetic.num_subspaces);
      maybe_get(s, "points_per_subspace", cfg.data.synthetic.points_per_subspace);
    }
    maybe_get(d, "use_synthetic", cfg.data.use_synthetic);
    maybe_get(d, "features", cfg.data.features);
    maybe_get(d, "labels", cfg.data.labels);
    maybe_get(d, "n_train", cfg.data.n_train);
    if (!cfg.data.features.empty()) cfg.data.use_synthetic = false;
  }
  if (j.contains("hyper")) {
    maybe_get(j.at("hyper"), "gamma", cfg.hyper.gamma);
    maybe_get(j.at("hyper"), "lambda", cfg.hyper.lambda);
  }
  if (j.contains("train")) {
    const json& t = j.at("train");
    maybe_get(t, "iterations", cfg.train.iterations);
    maybe_get(t, "batch_size", cfg.train.batch_size);
    maybe_get(t, "learning_rate", cfg.train.learning_rate);
    maybe_get(t, "lr_min", cfg.train.lr_min);
    maybe_get(t, "clip_norm", cfg.train.clip_norm);
    maybe_get(t, "block", cfg.train.block);
    maybe_get(t, "train_threshold", cfg.train.train_threshold);
    maybe_get(t, "log_every", cfg.train.log_every);
    if (t.contains("algorithm")) {
      const std::string name = t.at("algorithm").get<std::string>();
      if (name == "naive") {
        cfg.train.algorithm = senet::train::Algorithm::Naive;
      } else if (name == "two_pass") {
        cfg.train.algorithm = senet::train::Algorithm::TwoPass;
      } else {
        throw senet::InvalidSpec("config: unknown training algorithm '" + name + "'");
      }
    }
  }
  if (j.contains("architecture")) {
    maybe_get(j.at("architecture"), "hidden_dims", cfg.arch.hidden_dims);
    maybe_get(j.at("architecture"), "embed_dim", cfg.arch.embed_dim);
  }
  if (j.contains("spectral")) {
    const json& s = j.at("spectral");
    maybe_get(s, "mode", cfg.spectral.mode);
    maybe_get(s, "knn", cfg.spectral.knn);
    maybe_get(s, "k", cfg.spectral.k);
    maybe_get(s, "m", cfg.spectral.m);
    maybe_get(s, "restarts", cfg.spectral.restarts);
    maybe_get(s, "degree_regularization", cfg.spectral.degree_regularization);
  }
  if (j.contains("ensc")) {
    maybe_get(j.at("ensc"), "max_iters", cfg.ensc.max_iters);
    maybe_get(j.at("ensc"), "tol", cfg.ensc.tol);
  }
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream in(path);
  if (!in) throw senet::IoError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw senet::FormatError(path + ": " + e.what(), static_cast<std::ptrdiff_t>(e.byte));
  }
  from_json(j, cfg);
  return cfg;
}

void write_effective_config(const ExperimentConfig& cfg, const fs::path& dir) {
  std::ofstream out(dir / "effective_config.json");
  out << to_json(cfg).dump(2) << "\n";
}

fs::path ensure_outdir(const ExperimentConfig& cfg) {
  const fs::path dir(cfg.out);
  fs::create_directories(dir);
  return dir;
}

senet::spectral::AffinityOptions affinity_options(const SpectralConfig& cfg) {
  senet::spectral::AffinityOptions opts;
  if (cfg.mode == "sym_abs") {
    opts.mode = senet::spectral::AffinityMode::SymAbs;
  } else if (cfg.mode == "knn") {
    opts.mode = senet::spectral::AffinityMode::Knn;
  } else {
    throw senet::InvalidSpec("unknown affinity mode '" + cfg.mode + "'");
  }
  opts.knn = cfg.knn;
  return opts;
}

senet::experiments::EvalOptions eval_options(const ExperimentConfig& cfg) {
  senet::experiments::EvalOptions opts;
  opts.k = cfg.spectral.k;
  opts.affinity = affinity_options(cfg.spectral);
  opts.embed_dim = cfg.spectral.m;
  opts.seed = senet::derive_seed(cfg.seed, kStreamKmeans);
  opts.restarts = cfg.spectral.restarts;
  opts.degree_regularization = cfg.spectral.degree_regularization;
  return opts;
}

senet::data::Dataset resolve_dataset(const ExperimentConfig& cfg) {
  if (cfg.data.use_synthetic) {
    senet::data::SyntheticSpec spec = cfg.data.synthetic;
    spec.seed = senet::derive_seed(cfg.seed, kStreamSynthetic);
    return senet::data::gen_synthetic(spec);
  }
  if (cfg.data.features.empty()) {
    throw senet::InvalidSpec("no data source: provide --features or a synthetic spec");
  }
  senet::data::Dataset ds;
  ds.features = senet::data::read_matrix(cfg.data.features);
  if (!cfg.data.labels.empty()) {
    ds.labels = senet::data::read_labels(cfg.data.labels);
    if (ds.labels.size() != static_cast<std::size_t>(ds.features.cols())) {
      throw senet::DimensionMismatch("label count does not match feature columns");
    }
  }
  return ds;
}

senet::model::SENetParams init_model(const ExperimentConfig& cfg, Index input_dim) {
  return senet::model::make_senet(input_dim, cfg.arch.hidden_dims, cfg.arch.embed_dim,
                                  senet::derive_seed(cfg.seed, kStreamInit));
}

json metrics_json(const senet::metrics::MetricsReport& report) {
  return json::parse(senet::metrics::to_json(report));
}

// ---------------------------------------------------------------------------
// Subcommand drivers
// ---------------------------------------------------------------------------

int run_gen(const ExperimentConfig& cfg) {
  const fs::path dir = ensure_outdir(cfg);
  senet::data::SyntheticSpec spec = cfg.data.synthetic;
  spec.seed = senet::derive_seed(cfg.seed, kStreamSynthetic);
  const senet::data::Dataset ds = senet::data::gen_synthetic(spec);
  senet::data::write_matrix(dir / "features.semx", ds.features);
  senet::data::write_labels(dir / "labels.csv", ds.labels);
  write_effective_config(cfg, dir);
  std::cout << "wrote " << (dir / "features.semx").string() << " ("
            << ds.features.rows() << "x" << ds.features.cols() << ") and labels.csv\n";
  return 0;
}

int run_train(ExperimentConfig cfg) {
  const fs::path dir = ensure_outdir(cfg);
  senet::data::Dataset ds = resolve_dataset(cfg);

  senet::data::Dataset test;
  if (cfg.data.n_train > 0 && cfg.data.n_train < ds.features.cols()) {
    auto [tr, te] =
        senet::data::split(ds, cfg.data.n_train, senet::derive_seed(cfg.seed, kStreamSplit));
    ds = std::move(tr);
    test = std::move(te);
    senet::data::write_matrix(dir / "features_test.semx", test.features);
    if (!test.labels.empty()) senet::data::write_labels(dir / "labels_test.csv", test.labels);
  }
  senet::data::write_matrix(dir / "features_train.semx", ds.features);
  if (!ds.labels.empty()) senet::data::write_labels(dir / "labels_train.csv", ds.labels);

  senet::train::TrainConfig tcfg = cfg.train;
  tcfg.seed = senet::derive_seed(cfg.seed, kStreamTrain);
  const auto result =
      senet::train::train(ds.features, cfg.hyper, tcfg, init_model(cfg, ds.features.rows()));

  senet::model::save_checkpoint(result.params, cfg.hyper, dir / "checkpoint.sent");
  senet::train::write_history_csv(dir / "loss_history.csv", result.history, tcfg.log_every);
  const Matrix C =
      senet::model::coeff_matrix(result.params, ds.features, cfg.train.block, cfg.threads);
  senet::data::write_matrix(dir / "C_train.semx", C);

  if (!ds.labels.empty()) {
    const auto report = senet::experiments::evaluate_coefficients(
        C, ds.labels, eval_options(cfg), &ds.features, &cfg.hyper);
    std::ofstream out(dir / "metrics.json");
    out << senet::metrics::to_json(report) << "\n";
    std::cout << senet::metrics::to_json(report) << "\n";
  }
  write_effective_config(cfg, dir);
  std::cout << "wrote " << (dir / "checkpoint.sent").string() << "\n";
  return 0;
}

int run_infer(const std::string& checkpoint, const std::string& features,
              const std::string& out, Index block, int threads) {
  const auto [params, hyper] = senet::model::load_checkpoint(checkpoint);
  const Matrix X = senet::data::read_matrix(features);
  const Matrix C = senet::model::coeff_matrix(params, X, block, threads);
  senet::data::write_matrix(out, C);
  std::cout << "wrote " << out << " (" << C.rows() << "x" << C.cols() << ")\n";
  return 0;
}

int run_ensc(const ExperimentConfig& cfg, const std::string& features, const std::string& out) {
  Matrix X;
  if (!features.empty()) {
    X = senet::data::read_matrix(features);
  } else {
    X = resolve_dataset(cfg).features;
  }
  senet::ensc::SolverConfig scfg;
  scfg.hyper = cfg.hyper;
  scfg.max_iters = cfg.ensc.max_iters;
  scfg.tol = cfg.ensc.tol;
  const Matrix C = senet::ensc::solve_all(X, scfg, cfg.threads);
  senet::data::write_matrix(out, C);
  std::cout << "wrote " << out << " (" << C.rows() << "x" << C.cols() << ")\n";
  return 0;
}

int run_cluster(const ExperimentConfig& cfg, const std::string& coeffs,
                const std::string& out) {
  const Matrix C = senet::data::read_matrix(coeffs);
  senet::spectral::ClusterOptions opts;
  opts.k = cfg.spectral.k;
  opts.affinity = affinity_options(cfg.spectral);
  opts.embed_dim = cfg.spectral.m;
  opts.seed = senet::derive_seed(cfg.seed, kStreamKmeans);
  opts.restarts = cfg.spectral.restarts;
  opts.degree_regularization = cfg.spectral.degree_regularization;
  const auto result = senet::spectral::cluster(C, opts);
  senet::data::write_labels(out, result.assignments);
  std::cout << "wrote " << out << " (k=" << cfg.spectral.k
            << ", inertia=" << result.kmeans_inertia << ")\n";
  return 0;
}

int run_eval(const ExperimentConfig& cfg, const std::string& pred_path,
             const std::string& truth_path, const std::string& coeffs_path,
             const std::string& features_path, const std::string& out) {
  const Labels pred = senet::data::read_labels(pred_path);
  const Labels truth = senet::data::read_labels(truth_path);

  json j;
  j["acc"] = senet::metrics::acc(pred, truth);
  j["nmi"] = senet::metrics::nmi(pred, truth);
  j["ari"] = senet::metrics::ari(pred, truth);
  j["sre"] = nullptr;
  j["conn"] = nullptr;
  j["L"] = nullptr;
  j["L_rec"] = nullptr;
  j["L_reg"] = nullptr;
  if (!coeffs_path.empty()) {
    const Matrix C = senet::data::read_matrix(coeffs_path);
    j["sre"] = senet::metrics::sre(C, truth);
    const Matrix W = senet::spectral::build_affinity(C, affinity_options(cfg.spectral));
    j["conn"] = senet::metrics::conn(W, truth);
    if (!features_path.empty()) {
      const Matrix X = senet::data::read_matrix(features_path);
      const auto losses = senet::objective::total_loss(X, C, cfg.hyper);
      j["L"] = losses.total;
      j["L_rec"] = losses.rec;
      j["L_reg"] = losses.reg;
    }
  }
  const std::string text = j.dump();
  std::cout << text << "\n";
  if (!out.empty()) {
    std::ofstream file(out);
    file << text << "\n";
  }
  return 0;
}

int run_compare_senet_ensc(const ExperimentConfig& cfg) {
  const fs::path dir = ensure_outdir(cfg);

  // One synthetic draw with twice the points: half for training, half held
  // out, both from the same union of subspaces.
  senet::data::Dataset train_ds;
  senet::data::Dataset test_ds;
  if (cfg.data.use_synthetic) {
    senet::data::SyntheticSpec spec = cfg.data.synthetic;
    spec.points_per_subspace *= 2;
    spec.seed = senet::derive_seed(cfg.seed, kStreamSynthetic);
    const senet::data::Dataset full = senet::data::gen_synthetic(spec);
    auto [tr, te] = senet::data::split(full, full.features.cols() / 2,
                                       senet::derive_seed(cfg.seed, kStreamSplit));
    train_ds = std::move(tr);
    test_ds = std::move(te);
  } else {
    train_ds = resolve_dataset(cfg);
  }
  const senet::experiments::EvalOptions eopts = eval_options(cfg);

  senet::ensc::SolverConfig scfg;
  scfg.hyper = cfg.hyper;
  scfg.max_iters = cfg.ensc.max_iters;
  scfg.tol = cfg.ensc.tol;
  const Matrix C_ensc = senet::ensc::solve_all(train_ds.features, scfg, cfg.threads);
  const auto ensc_report = senet::experiments::evaluate_coefficients(
      C_ensc, train_ds.labels, eopts, &train_ds.features, &cfg.hyper);

  senet::train::TrainConfig tcfg = cfg.train;
  tcfg.seed = senet::derive_seed(cfg.seed, kStreamTrain);
  const auto trained = senet::train::train(train_ds.features, cfg.hyper, tcfg,
                                           init_model(cfg, train_ds.features.rows()));
  const Matrix C_senet = senet::model::coeff_matrix(trained.params, train_ds.features,
                                                    cfg.train.block, cfg.threads);
  const auto senet_report = senet::experiments::evaluate_coefficients(
      C_senet, train_ds.labels, eopts, &train_ds.features, &cfg.hyper);

  json report;
  report["ensc"] = metrics_json(ensc_report);
  report["senet"] = metrics_json(senet_report);
  report["loss_gap_rel"] = std::abs(senet_report.losses->total - ensc_report.losses->total) /
                           ensc_report.losses->total;

  if (test_ds.features.cols() > 0) {
    const Matrix C_test = senet::model::coeff_matrix(trained.params, test_ds.features,
                                                     cfg.train.block, cfg.threads);
    const auto test_report = senet::experiments::evaluate_coefficients(
        C_test, test_ds.labels, eopts, &test_ds.features, &cfg.hyper);
    report["senet_test"] = metrics_json(test_report);
  }

  const std::string text = report.dump(2);
  std::ofstream out(dir / "report.json");
  out << text << "\n";
  std::cout << text << "\n";
  write_effective_config(cfg, dir);
  return 0;
}

int run_compare_algs(const ExperimentConfig& cfg, int n_probes, Index probe_n,
                     const std::vector<Index>& memory_sizes) {
  const fs::path dir = ensure_outdir(cfg);
  const Index D = cfg.data.synthetic.ambient_dim;

  // Gradient parity probes on random data and parameters.
  senet::Rng rng(senet::derive_seed(cfg.seed, kStreamTrain));
  double worst = 0.0;
  for (int probe = 0; probe < n_probes; ++probe) {
    Matrix X(D, probe_n);
    for (Index j = 0; j < probe_n; ++j) {
      for (Index i = 0; i < D; ++i) X(i, j) = rng.gaussian();
      X.col(j).normalize();
    }
    senet::model::SENetParams params = senet::model::make_senet(
        D, cfg.arch.hidden_dims, cfg.arch.embed_dim, rng.engine()());
    params.threshold = 0.02;
    const std::vector<Index> batch{rng.uniform_int(probe_n)};

    const auto a = senet::train::batch_gradient_naive(params, X, batch, cfg.hyper);
    const auto b =
        senet::train::batch_gradient_two_pass(params, X, batch, cfg.hyper, cfg.train.block);
    auto values = [](const senet::train::SENetGrads& g) {
      std::vector<double> v;
      for (const auto* net : {&g.query, &g.key}) {
        for (const auto& W : net->weights) {
          v.insert(v.end(), W.data(), W.data() + W.size());
        }
        for (const auto& bias : net->biases) {
          v.insert(v.end(), bias.data(), bias.data() + bias.size());
        }
      }
      v.push_back(g.threshold);
      return v;
    };
    const auto va = values(a.grads);
    const auto vb = values(b.grads);
    for (std::size_t i = 0; i < va.size(); ++i) {
      const double denom = std::max(std::abs(va[i]), std::abs(vb[i]));
      if (denom > 0.0) worst = std::max(worst, std::abs(va[i] - vb[i]) / denom);
    }
  }

  // Paired end-to-end runs with a shared seed.
  senet::data::SyntheticSpec spec = cfg.data.synthetic;
  spec.seed = senet::derive_seed(cfg.seed, kStreamSynthetic);
  const senet::data::Dataset ds = senet::data::gen_synthetic(spec);
  senet::train::TrainConfig tcfg = cfg.train;
  tcfg.seed = senet::derive_seed(cfg.seed, kStreamTrain);
  const auto naive_run = senet::train::train_naive(ds.features, cfg.hyper, tcfg,
                                                   init_model(cfg, ds.features.rows()));
  const auto two_pass_run = senet::train::train_two_pass(ds.features, cfg.hyper, tcfg,
                                                         init_model(cfg, ds.features.rows()));
  const senet::experiments::EvalOptions eopts = eval_options(cfg);
  const double acc_naive =
      senet::experiments::evaluate_coefficients(
          senet::model::coeff_matrix(naive_run.params, ds.features), ds.labels, eopts)
          .acc;
  const double acc_two_pass =
      senet::experiments::evaluate_coefficients(
          senet::model::coeff_matrix(two_pass_run.params, ds.features), ds.labels, eopts)
          .acc;

  // Memory accountant at growing N, fixed block.
  json memory = json::array();
  for (Index n : memory_sizes) {
    senet::data::SyntheticSpec mspec = cfg.data.synthetic;
    mspec.points_per_subspace =
        std::max<Index>(1, n / cfg.data.synthetic.num_subspaces);
    mspec.seed = senet::derive_seed(cfg.seed, kStreamSynthetic + n);
    const senet::data::Dataset mds = senet::data::gen_synthetic(mspec);
    senet::train::TrainConfig mcfg = tcfg;
    mcfg.iterations = 1;
    const auto naive_mem = senet::train::train_naive(mds.features, cfg.hyper, mcfg,
                                                     init_model(cfg, mds.features.rows()));
    const auto two_pass_mem = senet::train::train_two_pass(
        mds.features, cfg.hyper, mcfg, init_model(cfg, mds.features.rows()));
    memory.push_back({{"n", mds.features.cols()},
                      {"naive_peak_bytes", naive_mem.workspace.peak_bytes()},
                      {"two_pass_peak_bytes", two_pass_mem.workspace.peak_bytes()}});
  }

  json report;
  report["max_gradient_rel_discrepancy"] = worst;
  report["probes"] = n_probes;
  report["acc_naive"] = acc_naive;
  report["acc_two_pass"] = acc_two_pass;
  report["acc_diff"] = std::abs(acc_naive - acc_two_pass);
  report["memory"] = memory;

  const std::string text = report.dump(2);
  std::ofstream out(dir / "report.json");
  out << text << "\n";
  std::cout << text << "\n";
  write_effective_config(cfg, dir);
  return 0;
}

int run_ablate(const ExperimentConfig& cfg, const std::string& arms_flag, int n_seeds) {
  const fs::path dir = ensure_outdir(cfg);
  std::ofstream csv(dir / "ablation.csv");
  csv << "arm,value,seed,acc,nmi,ari,sre,L\n";

  auto run_arm = [&](const std::string& arm, const std::string& value,
                     const ExperimentConfig& acfg, std::uint64_t seed) {
    senet::data::SyntheticSpec spec = acfg.data.synthetic;
    spec.seed = senet::derive_seed(seed, kStreamSynthetic);
    const senet::data::Dataset ds = senet::data::gen_synthetic(spec);
    senet::train::TrainConfig tcfg = acfg.train;
    tcfg.seed = senet::derive_seed(seed, kStreamTrain);
    const auto trained =
        senet::train::train(ds.features, acfg.hyper, tcfg,
                            senet::model::make_senet(ds.features.rows(), acfg.arch.hidden_dims,
                                                     acfg.arch.embed_dim,
                                                     senet::derive_seed(seed, kStreamInit)));
    const Matrix C = senet::model::coeff_matrix(trained.params, ds.features, acfg.train.block,
                                                acfg.threads);
    senet::experiments::EvalOptions eopts = eval_options(acfg);
    eopts.seed = senet::derive_seed(seed, kStreamKmeans);
    const auto report = senet::experiments::evaluate_coefficients(C, ds.labels, eopts,
                                                                  &ds.features, &acfg.hyper);
    csv << arm << "," << value << "," << seed << "," << report.acc << "," << report.nmi << ","
        << report.ari << "," << report.sre << "," << report.losses->total << "\n";
    std::cout << arm << "=" << value << " seed=" << seed << " acc=" << report.acc
              << " sre=" << report.sre << "\n";
  };

  const bool all = arms_flag.empty() || arms_flag == "all";
  auto enabled = [&](const char* arm) {
    return all || arms_flag.find(arm) != std::string::npos;
  };

  for (int s = 0; s < n_seeds; ++s) {
    const std::uint64_t seed = senet::derive_seed(cfg.seed, 0xAB1A + s);
    if (enabled("threshold")) {
      ExperimentConfig on = cfg;
      on.train.train_threshold = true;
      run_arm("threshold", "on", on, seed);
      ExperimentConfig off = cfg;
      off.train.train_threshold = false;
      run_arm("threshold", "off", off, seed);
    }
    if (enabled("depth")) {
      for (int depth : {1, 2, 3, 4}) {
        ExperimentConfig acfg = cfg;
        acfg.arch.hidden_dims.assign(static_cast<std::size_t>(depth),
                                     cfg.arch.hidden_dims.front());
        run_arm("depth", std::to_string(depth), acfg, seed);
      }
    }
    if (enabled("width")) {
      for (Index width : {Index{8}, Index{32}, Index{128}}) {
        ExperimentConfig acfg = cfg;
        acfg.arch.hidden_dims.assign(cfg.arch.hidden_dims.size(), width);
        acfg.arch.embed_dim = width;
        run_arm("width", std::to_string(width), acfg, seed);
      }
    }
    if (enabled("batch")) {
      for (int batch : {1, 10, 100}) {
        ExperimentConfig acfg = cfg;
        acfg.train.batch_size = batch;
        run_arm("batch", std::to_string(batch), acfg, seed);
      }
    }
  }
  write_effective_config(cfg, dir);
  std::cout << "wrote " << (dir / "ablation.csv").string() << "\n";
  return 0;
}

// Pre-scan for --config so flags given on the command line override it.
std::string find_config_path(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") return argv[i + 1];
  }
  return {};
}

void add_common_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--config", "JSON config file (flags override it)");
  cmd->add_option("--seed", cfg.seed, "top-level seed");
  cmd->add_option("--threads", cfg.threads, "worker thread cap (1 = bitwise reproducible)");
  cmd->add_option("--out", cfg.out, "output directory");
  cmd->add_option("--gamma", cfg.hyper.gamma, "reconstruction weight");
  cmd->add_option("--lambda", cfg.hyper.lambda, "elastic-net balance in [0,1]");
}

void add_data_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--features", cfg.data.features, "feature matrix file (.semx or .csv)");
  cmd->add_option("--labels", cfg.data.labels, "label file");
  cmd->add_option("--n-train", cfg.data.n_train, "training split size (0 = use all)");
  cmd->add_option("--ambient-dim", cfg.data.synthetic.ambient_dim, "synthetic D");
  cmd->add_option("--subspace-dim", cfg.data.synthetic.subspace_dim, "synthetic d");
  cmd->add_option("--num-subspaces", cfg.data.synthetic.num_subspaces, "synthetic n");
  cmd->add_option("--points-per-subspace", cfg.data.synthetic.points_per_subspace,
                  "synthetic N_i");
}

void add_train_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--iterations", cfg.train.iterations, "SGD iterations");
  cmd->add_option("--batch-size", cfg.train.batch_size, "points per iteration");
  cmd->add_option("--learning-rate", cfg.train.learning_rate, "initial Adam learning rate");
  cmd->add_option("--lr-min", cfg.train.lr_min, "cosine annealing floor");
  cmd->add_option("--clip-norm", cfg.train.clip_norm, "global gradient norm clip");
  cmd->add_option("--block", cfg.train.block, "two-pass block size (columns)");
  cmd->add_option("--log-every", cfg.train.log_every, "history CSV row interval");
  cmd->add_flag("--no-threshold", [&cfg](std::int64_t) { cfg.train.train_threshold = false; },
                "freeze b at 0 (identity in place of soft threshold)");
  cmd->add_option_function<std::string>(
      "--algorithm",
      [&cfg](const std::string& name) {
        if (name == "naive") {
          cfg.train.algorithm = senet::train::Algorithm::Naive;
        } else if (name == "two_pass") {
          cfg.train.algorithm = senet::train::Algorithm::TwoPass;
        } else {
          throw CLI::ValidationError("--algorithm", "must be 'naive' or 'two_pass'");
        }
      },
      "training algorithm: naive | two_pass");
  cmd->add_option("--hidden-dims", cfg.arch.hidden_dims, "hidden layer widths");
  cmd->add_option("--embed-dim", cfg.arch.embed_dim, "query/key output dimension p");
}

void add_spectral_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--mode", cfg.spectral.mode, "affinity mode: sym_abs | knn");
  cmd->add_option("--knn", cfg.spectral.knn, "neighbors per column in knn mode");
  cmd->add_option("--k", cfg.spectral.k, "number of clusters");
  cmd->add_option("--m", cfg.spectral.m, "embedding dimension (0 = k)");
  cmd->add_option("--restarts", cfg.spectral.restarts, "k-means restarts");
  cmd->add_option("--degree-regularization", cfg.spectral.degree_regularization,
                  "added to all degrees instead of failing on isolated vertices");
}

}  // namespace

int main(int argc, char** argv) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(find_config_path(argc, argv));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  CLI::App app{"self-expressive subspace clustering engine"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate a synthetic union-of-subspaces dataset");
  add_common_options(gen, cfg);
  add_data_options(gen, cfg);

  auto* train_cmd = app.add_subcommand("train", "train a self-expressive network");
  add_common_options(train_cmd, cfg);
  add_data_options(train_cmd, cfg);
  add_train_options(train_cmd, cfg);
  add_spectral_options(train_cmd, cfg);

  std::string checkpoint;
  std::string features;
  std::string out_file;
  auto* infer = app.add_subcommand("infer", "coefficients for a feature file from a checkpoint");
  infer->add_option("--checkpoint", checkpoint, "checkpoint path")->required();
  infer->add_option("--features", features, "feature matrix file")->required();
  infer->add_option("--out", out_file, "output coefficient matrix file")->required();
  infer->add_option("--block", cfg.train.block, "evaluation block size");
  infer->add_option("--threads", cfg.threads, "worker threads");
  infer->add_option("--config", "JSON config file");

  auto* ensc_cmd = app.add_subcommand("ensc", "solve the convex elastic-net self-expression");
  add_common_options(ensc_cmd, cfg);
  add_data_options(ensc_cmd, cfg);
  std::string ensc_out = "C_ensc.semx";
  ensc_cmd->add_option("--out-file", ensc_out, "output coefficient matrix file");
  ensc_cmd->add_option("--tol", cfg.ensc.tol, "relative objective decrease tolerance");
  ensc_cmd->add_option("--max-iters", cfg.ensc.max_iters, "proximal gradient iteration cap");

  auto* cluster_cmd = app.add_subcommand("cluster", "spectral clustering of a coefficient file");
  add_common_options(cluster_cmd, cfg);
  add_spectral_options(cluster_cmd, cfg);
  std::string coeffs;
  std::string cluster_out = "pred_labels.csv";
  cluster_cmd->add_option("--coeffs", coeffs, "coefficient matrix file")->required();
  cluster_cmd->add_option("--out-file", cluster_out, "output label file");

  auto* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
  add_common_options(eval_cmd, cfg);
  add_spectral_options(eval_cmd, cfg);
  std::string pred_path;
  std::string truth_path;
  std::string eval_out;
  eval_cmd->add_option("--pred", pred_path, "predicted label file")->required();
  eval_cmd->add_option("--truth", truth_path, "ground-truth label file")->required();
  eval_cmd->add_option("--coeffs", coeffs, "coefficient matrix (enables SRE/CONN)");
  eval_cmd->add_option("--features", features, "feature matrix (enables losses)");
  eval_cmd->add_option("--out-file", eval_out, "also write the JSON report here");

  auto* compare = app.add_subcommand("compare-senet-ensc",
                                     "side-by-side losses and metrics on one dataset");
  add_common_options(compare, cfg);
  add_data_options(compare, cfg);
  add_train_options(compare, cfg);
  add_spectral_options(compare, cfg);
  compare->add_option("--tol", cfg.ensc.tol, "EnSC tolerance");
  compare->add_option("--max-iters", cfg.ensc.max_iters, "EnSC iteration cap");

  auto* algs = app.add_subcommand("compare-algs",
                                  "gradient and end-to-end parity of the two trainers");
  add_common_options(algs, cfg);
  add_data_options(algs, cfg);
  add_train_options(algs, cfg);
  add_spectral_options(algs, cfg);
  int n_probes = 20;
  Index probe_n = 200;
  std::vector<Index> memory_sizes{200, 2000, 20000};
  algs->add_option("--probes", n_probes, "number of gradient parity probes");
  algs->add_option("--probe-n", probe_n, "data points per probe");
  algs->add_option("--memory-sizes", memory_sizes, "dataset sizes for the memory table");

  auto* ablate = app.add_subcommand("ablate", "threshold / depth / width / batch sweeps");
  add_common_options(ablate, cfg);
  add_data_options(ablate, cfg);
  add_train_options(ablate, cfg);
  add_spectral_options(ablate, cfg);
  std::string arms = "all";
  int n_seeds = 3;
  ablate->add_option("--arms", arms, "comma list of: threshold,depth,width,batch (or all)");
  ablate->add_option("--seeds", n_seeds, "seeds per arm");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (gen->parsed()) return run_gen(cfg);
    if (train_cmd->parsed()) return run_train(cfg);
    if (infer->parsed()) {
      return run_infer(checkpoint, features, out_file, cfg.train.block, cfg.threads);
    }
    if (ensc_cmd->parsed()) return run_ensc(cfg, cfg.data.features, ensc_out);
    if (cluster_cmd->parsed()) return run_cluster(cfg, coeffs, cluster_out);
    if (eval_cmd->parsed()) {
      return run_eval(cfg, pred_path, truth_path, coeffs, features, eval_out);
    }
    if (compare->parsed()) return run_compare_senet_ensc(cfg);
    if (algs->parsed()) return run_compare_algs(cfg, n_probes, probe_n, memory_sizes);
    if (ablate->parsed()) return run_ablate(cfg, arms, n_seeds);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
