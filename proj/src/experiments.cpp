#include "senet/experiments.hpp"

namespace senet::experiments {

metrics::MetricsReport evaluate_coefficients(const MatrixRef& C, const Labels& truth,
                                             const EvalOptions& opts, const Matrix* X,
                                             const objective::HyperParams* hyper) {
  metrics::MetricsReport report;
  report.sre = metrics::sre(C, truth);
  const Matrix W = spectral::build_affinity(C, opts.affinity);
  report.conn = metrics::conn(W, truth);

  spectral::ClusterOptions copts;
  copts.k = opts.k;
  copts.affinity = opts.affinity;
  copts.embed_dim = opts.embed_dim;
  copts.seed = opts.seed;
  copts.restarts = opts.restarts;
  copts.degree_regularization = opts.degree_regularization;
  const spectral::ClusterResult clusters = spectral::cluster(C, copts);
  report.acc = metrics::acc(clusters.assignments, truth);
  report.nmi = metrics::nmi(clusters.assignments, truth);
  report.ari = metrics::ari(clusters.assignments, truth);

  if (X != nullptr && hyper != nullptr) {
    report.losses = objective::total_loss(*X, C, *hyper);
  }
  return report;
}

}  // namespace senet::experiments
