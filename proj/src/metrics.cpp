#include "senet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "senet/errors.hpp"
#include "senet/linalg.hpp"
#include "senet/spectral.hpp"

namespace senet::metrics {

namespace {

constexpr Index kMaxClusters = 64;

// Relabel arbitrary non-negative ids to dense 0..k-1.
std::pair<std::vector<Index>, Index> densify(const Labels& labels) {
  std::map<int, Index> ids;
  std::vector<Index> dense(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    dense[i] = ids.emplace(labels[i], static_cast<Index>(ids.size())).first->second;
  }
  return {std::move(dense), static_cast<Index>(ids.size())};
}

void check_lengths(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size()) {
    throw DimensionMismatch("metrics: label sequences have lengths " +
                            std::to_string(pred.size()) + " and " +
                            std::to_string(truth.size()));
  }
}

Matrix confusion(const std::vector<Index>& a, Index ka, const std::vector<Index>& b, Index kb) {
  Matrix counts = Matrix::Zero(ka, kb);
  for (std::size_t i = 0; i < a.size(); ++i) counts(a[i], b[i]) += 1.0;
  return counts;
}

}  // namespace

std::string to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["sre"] = report.sre;
  j["conn"] = report.conn;
  j["acc"] = report.acc;
  j["nmi"] = report.nmi;
  j["ari"] = report.ari;
  if (report.losses) {
    j["L"] = report.losses->total;
    j["L_rec"] = report.losses->rec;
    j["L_reg"] = report.losses->reg;
  } else {
    j["L"] = nullptr;
    j["L_rec"] = nullptr;
    j["L_reg"] = nullptr;
  }
  return j.dump();
}

double sre(const MatrixRef& C, const Labels& labels) {
  if (static_cast<Index>(labels.size()) != C.rows() || C.rows() != C.cols()) {
    throw DimensionMismatch("sre: C is " + std::to_string(C.rows()) + "x" +
                            std::to_string(C.cols()) + " with " +
                            std::to_string(labels.size()) + " labels");
  }
  double wrong = 0.0;
  double total = 0.0;
  for (Index j = 0; j < C.cols(); ++j) {
    for (Index i = 0; i < C.rows(); ++i) {
      if (i == j) continue;
      const double mass = std::abs(C(i, j));
      total += mass;
      if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) {
        wrong += mass;
      }
    }
  }
  if (total == 0.0) {
    std::cerr << "warning: sre of an all-zero coefficient matrix, returning 0\n";
    return 0.0;
  }
  return wrong / total;
}

double conn(const MatrixRef& W, const Labels& labels) {
  if (static_cast<Index>(labels.size()) != W.rows() || W.rows() != W.cols()) {
    throw DimensionMismatch("conn: affinity/label size mismatch");
  }
  auto [dense, k] = densify(labels);
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < dense.size(); ++i) {
    members[static_cast<std::size_t>(dense[i])].push_back(static_cast<Index>(i));
  }

  double result = std::numeric_limits<double>::infinity();
  for (const auto& cls : members) {
    if (cls.size() < 2) {
      throw ClassTooSmall("conn: a class has " + std::to_string(cls.size()) +
                          " member(s), need at least 2");
    }
    const auto n = static_cast<Index>(cls.size());
    Matrix sub(n, n);
    for (Index a = 0; a < n; ++a) {
      for (Index b = 0; b < n; ++b) {
        sub(a, b) = W(cls[static_cast<std::size_t>(a)], cls[static_cast<std::size_t>(b)]);
      }
    }
    double value = 0.0;
    if ((sub.rowwise().sum().array() > 0.0).all()) {
      const Matrix L = spectral::normalized_laplacian(sub);
      value = linalg::sym_eig_smallest(L, 2).values[1];
      if (value < 0.0) value = 0.0;  // clip eigensolver noise
    }
    result = std::min(result, value);
  }
  return result;
}

std::vector<Index> hungarian(const MatrixRef& cost) {
  // Shortest-augmenting-path assignment with row/column potentials.
  const Index n = cost.rows();
  if (cost.cols() != n) throw DimensionMismatch("hungarian: cost matrix must be square");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> match(n + 1, n);  // match[col] = row, n = unmatched
  for (Index row = 0; row < n; ++row) {
    std::vector<double> min_slack(n + 1, inf);
    std::vector<Index> prev(n + 1, n);
    std::vector<bool> used(n + 1, false);
    Index col0 = n;  // virtual column holding the current row
    match[n] = row;
    do {
      used[col0] = true;
      const Index r = match[col0];
      double delta = inf;
      Index col1 = n;
      for (Index col = 0; col < n; ++col) {
        if (used[col]) continue;
        const double slack = cost(r, col) - u[r] - v[col];
        if (slack < min_slack[col]) {
          min_slack[col] = slack;
          prev[col] = col0;
        }
        if (min_slack[col] < delta) {
          delta = min_slack[col];
          col1 = col;
        }
      }
      for (Index col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          min_slack[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != n);
    // Augment along the alternating path.
    while (col0 != n) {
      const Index col1 = prev[col0];
      match[col0] = match[col1];
      col0 = col1;
    }
  }
  std::vector<Index> row_to_col(n);
  for (Index col = 0; col < n; ++col) {
    if (match[col] < n) row_to_col[static_cast<std::size_t>(match[col])] = col;
  }
  return row_to_col;
}

double acc(const Labels& pred, const Labels& truth) {
  check_lengths(pred, truth);
  if (pred.empty()) return 1.0;
  auto [p, kp] = densify(pred);
  auto [t, kt] = densify(truth);
  if (kp > kMaxClusters || kt > kMaxClusters) {
    throw InvalidSpec("acc: more than " + std::to_string(kMaxClusters) + " clusters");
  }
  const Index n = std::max(kp, kt);
  Matrix counts = Matrix::Zero(n, n);
  counts.topLeftCorner(kp, kt) = confusion(p, kp, t, kt);
  const std::vector<Index> assignment = hungarian(-counts);
  double matched = 0.0;
  for (Index r = 0; r < n; ++r) matched += counts(r, assignment[static_cast<std::size_t>(r)]);
  return matched / static_cast<double>(pred.size());
}

double nmi(const Labels& pred, const Labels& truth) {
  check_lengths(pred, truth);
  if (pred.empty()) return 1.0;
  auto [p, kp] = densify(pred);
  auto [t, kt] = densify(truth);
  const auto N = static_cast<double>(pred.size());
  const Matrix joint = confusion(p, kp, t, kt) / N;
  const Vector pa = joint.rowwise().sum();
  const Vector pb = joint.colwise().sum();

  auto entropy = [](const Vector& dist) {
    double h = 0.0;
    for (Index i = 0; i < dist.size(); ++i) {
      if (dist[i] > 0.0) h -= dist[i] * std::log(dist[i]);
    }
    return h;
  };
  const double hp = entropy(pa);
  const double ht = entropy(pb);
  if (hp == 0.0 && ht == 0.0) return 1.0;  // both a single cluster
  if (hp == 0.0 || ht == 0.0) return 0.0;

  double mi = 0.0;
  for (Index a = 0; a < kp; ++a) {
    for (Index b = 0; b < kt; ++b) {
      if (joint(a, b) > 0.0) {
        mi += joint(a, b) * std::log(joint(a, b) / (pa[a] * pb[b]));
      }
    }
  }
  return mi / std::sqrt(hp * ht);
}

double ari(const Labels& pred, const Labels& truth) {
  check_lengths(pred, truth);
  if (pred.empty()) return 1.0;
  auto [p, kp] = densify(pred);
  auto [t, kt] = densify(truth);
  const Matrix counts = confusion(p, kp, t, kt);
  auto choose2 = [](double x) { return 0.5 * x * (x - 1.0); };

  double sum_ij = 0.0;
  for (Index a = 0; a < kp; ++a) {
    for (Index b = 0; b < kt; ++b) sum_ij += choose2(counts(a, b));
  }
  double sum_a = 0.0;
  for (Index a = 0; a < kp; ++a) sum_a += choose2(counts.row(a).sum());
  double sum_b = 0.0;
  for (Index b = 0; b < kt; ++b) sum_b += choose2(counts.col(b).sum());
  const double total_pairs = choose2(static_cast<double>(pred.size()));

  const double expected = sum_a * sum_b / total_pairs;
  const double maximum = 0.5 * (sum_a + sum_b);
  if (maximum == expected) {
    // Degenerate partitions (all singletons / one cluster on both sides)
    // carry no pair information; identical structure scores 1.
    return sum_ij == expected ? 1.0 : 0.0;
  }
  return (sum_ij - expected) / (maximum - expected);
}

}  // namespace senet::metrics
