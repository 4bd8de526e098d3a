#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "senet/errors.hpp"
#include "senet/metrics.hpp"
#include "senet/rng.hpp"

using senet::Index;
using senet::Labels;
using senet::Matrix;
using senet::Rng;
namespace metrics = senet::metrics;

namespace {

// Exhaustive best one-to-one mapping, oracle for acc on few clusters.
double acc_exhaustive(const Labels& pred, const Labels& truth) {
  std::vector<int> pred_ids(pred);
  std::sort(pred_ids.begin(), pred_ids.end());
  pred_ids.erase(std::unique(pred_ids.begin(), pred_ids.end()), pred_ids.end());
  std::vector<int> truth_ids(truth);
  std::sort(truth_ids.begin(), truth_ids.end());
  truth_ids.erase(std::unique(truth_ids.begin(), truth_ids.end()), truth_ids.end());

  const std::size_t k = std::max(pred_ids.size(), truth_ids.size());
  std::vector<int> perm(k);
  for (std::size_t i = 0; i < k; ++i) perm[i] = static_cast<int>(i);
  double best = 0.0;
  do {
    double correct = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const auto pi = static_cast<std::size_t>(
          std::find(pred_ids.begin(), pred_ids.end(), pred[i]) - pred_ids.begin());
      const auto mapped = static_cast<std::size_t>(perm[pi]);
      if (mapped < truth_ids.size() && truth_ids[mapped] == truth[i]) correct += 1.0;
    }
    best = std::max(best, correct / static_cast<double>(pred.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Labels random_labels(std::size_t n, int k, Rng& rng) {
  Labels out(n);
  for (auto& v : out) v = static_cast<int>(rng.uniform_int(k));
  return out;
}

}  // namespace

TEST_CASE("sre block cases") {
  Labels labels{0, 0, 1, 1};
  Matrix C = Matrix::Zero(4, 4);

  SUBCASE("block diagonal gives zero") {
    C(0, 1) = 0.5;
    C(1, 0) = -0.25;
    C(2, 3) = 1.0;
    CHECK(metrics::sre(C, labels) == 0.0);
  }
  SUBCASE("purely off-block gives one") {
    C(0, 2) = 0.5;
    C(3, 1) = -2.0;
    CHECK(metrics::sre(C, labels) == 1.0);
  }
  SUBCASE("0.8 in-class and 0.2 cross-class mass gives 0.2") {
    C(1, 0) = 0.8;
    C(2, 0) = 0.2;
    CHECK(metrics::sre(C, labels) == doctest::Approx(0.2));
  }
  SUBCASE("sign invariance") {
    C(1, 0) = -0.7;
    C(2, 0) = 0.1;
    C(3, 2) = 0.4;
    CHECK(metrics::sre(C, labels) == doctest::Approx(metrics::sre(C.cwiseAbs(), labels)));
  }
  SUBCASE("all-zero matrix returns 0 by convention") {
    CHECK(metrics::sre(Matrix::Zero(4, 4), labels) == 0.0);
  }
}

TEST_CASE("conn on K3 and P3") {
  Labels one_class{0, 0, 0};

  Matrix K3 = Matrix::Ones(3, 3);
  K3.diagonal().setZero();
  CHECK(metrics::conn(K3, one_class) == doctest::Approx(1.5).epsilon(1e-10));

  Matrix P3 = Matrix::Zero(3, 3);
  P3(0, 1) = P3(1, 0) = 1.0;
  P3(1, 2) = P3(2, 1) = 1.0;
  CHECK(metrics::conn(P3, one_class) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("conn of a disconnected class is zero") {
  Labels labels{0, 0, 0, 0};
  Matrix W = Matrix::Zero(4, 4);
  W(0, 1) = W(1, 0) = 1.0;
  W(2, 3) = W(3, 2) = 1.0;  // two components inside one class
  CHECK(metrics::conn(W, labels) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("conn takes the minimum over classes and validates sizes") {
  Labels labels{0, 0, 0, 1, 1};
  Matrix W = Matrix::Zero(5, 5);
  // class 0 = K3, class 1 = pair
  W(0, 1) = W(1, 0) = 1.0;
  W(1, 2) = W(2, 1) = 1.0;
  W(0, 2) = W(2, 0) = 1.0;
  W(3, 4) = W(4, 3) = 1.0;
  // pair graph K2: normalized Laplacian eigenvalues {0, 2}
  CHECK(metrics::conn(W, labels) == doctest::Approx(1.5).epsilon(1e-10));

  Labels bad{0, 0, 0, 1, 2};  // singleton classes
  CHECK_THROWS_AS(metrics::conn(W, bad), senet::ClassTooSmall);
}

TEST_CASE("acc identity, permutation invariance and the 5/6 example") {
  Labels truth{0, 0, 1, 1, 2, 2};
  CHECK(metrics::acc(truth, truth) == 1.0);

  Labels permuted{2, 2, 0, 0, 1, 1};
  CHECK(metrics::acc(permuted, truth) == 1.0);

  Labels pred{1, 1, 2, 2, 2, 0};
  CHECK(metrics::acc(pred, truth) == doctest::Approx(5.0 / 6.0));
  CHECK(acc_exhaustive(pred, truth) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("hungarian matching equals exhaustive search on random instances") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + static_cast<int>(rng.uniform_int(5));  // up to 6 clusters
    const Labels truth = random_labels(40, k, rng);
    const Labels pred = random_labels(40, k, rng);
    CHECK(metrics::acc(pred, truth) == doctest::Approx(acc_exhaustive(pred, truth)));
  }
}

TEST_CASE("nmi conventions") {
  Labels a{0, 0, 1, 1};
  CHECK(metrics::nmi(a, a) == doctest::Approx(1.0));

  Labels single{0, 0, 0, 0};
  CHECK(metrics::nmi(single, a) == 0.0);
  CHECK(metrics::nmi(a, single) == 0.0);
  CHECK(metrics::nmi(single, single) == 1.0);

  Labels independent{0, 1, 0, 1};
  CHECK(metrics::nmi(independent, a) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("ari identity, independence and the pair-count oracle") {
  Labels truth{0, 0, 1, 1};
  CHECK(metrics::ari(truth, truth) == doctest::Approx(1.0));

  // Brute-force pair counting over all C(4,2) = 6 pairs.
  Labels pred{0, 1, 0, 1};
  auto pair_count_ari = [](const Labels& p, const Labels& t) {
    double together_both = 0.0, together_p = 0.0, together_t = 0.0, total = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      for (std::size_t j = i + 1; j < p.size(); ++j) {
        const bool same_p = p[i] == p[j];
        const bool same_t = t[i] == t[j];
        together_both += same_p && same_t ? 1.0 : 0.0;
        together_p += same_p ? 1.0 : 0.0;
        together_t += same_t ? 1.0 : 0.0;
        total += 1.0;
      }
    }
    const double expected = together_p * together_t / total;
    const double maximum = 0.5 * (together_p + together_t);
    return (together_both - expected) / (maximum - expected);
  };
  CHECK(metrics::ari(pred, truth) == doctest::Approx(pair_count_ari(pred, truth)));

  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Labels t2 = random_labels(25, 3, rng);
    const Labels p2 = random_labels(25, 4, rng);
    CHECK(metrics::ari(p2, t2) == doctest::Approx(pair_count_ari(p2, t2)).epsilon(1e-12));
  }
}

TEST_CASE("metrics are invariant under relabeling") {
  Rng rng(15);
  const Labels truth = random_labels(60, 4, rng);
  const Labels pred = random_labels(60, 4, rng);
  Labels relabeled(pred);
  const int perm[4] = {2, 3, 1, 0};
  for (auto& v : relabeled) v = perm[v];

  CHECK(metrics::acc(relabeled, truth) == doctest::Approx(metrics::acc(pred, truth)));
  CHECK(metrics::nmi(relabeled, truth) == doctest::Approx(metrics::nmi(pred, truth)));
  CHECK(metrics::ari(relabeled, truth) == doctest::Approx(metrics::ari(pred, truth)));
}

TEST_CASE("report serialization") {
  metrics::MetricsReport report;
  report.sre = 0.25;
  report.conn = 0.1;
  report.acc = 0.9;
  report.nmi = 0.8;
  report.ari = 0.7;
  const std::string no_losses = metrics::to_json(report);
  CHECK(no_losses.find("\"L\":null") != std::string::npos);
  CHECK(no_losses.find("\"sre\":0.25") != std::string::npos);

  report.losses = senet::objective::LossBreakdown{10.0, 0.2, 9.0};
  const std::string with_losses = metrics::to_json(report);
  CHECK(with_losses.find("\"L\":10.0") != std::string::npos);
  CHECK(with_losses.find("\"L_rec\":0.2") != std::string::npos);
  CHECK(with_losses.find("\"L_reg\":9.0") != std::string::npos);
}

TEST_CASE("length mismatch is rejected") {
  Labels a{0, 1};
  Labels b{0, 1, 2};
  CHECK_THROWS_AS(metrics::acc(a, b), senet::DimensionMismatch);
  CHECK_THROWS_AS(metrics::nmi(a, b), senet::DimensionMismatch);
  CHECK_THROWS_AS(metrics::ari(a, b), senet::DimensionMismatch);
}
