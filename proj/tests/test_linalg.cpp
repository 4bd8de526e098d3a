#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "senet/errors.hpp"
#include "senet/linalg.hpp"
#include "senet/rng.hpp"

using senet::Index;
using senet::Matrix;
using senet::Rng;
using senet::Vector;
namespace linalg = senet::linalg;

namespace {

// Cyclic Jacobi eigenvalue oracle, independent of the library path.
std::vector<double> jacobi_eigenvalues(Matrix A) {
  const Index n = A.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    }
    if (off < 1e-26) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t =
            (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Index k = 0; k < n; ++k) {
          const double akp = A(k, p);
          const double akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = A(p, k);
          const double aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> values(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = A(i, i);
  std::sort(values.begin(), values.end());
  return values;
}

Matrix random_symmetric(Index n, Rng& rng) {
  Matrix A(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i <= j; ++i) {
      A(i, j) = rng.gaussian();
      A(j, i) = A(i, j);
    }
  }
  return A;
}

}  // namespace

TEST_CASE("sym_eig_smallest on identity and diagonal matrices") {
  const linalg::EigenResult id = linalg::sym_eig_smallest(Matrix::Identity(4, 4), 2);
  CHECK(id.values.size() == 2);
  CHECK(id.values[0] == doctest::Approx(1.0));
  CHECK(id.values[1] == doctest::Approx(1.0));

  Matrix diag = Matrix::Zero(3, 3);
  diag.diagonal() << 1.0, 2.0, 3.0;
  const linalg::EigenResult d = linalg::sym_eig_smallest(diag, 3);
  CHECK(d.values[0] == doctest::Approx(1.0));
  CHECK(d.values[1] == doctest::Approx(2.0));
  CHECK(d.values[2] == doctest::Approx(3.0));
}

TEST_CASE("sym_eig_smallest matches the Jacobi oracle on random 8x8 inputs") {
  Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix A = random_symmetric(8, rng);
    const linalg::EigenResult result = linalg::sym_eig_smallest(A, 8);
    const std::vector<double> oracle = jacobi_eigenvalues(A);
    for (Index i = 0; i < 8; ++i) {
      CHECK(result.values[i] == doctest::Approx(oracle[static_cast<std::size_t>(i)]).epsilon(1e-8));
    }
  }
}

TEST_CASE("eigen result invariants: ordering, orthonormality, reconstruction") {
  Rng rng(11);
  for (Index n : {5, 40, 200}) {
    const Matrix A = random_symmetric(n, rng);
    const Index k = n / 2 + 1;
    const linalg::EigenResult r = linalg::sym_eig_smallest(A, k);

    for (Index i = 1; i < k; ++i) CHECK(r.values[i] >= r.values[i - 1]);
    const Matrix gram = r.vectors.transpose() * r.vectors;
    CHECK((gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() <= 1e-10);

    const double residual =
        (A * r.vectors - r.vectors * r.values.asDiagonal().toDenseMatrix()).norm();
    CHECK(residual / A.norm() <= 1e-8);
  }
}

TEST_CASE("sym_eig_smallest error paths") {
  Matrix bad = Matrix::Zero(3, 3);
  bad(0, 1) = 1.0;  // asymmetric
  CHECK_THROWS_AS(linalg::sym_eig_smallest(bad, 1), senet::NotSymmetric);
  CHECK_THROWS_AS(linalg::sym_eig_smallest(Matrix::Identity(3, 3), 4),
                  senet::DimensionMismatch);
  CHECK_THROWS_AS(linalg::sym_eig_smallest(Matrix::Zero(2, 3), 1), senet::DimensionMismatch);
}

TEST_CASE("topk_abs basic examples") {
  Vector v(3);
  v << 0.1, -0.9, 0.5;
  CHECK(linalg::topk_abs(v, 1) == std::vector<Index>{1});

  Vector ties = Vector::Ones(3);
  CHECK(linalg::topk_abs(ties, 2) == std::vector<Index>{0, 1});

  CHECK_THROWS_AS(linalg::topk_abs(v, 4), senet::DimensionMismatch);
}

TEST_CASE("topk_abs agrees with a full-sort oracle") {
  Rng rng(23);
  Vector v(100);
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.gaussian();

  std::vector<Index> order(100);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  order.resize(10);

  CHECK(linalg::topk_abs(v, 10) == order);
}

TEST_CASE("topk_abs is permutation-consistent") {
  Rng rng(31);
  Vector v(40);
  for (Index i = 0; i < v.size(); ++i) v[i] = rng.gaussian();
  const std::vector<Index> base = linalg::topk_abs(v, 7);

  std::vector<Index> perm(40);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  Vector shuffled(40);
  for (Index i = 0; i < 40; ++i) shuffled[perm[static_cast<std::size_t>(i)]] = v[i];

  std::vector<double> base_values;
  for (Index i : base) base_values.push_back(v[i]);
  std::vector<double> shuffled_values;
  for (Index i : linalg::topk_abs(shuffled, 7)) shuffled_values.push_back(shuffled[i]);

  std::sort(base_values.begin(), base_values.end());
  std::sort(shuffled_values.begin(), shuffled_values.end());
  CHECK(base_values == shuffled_values);
}
