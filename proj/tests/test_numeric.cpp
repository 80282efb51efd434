#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "vfnorm/numeric.hpp"

using namespace vfnorm;

TEST_CASE("hermitian_eig on the identity") {
  const auto r = hermitian_eig(CMatrix::Identity(2, 2));
  CHECK(r.values(0) == doctest::Approx(1.0));
  CHECK(r.values(1) == doctest::Approx(1.0));
  CHECK(op_norm(r.vectors.adjoint() * r.vectors - CMatrix::Identity(2, 2)) < 1e-12);
}

TEST_CASE("hermitian_eig on an already diagonal matrix") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 3.0;
  m(1, 1) = -1.0;
  const auto r = hermitian_eig(m);
  CHECK(r.values(0) == doctest::Approx(3.0));
  CHECK(r.values(1) == doctest::Approx(-1.0));
}

TEST_CASE("hermitian_eig reconstructs a random Hermitian matrix") {
  std::mt19937_64 rng(7);
  const CMatrix m = random_hermitian(5, rng);
  const auto r = hermitian_eig(m);
  const CMatrix rec =
      r.vectors * r.values.cast<Complex>().asDiagonal() * r.vectors.adjoint();
  CHECK(op_norm(rec - m) < 1e-9);
  for (Index i = 1; i < r.values.size(); ++i) CHECK(r.values(i - 1) >= r.values(i));
}

TEST_CASE("hermitian_eig rejects non-Hermitian and non-finite input") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  CHECK_THROWS_AS(hermitian_eig(m), NotHermitian);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(hermitian_eig(m), NonFinite);
  CHECK_THROWS_AS(hermitian_eig(CMatrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("svd of the zero matrix and of rank-one") {
  const auto z = svd(CMatrix::Zero(3, 3));
  CHECK(z.singular_values.maxCoeff() == 0.0);

  std::mt19937_64 rng(1);
  const CVector x = random_unit_vector(4, rng);
  const CVector y = random_unit_vector(4, rng);
  const auto r = svd(x * y.adjoint());
  CHECK(r.singular_values(0) == doctest::Approx(1.0));
  CHECK(r.singular_values(1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("svd of a diagonal matrix and reconstruction residuals") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 0.5;
  const auto r = svd(m);
  CHECK(r.singular_values(0) == doctest::Approx(2.0));
  CHECK(r.singular_values(1) == doctest::Approx(0.5));

  std::mt19937_64 rng(42);
  const Tolerances tol;
  for (int trial = 0; trial < 20; ++trial) {
    const Index rows = 2 + static_cast<Index>(trial % 5);
    const Index cols = 2 + static_cast<Index>((trial * 3) % 5);
    const CMatrix g = random_matrix(rows, cols, rng);
    const auto s = svd(g);
    CMatrix sigma = CMatrix::Zero(rows, cols);
    for (Index i = 0; i < s.singular_values.size(); ++i) sigma(i, i) = s.singular_values(i);
    CHECK(op_norm(s.u * sigma * s.v.adjoint() - g) <=
          10.0 * tol.eq_tol * static_cast<double>(std::max(rows, cols)));
  }
}

TEST_CASE("clip_to_contraction clips singular values") {
  CMatrix m = CMatrix::Zero(2, 2);
  m(0, 0) = 2.0;
  m(1, 1) = 0.5;
  const CMatrix c = clip_to_contraction(m);
  CHECK(std::abs(c(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(c(1, 1)) == doctest::Approx(0.5));
}

TEST_CASE("clip_to_contraction fixes unitaries and is idempotent") {
  std::mt19937_64 rng(5);
  const CMatrix u = random_unitary(4, rng);
  CHECK(op_norm(clip_to_contraction(u) - u) < 1e-12);

  const CMatrix g = 3.0 * random_matrix(4, 4, rng);
  const CMatrix once = clip_to_contraction(g);
  CHECK(op_norm(clip_to_contraction(once) - once) < 1e-9);
  CHECK(op_norm(once) <= 1.0 + 1e-12);
}

TEST_CASE("clip_to_contraction is the HS-nearest contraction (sampling oracle)") {
  std::mt19937_64 rng(3);
  const CMatrix m = 2.0 * random_matrix(4, 4, rng);
  const CMatrix c = clip_to_contraction(m);
  const double d0 = hs_norm(c - m);
  for (int i = 0; i < 1000; ++i) {
    const CMatrix k = clip_to_contraction(2.0 * random_matrix(4, 4, rng));
    CHECK(d0 <= hs_norm(k - m) + 1e-12);
  }
}

TEST_CASE("trace_norm closed forms") {
  std::mt19937_64 rng(9);
  CVector x = random_unit_vector(4, rng) * 2.0;
  CVector y = random_unit_vector(4, rng) * 3.0;
  CHECK(trace_norm(x * y.adjoint()) == doctest::Approx(6.0));
  CHECK(trace_norm(CMatrix::Identity(5, 5)) == doctest::Approx(5.0));
}

TEST_CASE("trace_norm dominates the trace pairing against contractions") {
  std::mt19937_64 rng(11);
  const CMatrix m = random_matrix(4, 4, rng);
  const double tn = trace_norm(m);
  CHECK(tn >= op_norm(m) - 1e-12);
  for (int i = 0; i < 1000; ++i) {
    const CMatrix w = clip_to_contraction(2.0 * random_matrix(4, 4, rng));
    CHECK(std::abs((m * w).trace()) <= tn + 1e-9);
  }
}

TEST_CASE("trace_norm is invariant under adjoints and unitaries") {
  std::mt19937_64 rng(13);
  const CMatrix m = random_matrix(5, 5, rng);
  const CMatrix u = random_unitary(5, rng);
  const CMatrix v = random_unitary(5, rng);
  const double tn = trace_norm(m);
  CHECK(trace_norm(m.adjoint()) == doctest::Approx(tn).epsilon(1e-10));
  CHECK(trace_norm(u * m * v) == doctest::Approx(tn).epsilon(1e-10));
}

TEST_CASE("kron shapes and values") {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 1) = 2.0;
  const CMatrix k = kron(a, CMatrix::Identity(3, 3));
  CHECK(k.rows() == 6);
  CHECK(std::abs(k(0, 3) - Complex(2.0, 0.0)) < 1e-15);
  CHECK(std::abs(k(2, 5) - Complex(2.0, 0.0)) < 1e-15);
}
