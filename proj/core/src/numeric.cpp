#include "vfnorm/numeric.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace vfnorm {

bool is_finite(const CMatrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      const Complex z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

void ensure_finite(const CMatrix& m, const char* what) {
  if (!is_finite(m)) throw NonFinite(std::string(what) + ": NaN/Inf entry");
}

double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> s(m);
  return s.singularValues()(0);
}

double hs_norm(const CMatrix& m) { return m.norm(); }

Complex hs_inner(const CMatrix& a, const CMatrix& b) {
  return (b.adjoint() * a).trace();
}

HermitianEig hermitian_eig(const CMatrix& m, const Tolerances& tol) {
  if (m.rows() != m.cols())
    throw DimensionMismatch("hermitian_eig: matrix is not square");
  ensure_finite(m, "hermitian_eig");
  if (op_norm(m - m.adjoint()) > tol.eq(m.rows()))
    throw NotHermitian("hermitian_eig: ||M - M*|| exceeds tolerance");

  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) / 2.0);
  if (es.info() != Eigen::Success)
    throw Error("hermitian_eig: eigensolver did not converge");

  // Eigen sorts ascending; flip to descending.
  const Index n = m.rows();
  HermitianEig out;
  out.values = es.eigenvalues().reverse();
  out.vectors.resize(n, n);
  for (Index i = 0; i < n; ++i) out.vectors.col(i) = es.eigenvectors().col(n - 1 - i);
  return out;
}

Svd svd(const CMatrix& m) {
  ensure_finite(m, "svd");
  Eigen::JacobiSVD<CMatrix> s(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Svd{s.matrixU(), s.singularValues(), s.matrixV()};
}

CMatrix clip_to_contraction(const CMatrix& m) {
  ensure_finite(m, "clip_to_contraction");
  Eigen::JacobiSVD<CMatrix> s(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  RVector sv = s.singularValues();
  if (sv.size() == 0 || sv(0) <= 1.0) return m;  // already a contraction
  for (Index i = 0; i < sv.size(); ++i) sv(i) = std::min(sv(i), 1.0);
  return s.matrixU() * sv.asDiagonal() * s.matrixV().adjoint();
}

double trace_norm(const CMatrix& m) {
  ensure_finite(m, "trace_norm");
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> s(m);
  return s.singularValues().sum();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Complex random_complex(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

CMatrix random_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  CMatrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = random_complex(rng);
  return m;
}

CMatrix random_hermitian(Index dim, std::mt19937_64& rng) {
  const CMatrix g = random_matrix(dim, dim, rng);
  return (g + g.adjoint()) / 2.0;
}

CMatrix random_unitary(Index dim, std::mt19937_64& rng) {
  const CMatrix g = random_matrix(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  // Fix the phase of R's diagonal so the distribution is Haar.
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    q.col(i) *= (std::abs(d) > 0) ? d / std::abs(d) : Complex(1, 0);
  }
  return q;
}

CVector random_vector(Index dim, std::mt19937_64& rng) {
  CVector v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = random_complex(rng);
  return v;
}

CVector random_unit_vector(Index dim, std::mt19937_64& rng) {
  CVector v = random_vector(dim, rng);
  const double n = v.norm();
  if (n < 1e-12) return random_unit_vector(dim, rng);
  return v / n;
}

}  // namespace vfnorm
