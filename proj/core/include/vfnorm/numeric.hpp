// Dense complex linear-algebra primitives: Hermitian eigendecomposition, SVD,
// norms, contraction clipping and seeded random generators. Everything here is
// pure and safe to call concurrently.
#pragma once

#include <random>
#include <vector>

#include "vfnorm/types.hpp"

namespace vfnorm {

struct HermitianEig {
  RVector values;   // descending
  CMatrix vectors;  // unitary, column i pairs with values[i]
};

struct Svd {
  CMatrix u;               // full, rows x rows
  RVector singular_values; // descending, length min(rows, cols)
  CMatrix v;               // full, cols x cols;  m = u * diag * v.adjoint()
};

bool is_finite(const CMatrix& m);
void ensure_finite(const CMatrix& m, const char* what);

double op_norm(const CMatrix& m);                       // largest singular value
double hs_norm(const CMatrix& m);                       // Frobenius
Complex hs_inner(const CMatrix& a, const CMatrix& b);   // tr(b^* a)

// M = U diag(values) U^* with values sorted descending. Throws NotHermitian
// when ||M - M^*|| exceeds the scaled equality threshold.
HermitianEig hermitian_eig(const CMatrix& m, const Tolerances& tol = {});

Svd svd(const CMatrix& m);

// Nearest contraction in Hilbert-Schmidt distance: U min(Sigma, 1) V^*.
CMatrix clip_to_contraction(const CMatrix& m);

double trace_norm(const CMatrix& m);  // sum of singular values

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Complex-normal samples (independent N(0,1/2) real and imaginary parts, so
// E|z|^2 = 1). Deterministic given the engine state.
Complex random_complex(std::mt19937_64& rng);
CMatrix random_matrix(Index rows, Index cols, std::mt19937_64& rng);
CMatrix random_hermitian(Index dim, std::mt19937_64& rng);
CMatrix random_unitary(Index dim, std::mt19937_64& rng);
CVector random_vector(Index dim, std::mt19937_64& rng);
CVector random_unit_vector(Index dim, std::mt19937_64& rng);

}  // namespace vfnorm
