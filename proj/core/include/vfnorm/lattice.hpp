// Finite subspace lattices of orthogonal projections: construction, meet/join
// closure, CSL detection, invariance checks and the lattice-side minimax
// d((x,y), E_L)^2 = min_L ||L^perp x||^2 + ||L y||^2.
#pragma once

#include <vector>

#include "vfnorm/numeric.hpp"
#include "vfnorm/types.hpp"

namespace vfnorm {

struct Projection {
  CMatrix matrix;
  int rank = 0;

  Index dim() const { return matrix.rows(); }
  CMatrix complement() const { return CMatrix::Identity(dim(), dim()) - matrix; }

  // Validates P = P^*, P^2 = P and rank = round(tr P).
  static Projection from_matrix(const CMatrix& p, const Tolerances& tol = {});
  static Projection zero(Index dim);
  static Projection identity(Index dim);
};

// Orthogonal projection onto the span of the given columns; rank determined
// at rank_tol.
Projection projection_from_columns(const CMatrix& columns, const Tolerances& tol = {});
Projection projection_from_columns(const std::vector<CVector>& basis, const Tolerances& tol = {});

// Projection onto ran P ∩ ran Q, computed as the eigenvalue-2 eigenspace of
// P + Q (cutoff 2 - rank_tol). Equals PQ when P and Q commute.
Projection meet(const Projection& p, const Projection& q, const Tolerances& tol = {});

// (meet(P^perp, Q^perp))^perp.
Projection join(const Projection& p, const Projection& q, const Tolerances& tol = {});

struct SubspaceLattice {
  Index dim = 0;
  std::vector<Projection> elements;  // deduplicated, includes 0 and I
  bool contains_zero = false;
  bool contains_identity = false;
  bool is_commutative = false;

  std::size_t size() const { return elements.size(); }

  // Adds 0 and I, deduplicates, verifies pairwise meet/join closure and sets
  // the commutativity flag. Throws Error if the family is not closed.
  static SubspaceLattice from_elements(Index dim, std::vector<Projection> elements,
                                       const Tolerances& tol = {});
};

// Smallest meet/join-closed family containing generators ∪ {0, I}. Throws
// ClosureOverflow when the fixpoint iteration exceeds max_size elements.
SubspaceLattice lattice_closure(const std::vector<Projection>& generators, int max_size,
                                const Tolerances& tol = {});

// true iff ||(I-L) T L|| <= tol for every generator T.
bool check_invariant(const Projection& l, const std::vector<CMatrix>& generators,
                     const Tolerances& tol = {});

struct LatDistance {
  double value = 0.0;
  Projection argmin;
};

// min over lattice elements of ||L^perp x||^2 + ||L y||^2, with the stated
// tie-break (smallest rank, then element order).
LatDistance lat_distance_sq(const SubspaceLattice& lattice, const CVector& x, const CVector& y,
                            const Tolerances& tol = {});

// Same minimization over an explicit element list (no lattice flags needed).
LatDistance lat_distance_sq(const std::vector<Projection>& elements, const CVector& x,
                            const CVector& y, const Tolerances& tol = {});

}  // namespace vfnorm
