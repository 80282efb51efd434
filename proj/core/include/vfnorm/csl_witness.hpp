// Constructive property-(V) witness for finite CSLs: locate the minimizing
// projection, split the space, verify the two restricted inequality families
// and assemble T = T1 ⊕ T2^* from the interpolation subproblems.
#pragma once

#include "vfnorm/funcnorm.hpp"
#include "vfnorm/lattice.hpp"

namespace vfnorm {

struct SplitData {
  Projection p;          // minimizer of ||L^perp x||^2 + ||L y||^2
  double lat_value = 0;  // the attained minimum
  CVector x1, x2, y1, y2;  // Px, P^perp x, Py, P^perp y (full space)
  CMatrix iso1, iso2;      // isometries onto ran P and ran P^perp (n x r1, n x r2)
  SubspaceLattice l1, l2;  // restricted lattices; untouched when the summand is 0-dim
};

SplitData split(const SubspaceLattice& lattice, const CVector& x, const CVector& y,
                const Tolerances& tol = {});

// eq-style consequences of minimality: ||L^perp y1|| <= ||L^perp x1|| on the
// first summand and ||L x2|| <= ||L y2|| on the second. False indicates a
// numerical or construction fault, not a property violation.
bool verify_split_inequalities(const SplitData& s, const Tolerances& tol = {});

struct WitnessResult {
  CMatrix t;
  double value = 0.0;  // (Tx, y), real up to roundoff
};

// T in ball(Alg L) with (Tx, y) >= lat_distance_sq(L, x, y) - tol.
WitnessResult build_witness(const SubspaceLattice& lattice, const CVector& x, const CVector& y,
                            double tol = 1e-7, int max_iter = 50000,
                            const Tolerances& tolerances = {});

}  // namespace vfnorm
