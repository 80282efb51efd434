// Certified computation of the vector-functional norm
//   ||omega_{x,y}|_A|| = sup { |(Tx, y)| : T in ball(A) }
// as a two-sided bracket with a feasible witness contraction and a trace-norm
// dual certificate, plus the constrained interpolation solver Tx = y.
#pragma once

#include <optional>

#include "vfnorm/algebra.hpp"
#include "vfnorm/types.hpp"

namespace vfnorm {

struct NormOptions {
  double tol = 1e-7;     // bracket width target, relative to max(1, upper)
  int max_iter = 50000;
  Tolerances tolerances;
};

struct NormResult {
  double lower = 0.0;
  double upper = 0.0;
  CMatrix witness;      // member of A, ||.|| <= 1, (witness x, y) = lower (real, >= 0)
  CMatrix certificate;  // Z with tr(T Z) = 0 on A and upper = ||xy^* - Z||_1
  int iterations = 0;
  bool converged = false;
};

// Douglas-Rachford on max Re tr(TF), F = x y^*, over {members} ∩ {op-norm
// ball}. Both bracket sides are valid at every iterate: the lower bound comes
// from a feasible rescaled member, the upper bound from an exactly
// HS-complement-projected dual point. Never throws on slow convergence; the
// best bracket is returned with converged = false.
NormResult functional_norm(const AlgebraModel& a, const CVector& x, const CVector& y,
                           const NormOptions& opt = {});

// Max of |(Tx, y)| over `samples` random members rescaled into the unit ball;
// a valid lower bound for the functional norm, deterministic given seed.
double functional_norm_sampling(const AlgebraModel& a, const CVector& x, const CVector& y,
                                int samples, std::uint64_t seed);

struct InterpolationResult {
  // Exactly one of the two is set.
  std::optional<CMatrix> solution;     // member, contraction, ||Tx - y|| <= tol
  std::optional<Projection> violation; // lattice element with ||L^perp y|| > ||L^perp x||
};

// Existence of T in ball(A) with Tx = y, for algebras with an explicit finite
// lattice. Any lattice element violating ||L^perp y|| <= ||L^perp x|| is
// returned as the violation; otherwise a convex-feasibility solve produces
// the solution. Throws NoConvergence when the iteration budget runs out.
InterpolationResult interpolate(const AlgebraModel& a, const CVector& x, const CVector& y,
                                double tol = 1e-7, int max_iter = 50000);

}  // namespace vfnorm
