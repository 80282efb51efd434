// Two subspaces in generic position: the graph-model data (B, Gamma, P, Q, S),
// the similarity with the block-diagonal algebra, the m/a comparison values
// with their closed-form constants, the antidiagonal closed-form norm and the
// degenerate-angle violation scan.
#pragma once

#include <utility>
#include <vector>

#include "vfnorm/lattice.hpp"
#include "vfnorm/numeric.hpp"
#include "vfnorm/types.hpp"

namespace vfnorm {

// Smallest B-eigenvalue for which B^{-1/2} is trusted; below it the
// similarity-dependent parts are disabled.
inline constexpr double kAngleThreshold = 1e-8;

struct HalmosModel {
  Index h0_dim = 0;
  CMatrix b;            // Hermitian on H0, spectrum in (0,1)
  RVector spectrum;     // descending eigenvalues of b
  CMatrix b_vectors;    // unitary diagonalizing b (columns follow spectrum)
  CMatrix gamma;        // (I+B^2)^{-1} ⊕ (I+B^2)^{-1}
  Projection proj_p;    // projection onto N = {(x, Bx)}
  Projection proj_q;    // projection onto M = {(x, -Bx)}
  CMatrix s, s_inv;     // empty unless angle_positive
  bool angle_positive = false;

  Index dim() const { return 2 * h0_dim; }

  // {0, P, Q, I}; generic position makes this closed (meet 0, join I).
  SubspaceLattice lattice() const;

  // Spectral power B^p (p may be negative only when angle_positive).
  CMatrix b_pow(double p) const;
};

// Builds the model from a Hermitian B with spectrum in (0,1). In scan mode
// eigenvalues arbitrarily close to 0 are accepted and only disable the
// similarity parts; outside scan mode they raise SpectrumOutOfRange.
HalmosModel build_halmos(const CMatrix& b, const Tolerances& tol = {}, bool scan_mode = false);

// S (C ⊕ D2) S^{-1}: a member of the two-subspace algebra for arbitrary
// blocks C, D2 on H0. Requires angle_positive.
CMatrix conjugated_member(const HalmosModel& model, const CMatrix& c, const CMatrix& d2);

struct MValues {
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  double min() const { return std::min(std::min(m1, m2), std::min(m3, m4)); }
};
MValues m_values(const HalmosModel& model, const CVector& x, const CVector& y);

struct AValues {
  double a1 = 0, a2 = 0, a3 = 0, a4 = 0;
  double min() const { return std::min(std::min(a1, a2), std::min(a3, a4)); }
};
// Squared form: a2 = ||P^perp x||^2 + ||P y||^2 and cyclically.
AValues a_values(const HalmosModel& model, const CVector& x, const CVector& y);

struct LemmaConstants {
  double c1 = 0, c2 = 0, c3 = 0, c4 = 0;
  double c = 0;  // max of the four
};
// Closed forms: c1 = 1/2 ||B^{-1}||^2 ||B^{1/2}||^2 a^{-2}, c2 = c3 = 2 ||Gamma||^2 a^{-2},
// c4 = 1/2 ||B^{-1}||^2 a^{-2}, with a^2 = 1/2. Pairing: a1<=c1 m1, a2<=c2 m3,
// a3<=c3 m2, a4<=c4 m4.
LemmaConstants lemma_constants(const HalmosModel& model);

struct ClosedFormNorm {
  double value = 0.0;
  CMatrix witness;
};
// ||B x1|| ||B y2|| for the structured pair x = (x1, 0), y = (0, y2), with the
// attaining antidiagonal witness [[0, D], [BDB, 0]].
ClosedFormNorm closed_form_norm(const HalmosModel& model, const CVector& x1, const CVector& y2);

struct ScanRow {
  double lambda_j = 0, lambda_k = 0;
  double lhs = 0;          // lattice minimax at x = (e_j, 0), y = (0, e_k)
  double norm = 0;         // closed-form functional norm lambda_j * lambda_k
  double ratio = 0;        // lhs / norm
  double paper_bound = 0;  // lambda_k / (4 lambda_j)
};
// Runs the structured eigenvector pairs against B = diag(spectrum) and checks
// lhs >= 1/4 lambda_k^2 and ratio >= paper_bound on every row.
std::vector<ScanRow> violation_scan(const RVector& spectrum,
                                    const std::vector<std::pair<int, int>>& pairs,
                                    const Tolerances& tol = {});

}  // namespace vfnorm
