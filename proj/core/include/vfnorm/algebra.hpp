// Concrete finite-dimensional algebra models: full algebra, CSL algebra,
// two-subspace algebra, block von Neumann algebra and direct sums. Provides
// membership tests, Hilbert-Schmidt projection onto the member span,
// commutants and conditional expectations. Models are immutable and share
// their precomputed projection data.
#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "vfnorm/halmos.hpp"
#include "vfnorm/lattice.hpp"
#include "vfnorm/types.hpp"

namespace vfnorm {

struct OperatorSubspaceBasis {
  Index dim = 0;
  std::vector<CMatrix> elements;  // pairwise HS-orthonormal
};

class AlgebraModel {
 public:
  enum class Kind { Full, Csl, TwoSubspace, BlockVonNeumann, DirectSum };

  static AlgebraModel full(Index dim);
  static AlgebraModel csl(SubspaceLattice lattice, const Tolerances& tol = {});
  static AlgebraModel two_subspace(HalmosModel model, const Tolerances& tol = {});
  // blocks: (block_size, multiplicity) pairs, algebra ⊕_k M_size ⊗ I_mult.
  static AlgebraModel block_von_neumann(std::vector<std::pair<int, int>> blocks,
                                        const Tolerances& tol = {});
  static AlgebraModel direct_sum(std::vector<AlgebraModel> parts);

  Kind kind() const;
  Index dim() const;
  const Tolerances& tol() const;

  const SubspaceLattice& csl_lattice() const;                 // Kind::Csl
  const HalmosModel& halmos() const;                          // Kind::TwoSubspace
  const std::vector<std::pair<int, int>>& blocks() const;     // Kind::BlockVonNeumann
  const std::vector<AlgebraModel>& parts() const;             // Kind::DirectSum

  // Explicit invariant projection lattice, when finite: {0, I} for the full
  // algebra, the carried lattice for CSL/two-subspace, the product lattice
  // for direct sums. BlockVonNeumann has no finite lattice.
  bool has_finite_lattice() const;
  std::vector<Projection> finite_lattice() const;

  // Model of the adjoint algebra (Alg L)^* = Alg {L^perp} (Full and Csl only).
  AlgebraModel adjoint_model() const;

  std::string summary() const;

  struct Impl;

 private:
  explicit AlgebraModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
  friend CMatrix hs_project(const AlgebraModel&, const CMatrix&);
};

bool membership(const AlgebraModel& a, const CMatrix& t, double tol);

// HS-orthogonal projection onto the linear span of the algebra. Idempotent,
// HS-self-adjoint; outputs pass membership.
CMatrix hs_project(const AlgebraModel& a, const CMatrix& m);

// HS-orthonormal basis of {X : XT = TX for all generators T}, from the null
// space of the vectorized commutator map.
OperatorSubspaceBasis commutant_basis(const std::vector<CMatrix>& generators,
                                      const Tolerances& tol = {});

// HS-orthogonal projection onto the span of the basis.
CMatrix conditional_expectation(const OperatorSubspaceBasis& basis, const CMatrix& m);

// HS-orthonormal basis of the solution space of the constraints
// L^perp T L = 0, L in elements. Cross-check route for the masked CSL
// projection; the primary route for the two-subspace algebra.
OperatorSubspaceBasis constraint_member_basis(const std::vector<Projection>& elements,
                                              Index dim, const Tolerances& tol = {});

// hs_project of a complex-normal sample; a member, not necessarily a
// contraction.
CMatrix random_member(const AlgebraModel& a, std::mt19937_64& rng);

}  // namespace vfnorm
