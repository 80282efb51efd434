#include "vfnorm/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace vfnorm {

namespace {

Eigen::Map<const CVector> vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, Index n) {
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

double offdiag_norm(const CMatrix& m) {
  CMatrix d = m;
  d.diagonal().setZero();
  return d.norm();
}

// Simultaneous eigenbasis of a commuting family of projections: one shot with
// a random real combination, sequential block refinement as fallback.
CMatrix joint_eigenbasis(const std::vector<Projection>& elems, const Tolerances& tol) {
  const Index n = elems[0].dim();

  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);  // fixed: the basis must be reproducible
  std::uniform_real_distribution<double> coeff(0.25, 1.0);
  CMatrix h = CMatrix::Zero(n, n);
  for (const Projection& e : elems) h += coeff(rng) * e.matrix;
  CMatrix u = hermitian_eig((h + h.adjoint()) / 2.0, tol).vectors;

  auto diagonalizes = [&](const CMatrix& basis) {
    for (const Projection& e : elems)
      if (offdiag_norm(basis.adjoint() * e.matrix * basis) > tol.eq(n)) return false;
    return true;
  };
  if (diagonalizes(u)) return u;

  // Refinement: split blocks by each element's 0/1 eigenspaces in turn.
  std::vector<CMatrix> blocks = {CMatrix::Identity(n, n)};
  for (const Projection& e : elems) {
    std::vector<CMatrix> next;
    for (const CMatrix& v : blocks) {
      if (v.cols() <= 1) {
        next.push_back(v);
        continue;
      }
      const CMatrix a = v.adjoint() * e.matrix * v;
      const HermitianEig eig = hermitian_eig((a + a.adjoint()) / 2.0, tol);
      Index ones = 0;
      while (ones < eig.values.size() && eig.values(ones) >= 0.5) ++ones;
      if (ones == 0 || ones == eig.values.size()) {
        next.push_back(v);
        continue;
      }
      next.push_back(v * eig.vectors.leftCols(ones));
      next.push_back(v * eig.vectors.rightCols(eig.values.size() - ones));
    }
    blocks = std::move(next);
  }
  CMatrix refined(n, n);
  Index col = 0;
  for (const CMatrix& v : blocks) {
    refined.middleCols(col, v.cols()) = v;
    col += v.cols();
  }
  if (!diagonalizes(refined))
    throw NotCommutative("joint_eigenbasis: family does not commute");
  return refined;
}

}  // namespace

struct AlgebraModel::Impl {
  Kind kind = Kind::Full;
  Index dim = 0;
  Tolerances tol;

  // Csl
  SubspaceLattice lattice;
  CMatrix joint_basis;                        // unitary
  std::vector<std::vector<bool>> masks;       // per element: chi_L on basis vectors
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed;

  // TwoSubspace
  HalmosModel halmos;
  CMatrix member_basis;  // n^2 x d, HS-orthonormal nullspace of the constraints

  // BlockVonNeumann
  std::vector<std::pair<int, int>> blocks;
  std::vector<Index> block_offsets;

  // DirectSum
  std::vector<AlgebraModel> parts;
  std::vector<Index> part_offsets;

  CMatrix project(const CMatrix& m) const;
};

CMatrix AlgebraModel::Impl::project(const CMatrix& m) const {
  switch (kind) {
    case Kind::Full:
      return m;
    case Kind::Csl: {
      CMatrix t = joint_basis.adjoint() * m * joint_basis;
      for (Index i = 0; i < dim; ++i)
        for (Index j = 0; j < dim; ++j)
          if (!allowed(i, j)) t(i, j) = 0.0;
      return joint_basis * t * joint_basis.adjoint();
    }
    case Kind::TwoSubspace: {
      const CVector coords = member_basis.adjoint() * vec(m);
      return unvec(member_basis * coords, dim);
    }
    case Kind::BlockVonNeumann: {
      CMatrix out = CMatrix::Zero(dim, dim);
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto [s, mult] = blocks[k];
        const Index off = block_offsets[k];
        CMatrix c = CMatrix::Zero(s, s);
        for (Index i = 0; i < s; ++i)
          for (Index j = 0; j < s; ++j) {
            Complex acc = 0.0;
            for (Index a = 0; a < mult; ++a) acc += m(off + i * mult + a, off + j * mult + a);
            c(i, j) = acc / static_cast<double>(mult);
          }
        out.block(off, off, s * mult, s * mult) = kron(c, CMatrix::Identity(mult, mult));
      }
      return out;
    }
    case Kind::DirectSum: {
      CMatrix out = CMatrix::Zero(dim, dim);
      for (std::size_t k = 0; k < parts.size(); ++k) {
        const Index off = part_offsets[k];
        const Index d = parts[k].dim();
        out.block(off, off, d, d) = hs_project(parts[k], m.block(off, off, d, d));
      }
      return out;
    }
  }
  throw Error("AlgebraModel: unknown kind");
}

AlgebraModel AlgebraModel::full(Index dim) {
  if (dim < 1) throw DimensionMismatch("AlgebraModel::full: dim must be positive");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Full;
  impl->dim = dim;
  return AlgebraModel(std::move(impl));
}

AlgebraModel AlgebraModel::csl(SubspaceLattice lattice, const Tolerances& tol) {
  if (!lattice.is_commutative)
    throw NotCommutative("AlgebraModel::csl: lattice is not commutative");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Csl;
  impl->dim = lattice.dim;
  impl->tol = tol;
  impl->joint_basis = joint_eigenbasis(lattice.elements, tol);

  const Index n = lattice.dim;
  impl->masks.reserve(lattice.elements.size());
  for (const Projection& e : lattice.elements) {
    const CMatrix d = impl->joint_basis.adjoint() * e.matrix * impl->joint_basis;
    std::vector<bool> chi(n);
    for (Index i = 0; i < n; ++i) chi[i] = d(i, i).real() > 0.5;
    impl->masks.push_back(std::move(chi));
  }
  impl->allowed.setConstant(n, n, true);
  for (const auto& chi : impl->masks)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        if (!chi[i] && chi[j]) impl->allowed(i, j) = false;  // L^perp T L entry
  impl->lattice = std::move(lattice);
  return AlgebraModel(std::move(impl));
}

AlgebraModel AlgebraModel::two_subspace(HalmosModel model, const Tolerances& tol) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::TwoSubspace;
  impl->dim = model.dim();
  impl->tol = tol;
  OperatorSubspaceBasis basis =
      constraint_member_basis({model.proj_p, model.proj_q}, model.dim(), tol);
  CMatrix packed(impl->dim * impl->dim, static_cast<Index>(basis.elements.size()));
  for (std::size_t i = 0; i < basis.elements.size(); ++i)
    packed.col(static_cast<Index>(i)) = vec(basis.elements[i]);
  impl->member_basis = std::move(packed);
  impl->halmos = std::move(model);
  return AlgebraModel(std::move(impl));
}

AlgebraModel AlgebraModel::block_von_neumann(std::vector<std::pair<int, int>> blocks,
                                             const Tolerances& tol) {
  if (blocks.empty()) throw DimensionMismatch("block_von_neumann: no blocks");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::BlockVonNeumann;
  impl->tol = tol;
  Index dim = 0;
  for (const auto& [s, m] : blocks) {
    if (s < 1 || m < 1) throw DimensionMismatch("block_von_neumann: nonpositive block");
    impl->block_offsets.push_back(dim);
    dim += static_cast<Index>(s) * m;
  }
  impl->dim = dim;
  impl->blocks = std::move(blocks);
  return AlgebraModel(std::move(impl));
}

AlgebraModel AlgebraModel::direct_sum(std::vector<AlgebraModel> parts) {
  if (parts.empty()) throw DimensionMismatch("direct_sum: empty part list");
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::DirectSum;
  impl->tol = parts[0].tol();
  Index dim = 0;
  for (const AlgebraModel& p : parts) {
    impl->part_offsets.push_back(dim);
    dim += p.dim();
  }
  impl->dim = dim;
  impl->parts = std::move(parts);
  return AlgebraModel(std::move(impl));
}

AlgebraModel::Kind AlgebraModel::kind() const { return impl_->kind; }
Index AlgebraModel::dim() const { return impl_->dim; }
const Tolerances& AlgebraModel::tol() const { return impl_->tol; }

const SubspaceLattice& AlgebraModel::csl_lattice() const {
  if (impl_->kind != Kind::Csl) throw Error("csl_lattice: not a CSL model");
  return impl_->lattice;
}

const HalmosModel& AlgebraModel::halmos() const {
  if (impl_->kind != Kind::TwoSubspace) throw Error("halmos: not a two-subspace model");
  return impl_->halmos;
}

const std::vector<std::pair<int, int>>& AlgebraModel::blocks() const {
  if (impl_->kind != Kind::BlockVonNeumann) throw Error("blocks: not a block model");
  return impl_->blocks;
}

const std::vector<AlgebraModel>& AlgebraModel::parts() const {
  if (impl_->kind != Kind::DirectSum) throw Error("parts: not a direct sum");
  return impl_->parts;
}

bool AlgebraModel::has_finite_lattice() const {
  switch (impl_->kind) {
    case Kind::Full:
    case Kind::Csl:
    case Kind::TwoSubspace:
      return true;
    case Kind::BlockVonNeumann:
      return false;
    case Kind::DirectSum:
      return std::all_of(impl_->parts.begin(), impl_->parts.end(),
                         [](const AlgebraModel& p) { return p.has_finite_lattice(); });
  }
  return false;
}

std::vector<Projection> AlgebraModel::finite_lattice() const {
  constexpr std::size_t kMaxProduct = 1 << 14;
  switch (impl_->kind) {
    case Kind::Full:
      return {Projection::zero(impl_->dim), Projection::identity(impl_->dim)};
    case Kind::Csl:
      return impl_->lattice.elements;
    case Kind::TwoSubspace:
      return impl_->halmos.lattice().elements;
    case Kind::BlockVonNeumann:
      throw Error("finite_lattice: block von Neumann lattice is not finite");
    case Kind::DirectSum: {
      // Lat(A1 ⊕ A2) = Lat A1 × Lat A2 for unital parts.
      std::vector<Projection> out;
      std::vector<std::vector<Projection>> part_lats;
      std::size_t total = 1;
      for (const AlgebraModel& p : impl_->parts) {
        part_lats.push_back(p.finite_lattice());
        total *= part_lats.back().size();
        if (total > kMaxProduct) throw ClosureOverflow("finite_lattice: product too large");
      }
      // Build the product iteratively.
      std::vector<CMatrix> partial = {CMatrix(0, 0)};
      for (const auto& lat : part_lats) {
        std::vector<CMatrix> next;
        next.reserve(partial.size() * lat.size());
        for (const CMatrix& head : partial)
          for (const Projection& tail : lat) {
            CMatrix m = CMatrix::Zero(head.rows() + tail.dim(), head.rows() + tail.dim());
            m.topLeftCorner(head.rows(), head.rows()) = head;
            m.bottomRightCorner(tail.dim(), tail.dim()) = tail.matrix;
            next.push_back(std::move(m));
          }
        partial = std::move(next);
      }
      out.reserve(partial.size());
      for (CMatrix& m : partial) {
        const int rank = static_cast<int>(std::lround(m.trace().real()));
        out.push_back(Projection{std::move(m), rank});
      }
      return out;
    }
  }
  throw Error("finite_lattice: unknown kind");
}

AlgebraModel AlgebraModel::adjoint_model() const {
  switch (impl_->kind) {
    case Kind::Full:
      return *this;
    case Kind::Csl: {
      std::vector<Projection> flipped;
      flipped.reserve(impl_->lattice.elements.size());
      for (const Projection& e : impl_->lattice.elements)
        flipped.push_back(
            Projection{e.complement(), static_cast<int>(e.dim()) - e.rank});
      return csl(SubspaceLattice::from_elements(impl_->dim, std::move(flipped), impl_->tol),
                 impl_->tol);
    }
    default:
      throw Error("adjoint_model: only Full and Csl models are supported");
  }
}

std::string AlgebraModel::summary() const {
  std::ostringstream os;
  switch (impl_->kind) {
    case Kind::Full:
      os << "full(dim=" << impl_->dim << ")";
      break;
    case Kind::Csl:
      os << "csl(dim=" << impl_->dim << ", lattice=" << impl_->lattice.size() << ")";
      break;
    case Kind::TwoSubspace:
      os << "two_subspace(h0=" << impl_->halmos.h0_dim
         << (impl_->halmos.angle_positive ? ", angle>0" : ", angle=0") << ")";
      break;
    case Kind::BlockVonNeumann: {
      os << "block_vn(";
      for (std::size_t i = 0; i < impl_->blocks.size(); ++i)
        os << (i ? " " : "") << impl_->blocks[i].first << "x" << impl_->blocks[i].second;
      os << ")";
      break;
    }
    case Kind::DirectSum: {
      os << "direct_sum(";
      for (std::size_t i = 0; i < impl_->parts.size(); ++i)
        os << (i ? " + " : "") << impl_->parts[i].summary();
      os << ")";
      break;
    }
  }
  return os.str();
}

bool membership(const AlgebraModel& a, const CMatrix& t, double tol) {
  if (t.rows() != a.dim() || t.cols() != a.dim())
    throw DimensionMismatch("membership: operator dimension mismatch");
  ensure_finite(t, "membership");
  switch (a.kind()) {
    case AlgebraModel::Kind::Full:
      return true;
    case AlgebraModel::Kind::Csl:
    case AlgebraModel::Kind::TwoSubspace: {
      const std::vector<Projection> lat = a.finite_lattice();
      for (const Projection& l : lat)
        if (op_norm(l.complement() * t * l.matrix) > tol) return false;
      return true;
    }
    case AlgebraModel::Kind::BlockVonNeumann:
      return op_norm(t - hs_project(a, t)) <= tol;
    case AlgebraModel::Kind::DirectSum: {
      const auto& parts = a.parts();
      Index off = 0;
      CMatrix masked = t;
      for (const AlgebraModel& p : parts) {
        if (!membership(p, t.block(off, off, p.dim(), p.dim()), tol)) return false;
        masked.block(off, off, p.dim(), p.dim()).setZero();
        off += p.dim();
      }
      return op_norm(masked) <= tol;  // no off-diagonal coupling
    }
  }
  throw Error("membership: unknown kind");
}

CMatrix hs_project(const AlgebraModel& a, const CMatrix& m) {
  if (m.rows() != a.dim() || m.cols() != a.dim())
    throw DimensionMismatch("hs_project: dimension mismatch");
  return a.impl_->project(m);
}

OperatorSubspaceBasis commutant_basis(const std::vector<CMatrix>& generators,
                                      const Tolerances& tol) {
  if (generators.empty()) throw DimensionMismatch("commutant_basis: no generators");
  const Index n = generators[0].rows();
  for (const CMatrix& g : generators)
    if (g.rows() != n || g.cols() != n)
      throw DimensionMismatch("commutant_basis: generator dimension mismatch");

  // vec(XT - TX) = (T^T ⊗ I - I ⊗ T) vec X.
  const Index nn = n * n;
  CMatrix k(static_cast<Index>(generators.size()) * nn, nn);
  const CMatrix id = CMatrix::Identity(n, n);
  for (std::size_t g = 0; g < generators.size(); ++g)
    k.middleRows(static_cast<Index>(g) * nn, nn) =
        kron(generators[g].transpose(), id) - kron(id, generators[g]);

  const Svd s = svd(k);
  const double cut = tol.rank_tol * std::max(1.0, s.singular_values.size() ? s.singular_values(0) : 0.0);
  Index rank = 0;
  while (rank < s.singular_values.size() && s.singular_values(rank) > cut) ++rank;

  OperatorSubspaceBasis basis;
  basis.dim = n;
  for (Index c = rank; c < nn; ++c) basis.elements.push_back(unvec(s.v.col(c), n));
  return basis;
}

CMatrix conditional_expectation(const OperatorSubspaceBasis& basis, const CMatrix& m) {
  if (m.rows() != basis.dim || m.cols() != basis.dim)
    throw DimensionMismatch("conditional_expectation: dimension mismatch");
  CMatrix out = CMatrix::Zero(basis.dim, basis.dim);
  for (const CMatrix& b : basis.elements) out += hs_inner(m, b) * b;
  return out;
}

OperatorSubspaceBasis constraint_member_basis(const std::vector<Projection>& elements,
                                              Index dim, const Tolerances& tol) {
  const Index nn = dim * dim;
  std::vector<const Projection*> nontrivial;
  for (const Projection& e : elements) {
    if (e.dim() != dim) throw DimensionMismatch("constraint_member_basis: dimension mismatch");
    if (e.rank != 0 && e.rank != dim) nontrivial.push_back(&e);
  }

  OperatorSubspaceBasis basis;
  basis.dim = dim;
  if (nontrivial.empty()) {
    // Unconstrained: the full matrix-unit basis.
    for (Index c = 0; c < nn; ++c) {
      CVector e = CVector::Zero(nn);
      e(c) = 1.0;
      basis.elements.push_back(unvec(e, dim));
    }
    return basis;
  }

  // vec(L^perp T L) = (L^T ⊗ L^perp) vec T.
  CMatrix k(static_cast<Index>(nontrivial.size()) * nn, nn);
  for (std::size_t i = 0; i < nontrivial.size(); ++i)
    k.middleRows(static_cast<Index>(i) * nn, nn) =
        kron(nontrivial[i]->matrix.transpose(), nontrivial[i]->complement());

  const Svd s = svd(k);
  const double cut = tol.rank_tol * std::max(1.0, s.singular_values.size() ? s.singular_values(0) : 0.0);
  Index rank = 0;
  while (rank < s.singular_values.size() && s.singular_values(rank) > cut) ++rank;
  for (Index c = rank; c < nn; ++c) basis.elements.push_back(unvec(s.v.col(c), dim));
  return basis;
}

CMatrix random_member(const AlgebraModel& a, std::mt19937_64& rng) {
  return hs_project(a, random_matrix(a.dim(), a.dim(), rng));
}

}  // namespace vfnorm
