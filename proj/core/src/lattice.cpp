#include "vfnorm/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace vfnorm {

namespace {

bool same_projection(const Projection& a, const Projection& b, const Tolerances& tol) {
  if (a.rank != b.rank) return false;
  return op_norm(a.matrix - b.matrix) <= tol.eq(a.dim());
}

// Index of an equal element, or -1.
int find_element(const std::vector<Projection>& elems, const Projection& p,
                 const Tolerances& tol) {
  for (std::size_t i = 0; i < elems.size(); ++i)
    if (same_projection(elems[i], p, tol)) return static_cast<int>(i);
  return -1;
}

void check_common_dim(const std::vector<Projection>& ps) {
  for (std::size_t i = 1; i < ps.size(); ++i)
    if (ps[i].dim() != ps[0].dim())
      throw DimensionMismatch("projections do not share a dimension");
}

}  // namespace

Projection Projection::from_matrix(const CMatrix& p, const Tolerances& tol) {
  if (p.rows() != p.cols()) throw DimensionMismatch("Projection: matrix is not square");
  ensure_finite(p, "Projection");
  const double thr = tol.eq(p.rows());
  if (op_norm(p - p.adjoint()) > thr)
    throw Error("Projection: not self-adjoint");
  if (op_norm(p * p - p) > thr)
    throw Error("Projection: not idempotent");
  const double tr = p.trace().real();
  const int rank = static_cast<int>(std::lround(tr));
  if (std::abs(tr - rank) > thr || rank < 0 || rank > p.rows())
    throw Error("Projection: trace is not a valid rank");
  return Projection{p, rank};
}

Projection Projection::zero(Index dim) { return Projection{CMatrix::Zero(dim, dim), 0}; }

Projection Projection::identity(Index dim) {
  return Projection{CMatrix::Identity(dim, dim), static_cast<int>(dim)};
}

Projection projection_from_columns(const CMatrix& columns, const Tolerances& tol) {
  ensure_finite(columns, "projection_from_columns");
  const Index n = columns.rows();
  if (columns.cols() == 0) return Projection::zero(n);
  Eigen::JacobiSVD<CMatrix> s(columns, Eigen::ComputeThinU);
  const RVector sv = s.singularValues();
  const double cut = tol.rank_tol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Index r = 0;
  while (r < sv.size() && sv(r) > cut) ++r;
  if (r == 0) return Projection::zero(n);
  const CMatrix u = s.matrixU().leftCols(r);
  return Projection{u * u.adjoint(), static_cast<int>(r)};
}

Projection projection_from_columns(const std::vector<CVector>& basis, const Tolerances& tol) {
  if (basis.empty())
    throw DimensionMismatch("projection_from_columns: empty basis has no ambient dimension");
  const Index n = basis[0].size();
  CMatrix cols(n, static_cast<Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    if (basis[j].size() != n)
      throw DimensionMismatch("projection_from_columns: vectors of mixed dimension");
    cols.col(static_cast<Index>(j)) = basis[j];
  }
  return projection_from_columns(cols, tol);
}

Projection meet(const Projection& p, const Projection& q, const Tolerances& tol) {
  if (p.dim() != q.dim()) throw DimensionMismatch("meet: dimension mismatch");
  const Index n = p.dim();
  // ran P ∩ ran Q = eigenspace of P + Q at eigenvalue 2.
  const HermitianEig eig = hermitian_eig(p.matrix + q.matrix, tol);
  Index r = 0;
  while (r < n && eig.values(r) >= 2.0 - tol.rank_tol) ++r;
  if (r == 0) return Projection::zero(n);
  const CMatrix u = eig.vectors.leftCols(r);
  return Projection{u * u.adjoint(), static_cast<int>(r)};
}

Projection join(const Projection& p, const Projection& q, const Tolerances& tol) {
  if (p.dim() != q.dim()) throw DimensionMismatch("join: dimension mismatch");
  const Projection pc{p.complement(), static_cast<int>(p.dim()) - p.rank};
  const Projection qc{q.complement(), static_cast<int>(q.dim()) - q.rank};
  const Projection m = meet(pc, qc, tol);
  return Projection{m.complement(), static_cast<int>(p.dim()) - m.rank};
}

SubspaceLattice SubspaceLattice::from_elements(Index dim, std::vector<Projection> elements,
                                               const Tolerances& tol) {
  check_common_dim(elements);
  for (const Projection& p : elements)
    if (p.dim() != dim) throw DimensionMismatch("SubspaceLattice: element dimension mismatch");

  std::vector<Projection> elems;
  elems.push_back(Projection::zero(dim));
  elems.push_back(Projection::identity(dim));
  for (Projection& p : elements)
    if (find_element(elems, p, tol) < 0) elems.push_back(std::move(p));

  // Pairwise closure check.
  for (std::size_t i = 0; i < elems.size(); ++i)
    for (std::size_t j = i + 1; j < elems.size(); ++j) {
      if (find_element(elems, meet(elems[i], elems[j], tol), tol) < 0)
        throw Error("SubspaceLattice: family not closed under meet");
      if (find_element(elems, join(elems[i], elems[j], tol), tol) < 0)
        throw Error("SubspaceLattice: family not closed under join");
    }

  SubspaceLattice lat;
  lat.dim = dim;
  lat.contains_zero = true;
  lat.contains_identity = true;
  lat.is_commutative = true;
  for (std::size_t i = 0; i < elems.size() && lat.is_commutative; ++i)
    for (std::size_t j = i + 1; j < elems.size(); ++j) {
      const CMatrix comm = elems[i].matrix * elems[j].matrix - elems[j].matrix * elems[i].matrix;
      if (op_norm(comm) > tol.eq(dim)) {
        lat.is_commutative = false;
        break;
      }
    }
  lat.elements = std::move(elems);
  return lat;
}

SubspaceLattice lattice_closure(const std::vector<Projection>& generators, int max_size,
                                const Tolerances& tol) {
  if (generators.empty())
    throw DimensionMismatch("lattice_closure: no generators (ambient dimension unknown)");
  if (max_size < 2) throw Error("lattice_closure: max_size must be at least 2");
  check_common_dim(generators);
  const Index dim = generators[0].dim();

  std::vector<Projection> elems;
  elems.push_back(Projection::zero(dim));
  elems.push_back(Projection::identity(dim));
  for (const Projection& g : generators)
    if (find_element(elems, g, tol) < 0) elems.push_back(g);
  if (elems.size() > static_cast<std::size_t>(max_size))
    throw ClosureOverflow("lattice_closure: generators alone exceed max_size");

  // Fixpoint iteration over pairwise meets and joins.
  bool grew = true;
  while (grew) {
    grew = false;
    const std::size_t frozen = elems.size();
    for (std::size_t i = 0; i < frozen; ++i)
      for (std::size_t j = i + 1; j < frozen; ++j) {
        for (const Projection& cand :
             {meet(elems[i], elems[j], tol), join(elems[i], elems[j], tol)}) {
          if (find_element(elems, cand, tol) < 0) {
            if (elems.size() + 1 > static_cast<std::size_t>(max_size))
              throw ClosureOverflow("lattice_closure: fixpoint not reached within max_size");
            elems.push_back(cand);
            grew = true;
          }
        }
      }
  }
  return SubspaceLattice::from_elements(dim, std::move(elems), tol);
}

bool check_invariant(const Projection& l, const std::vector<CMatrix>& generators,
                     const Tolerances& tol) {
  const CMatrix lc = l.complement();
  for (const CMatrix& t : generators) {
    if (t.rows() != l.dim() || t.cols() != l.dim())
      throw DimensionMismatch("check_invariant: generator dimension mismatch");
    if (op_norm(lc * t * l.matrix) > tol.eq(l.dim())) return false;
  }
  return true;
}

LatDistance lat_distance_sq(const std::vector<Projection>& elements, const CVector& x,
                            const CVector& y, const Tolerances& tol) {
  if (elements.empty()) throw Error("lat_distance_sq: empty element list");
  check_common_dim(elements);
  if (x.size() != elements[0].dim() || y.size() != elements[0].dim())
    throw DimensionMismatch("lat_distance_sq: vector dimension mismatch");

  std::vector<double> vals(elements.size());
  double vmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const Projection& l = elements[i];
    vals[i] = (x - l.matrix * x).squaredNorm() + (l.matrix * y).squaredNorm();
    vmin = std::min(vmin, vals[i]);
  }
  // Tie-break at eq_tol: smallest rank, then first in element order.
  int best = -1;
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (vals[i] > vmin + tol.eq_tol) continue;
    if (best < 0 || elements[i].rank < elements[best].rank) best = static_cast<int>(i);
  }
  return LatDistance{vmin, elements[best]};
}

LatDistance lat_distance_sq(const SubspaceLattice& lattice, const CVector& x, const CVector& y,
                            const Tolerances& tol) {
  return lat_distance_sq(lattice.elements, x, y, tol);
}

}  // namespace vfnorm
