#include "vfnorm/csl_witness.hpp"

#include <cmath>

namespace vfnorm {

namespace {

// Orthonormal bases of ran P (first rank columns) and ran P^perp (the rest).
std::pair<CMatrix, CMatrix> range_isometries(const Projection& p, const Tolerances& tol) {
  const HermitianEig eig = hermitian_eig(p.matrix, tol);  // values in {1, 0}, descending
  return {eig.vectors.leftCols(p.rank), eig.vectors.rightCols(p.dim() - p.rank)};
}

SubspaceLattice restrict_lattice(const SubspaceLattice& lat, const CMatrix& iso,
                                 const Tolerances& tol) {
  const Index r = iso.cols();
  std::vector<Projection> restricted;
  restricted.reserve(lat.elements.size());
  for (const Projection& l : lat.elements)
    restricted.push_back(Projection::from_matrix(iso.adjoint() * l.matrix * iso, tol));
  return SubspaceLattice::from_elements(r, std::move(restricted), tol);
}

}  // namespace

SplitData split(const SubspaceLattice& lattice, const CVector& x, const CVector& y,
                const Tolerances& tol) {
  if (!lattice.is_commutative) throw NotCommutative("split: lattice is not a CSL");
  if (x.size() != lattice.dim || y.size() != lattice.dim)
    throw DimensionMismatch("split: vector dimension mismatch");

  const LatDistance ld = lat_distance_sq(lattice, x, y, tol);
  SplitData s;
  s.p = ld.argmin;
  s.lat_value = ld.value;
  s.x1 = s.p.matrix * x;
  s.x2 = x - s.x1;
  s.y1 = s.p.matrix * y;
  s.y2 = y - s.y1;
  auto [iso1, iso2] = range_isometries(s.p, tol);
  s.iso1 = std::move(iso1);
  s.iso2 = std::move(iso2);
  if (s.iso1.cols() > 0) s.l1 = restrict_lattice(lattice, s.iso1, tol);
  if (s.iso2.cols() > 0) s.l2 = restrict_lattice(lattice, s.iso2, tol);
  return s;
}

bool verify_split_inequalities(const SplitData& s, const Tolerances& tol) {
  if (s.iso1.cols() > 0) {
    const CVector x1 = s.iso1.adjoint() * s.x1;
    const CVector y1 = s.iso1.adjoint() * s.y1;
    for (const Projection& l : s.l1.elements) {
      const double ry = (y1 - l.matrix * y1).squaredNorm();
      const double rx = (x1 - l.matrix * x1).squaredNorm();
      if (ry > rx + tol.eq_tol) return false;
    }
  }
  if (s.iso2.cols() > 0) {
    const CVector x2 = s.iso2.adjoint() * s.x2;
    const CVector y2 = s.iso2.adjoint() * s.y2;
    for (const Projection& l : s.l2.elements) {
      if ((l.matrix * x2).squaredNorm() > (l.matrix * y2).squaredNorm() + tol.eq_tol)
        return false;
    }
  }
  return true;
}

WitnessResult build_witness(const SubspaceLattice& lattice, const CVector& x, const CVector& y,
                            double tol, int max_iter, const Tolerances& tolerances) {
  const SplitData s = split(lattice, x, y, tolerances);
  const Index n = lattice.dim;
  CMatrix t = CMatrix::Zero(n, n);

  if (s.iso1.cols() > 0) {
    const CVector x1 = s.iso1.adjoint() * s.x1;
    const CVector y1 = s.iso1.adjoint() * s.y1;
    if (x1.norm() > tolerances.eq_tol) {
      const AlgebraModel alg1 = AlgebraModel::csl(s.l1, tolerances);
      const InterpolationResult ir = interpolate(alg1, x1, y1, tol, max_iter);
      if (!ir.solution)
        throw Error("build_witness: restricted interpolation reported a violation "
                    "(minimality consequence failed numerically)");
      t += s.iso1 * (*ir.solution) * s.iso1.adjoint();
    }
  }

  if (s.iso2.cols() > 0) {
    const CVector x2 = s.iso2.adjoint() * s.x2;
    const CVector y2 = s.iso2.adjoint() * s.y2;
    if (y2.norm() > tolerances.eq_tol) {
      // T2 in ball((Alg L2)^*) with T2 y2 = x2, realized on the adjoint model.
      const AlgebraModel alg2_adj = AlgebraModel::csl(s.l2, tolerances).adjoint_model();
      const InterpolationResult ir = interpolate(alg2_adj, y2, x2, tol, max_iter);
      if (!ir.solution)
        throw Error("build_witness: adjoint interpolation reported a violation "
                    "(minimality consequence failed numerically)");
      t += s.iso2 * ir.solution->adjoint() * s.iso2.adjoint();
    }
  }

  const Complex val = y.dot(t * x);
  return WitnessResult{std::move(t), val.real()};
}

}  // namespace vfnorm
