#include "vfnorm/halmos.hpp"

#include <cmath>

namespace vfnorm {

namespace {

constexpr double kA = 0.70710678118654752440;  // a = sqrt(2)/2
constexpr double kASqInv = 2.0;                // a^{-2}

// [[A, B], [C, D]] on H0 ⊕ H0.
CMatrix blocks2(const CMatrix& a, const CMatrix& b, const CMatrix& c, const CMatrix& d) {
  const Index n = a.rows();
  CMatrix m(2 * n, 2 * n);
  m.topLeftCorner(n, n) = a;
  m.topRightCorner(n, n) = b;
  m.bottomLeftCorner(n, n) = c;
  m.bottomRightCorner(n, n) = d;
  return m;
}

void split_xy(const CVector& v, Index h0, CVector& first, CVector& second) {
  if (v.size() != 2 * h0) throw DimensionMismatch("halmos: vector is not on H0 ⊕ H0");
  first = v.head(h0);
  second = v.tail(h0);
}

}  // namespace

SubspaceLattice HalmosModel::lattice() const {
  // Generic position holds exactly for spectrum in (0,1); assemble directly
  // rather than re-deriving meet(P,Q)=0 numerically, which is unstable for
  // nearly-degenerate angles.
  SubspaceLattice lat;
  lat.dim = dim();
  lat.elements = {Projection::zero(dim()), proj_p, proj_q, Projection::identity(dim())};
  lat.contains_zero = true;
  lat.contains_identity = true;
  lat.is_commutative = false;
  return lat;
}

CMatrix HalmosModel::b_pow(double p) const {
  if (p < 0 && !angle_positive)
    throw AngleZero("halmos: negative power of B requires a positive angle");
  RVector powered(spectrum.size());
  for (Index i = 0; i < spectrum.size(); ++i) powered(i) = std::pow(spectrum(i), p);
  return b_vectors * powered.asDiagonal() * b_vectors.adjoint();
}

HalmosModel build_halmos(const CMatrix& b, const Tolerances& tol, bool scan_mode) {
  if (b.rows() != b.cols() || b.rows() == 0)
    throw DimensionMismatch("build_halmos: B must be square and nonempty");
  const HermitianEig eig = hermitian_eig(b, tol);  // throws NotHermitian

  HalmosModel m;
  m.h0_dim = b.rows();
  m.b = (b + b.adjoint()) / 2.0;
  m.spectrum = eig.values;
  m.b_vectors = eig.vectors;

  const double lo = m.spectrum(m.spectrum.size() - 1);
  const double hi = m.spectrum(0);
  if (hi >= 1.0 - tol.rank_tol)
    throw SpectrumOutOfRange("build_halmos: eigenvalue at or above 1 (ker(I-B) nontrivial)");
  if (lo <= tol.rank_tol && !scan_mode)
    throw SpectrumOutOfRange("build_halmos: eigenvalue at or below 0 (ker B nontrivial)");
  if (lo <= 0.0)
    throw SpectrumOutOfRange("build_halmos: spectrum must be strictly positive");

  const Index n = m.h0_dim;
  const CMatrix b2 = m.b * m.b;
  const CMatrix g1 = (CMatrix::Identity(n, n) + b2).inverse();
  m.gamma = blocks2(g1, CMatrix::Zero(n, n), CMatrix::Zero(n, n), g1);

  const CMatrix p = m.gamma * blocks2(CMatrix::Identity(n, n), m.b, m.b, b2);
  const CMatrix q = m.gamma * blocks2(CMatrix::Identity(n, n), -m.b, -m.b, b2);
  m.proj_p = Projection::from_matrix((p + p.adjoint()) / 2.0, tol);
  m.proj_q = Projection::from_matrix((q + q.adjoint()) / 2.0, tol);

  m.angle_positive = lo >= kAngleThreshold;
  if (m.angle_positive) {
    const CMatrix bh = m.b_pow(0.5);
    const CMatrix bmh = m.b_pow(-0.5);
    // S = diag(B^{-1/2}, B^{1/2}) * [[aI, -aI], [aI, aI]]
    m.s = kA * blocks2(bmh, -bmh, bh, bh);
    m.s_inv = kA * blocks2(bh, bmh, -bh, bmh);
  }
  return m;
}

CMatrix conjugated_member(const HalmosModel& model, const CMatrix& c, const CMatrix& d2) {
  if (!model.angle_positive) throw AngleZero("conjugated_member: angle is zero");
  const Index n = model.h0_dim;
  if (c.rows() != n || c.cols() != n || d2.rows() != n || d2.cols() != n)
    throw DimensionMismatch("conjugated_member: blocks must be h0_dim x h0_dim");
  const CMatrix blockdiag = blocks2(c, CMatrix::Zero(n, n), CMatrix::Zero(n, n), d2);
  return model.s * blockdiag * model.s_inv;
}

MValues m_values(const HalmosModel& model, const CVector& x, const CVector& y) {
  if (!model.angle_positive) throw AngleZero("m_values: B^{-1/2} requires a positive angle");
  const Index n = model.h0_dim;
  CVector x1, x2, y1, y2;
  split_xy(x, n, x1, x2);
  split_xy(y, n, y1, y2);

  const CMatrix bh = model.b_pow(0.5);
  const CMatrix bmh = model.b_pow(-0.5);
  const double a2 = kA * kA;

  const double xp = (bh * x1 + bmh * x2).squaredNorm();  // ||B^{1/2}x1 + B^{-1/2}x2||^2
  const double xm = (bh * x1 - bmh * x2).squaredNorm();
  const double yp = (bmh * y1 + bh * y2).squaredNorm();  // ||B^{-1/2}y1 + B^{1/2}y2||^2
  const double ym = (bmh * y1 - bh * y2).squaredNorm();

  return MValues{a2 * (xp + xm), a2 * (xp + ym), a2 * (yp + xm), a2 * (yp + ym)};
}

AValues a_values(const HalmosModel& model, const CVector& x, const CVector& y) {
  const Index n = model.h0_dim;
  CVector x1, x2, y1, y2;
  split_xy(x, n, x1, x2);
  split_xy(y, n, y1, y2);

  AValues a;
  a.a1 = x1.squaredNorm() + x2.squaredNorm();
  a.a2 = (x - model.proj_p.matrix * x).squaredNorm() + (model.proj_p.matrix * y).squaredNorm();
  a.a3 = (x - model.proj_q.matrix * x).squaredNorm() + (model.proj_q.matrix * y).squaredNorm();
  a.a4 = y1.squaredNorm() + y2.squaredNorm();
  return a;
}

LemmaConstants lemma_constants(const HalmosModel& model) {
  if (!model.angle_positive) throw AngleZero("lemma_constants: angle is zero");
  const double b_inv_norm = 1.0 / model.spectrum(model.spectrum.size() - 1);  // ||B^{-1}||
  const double b_half_sq = model.spectrum(0);                                 // ||B^{1/2}||^2
  const double gamma_norm = op_norm(model.gamma);

  LemmaConstants c;
  c.c1 = 0.5 * b_inv_norm * b_inv_norm * b_half_sq * kASqInv;
  c.c2 = 2.0 * gamma_norm * gamma_norm * kASqInv;
  c.c3 = c.c2;
  c.c4 = 0.5 * b_inv_norm * b_inv_norm * kASqInv;
  c.c = std::max(std::max(c.c1, c.c2), std::max(c.c3, c.c4));
  return c;
}

ClosedFormNorm closed_form_norm(const HalmosModel& model, const CVector& x1, const CVector& y2) {
  const Index n = model.h0_dim;
  if (x1.size() != n || y2.size() != n)
    throw StructureMismatch("closed_form_norm: x1/y2 must live on H0");

  const CVector bx1 = model.b * x1;
  const CVector by2 = model.b * y2;
  const double nx = bx1.norm();
  const double ny = by2.norm();

  ClosedFormNorm out;
  out.witness = CMatrix::Zero(2 * n, 2 * n);
  if (nx <= 0.0 || ny <= 0.0) return out;  // value 0, zero witness

  out.value = nx * ny;
  const CMatrix d = (by2 * bx1.adjoint()) / (nx * ny);  // rank-one unit contraction
  out.witness.topRightCorner(n, n) = d;
  out.witness.bottomLeftCorner(n, n) = model.b * d * model.b;
  return out;
}

std::vector<ScanRow> violation_scan(const RVector& spectrum,
                                    const std::vector<std::pair<int, int>>& pairs,
                                    const Tolerances& tol) {
  const Index n = spectrum.size();
  if (n == 0) throw SpectrumOutOfRange("violation_scan: empty spectrum");
  for (Index i = 0; i < n; ++i)
    if (!(spectrum(i) > 0.0) || spectrum(i) >= 1.0 - tol.rank_tol)
      throw SpectrumOutOfRange("violation_scan: spectrum must lie in (0, 1)");
  for (Index i = 1; i < n; ++i)
    if (spectrum(i) > spectrum(i - 1))
      throw SpectrumOutOfRange("violation_scan: spectrum must be descending");

  CMatrix b = CMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) b(i, i) = spectrum(i);
  const HalmosModel model = build_halmos(b, tol, /*scan_mode=*/true);
  const SubspaceLattice lat = model.lattice();

  std::vector<ScanRow> rows;
  rows.reserve(pairs.size());
  for (const auto& [j, k] : pairs) {
    if (j < 0 || j >= n || k < 0 || k >= n)
      throw SpectrumOutOfRange("violation_scan: pair index out of range");
    CVector x = CVector::Zero(2 * n);
    CVector y = CVector::Zero(2 * n);
    x(j) = 1.0;          // (e_j, 0)
    y(n + k) = 1.0;      // (0, e_k)

    ScanRow row;
    row.lambda_j = spectrum(j);
    row.lambda_k = spectrum(k);
    row.lhs = lat_distance_sq(lat, x, y, tol).value;
    row.norm = row.lambda_j * row.lambda_k;  // closed form ||B e_j|| ||B e_k||
    row.ratio = row.lhs / row.norm;
    row.paper_bound = row.lambda_k / (4.0 * row.lambda_j);

    if (row.lhs < 0.25 * row.lambda_k * row.lambda_k - tol.eq_tol)
      throw Error("violation_scan: lower bound 1/4 ||B y2||^2 violated (artifact bug)");
    if (row.ratio < row.paper_bound - tol.eq_tol)
      throw Error("violation_scan: ratio fell below the closed-form bound (artifact bug)");
    rows.push_back(row);
  }
  return rows;
}

}  // namespace vfnorm
