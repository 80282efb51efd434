#include "vfnorm/funcnorm.hpp"

#include <cmath>
#include <limits>

namespace vfnorm {

namespace {

void check_pair(const AlgebraModel& a, const CVector& x, const CVector& y, const char* what) {
  if (x.size() != a.dim() || y.size() != a.dim())
    throw DimensionMismatch(std::string(what) + ": vector dimension mismatch");
  if (!x.allFinite() || !y.allFinite()) throw NonFinite(std::string(what) + ": NaN/Inf entry");
}

}  // namespace

NormResult functional_norm(const AlgebraModel& a, const CVector& x, const CVector& y,
                           const NormOptions& opt) {
  check_pair(a, x, y, "functional_norm");
  if (!(opt.tol > 0.0)) throw Error("functional_norm: tol must be positive");
  const Index n = a.dim();

  NormResult res;
  res.witness = CMatrix::Zero(n, n);
  res.certificate = CMatrix::Zero(n, n);

  const CMatrix f = x * y.adjoint();   // omega(T) = tr(T f)
  const CMatrix g = y * x.adjoint();   // HS gradient of Re tr(T f)
  const double g_hs = g.norm();        // = ||x|| ||y||
  if (g_hs < 1e-150) {                 // zero functional
    res.converged = true;
    return res;
  }

  // The projected gradient sets the attainable-value scale; gamma chosen so
  // one prox step moves O(1) relative to the unit ball.
  const double pg_hs = hs_project(a, g).norm();
  const double gamma = 1.0 / std::max(pg_hs, 1e-6 * g_hs);
  const double relax = 1.8;

  CMatrix z = CMatrix::Zero(n, n);
  double best_lower = 0.0;
  double best_upper = std::numeric_limits<double>::infinity();
  CMatrix best_witness = CMatrix::Zero(n, n);
  Complex best_val = 0.0;
  CMatrix best_mu = g;  // any HS-complement point is a valid certificate seed

  int it = 0;
  while (it < opt.max_iter && !res.converged) {
    ++it;
    const CMatrix ys = hs_project(a, z + gamma * g);  // prox of (indicator - linear)

    if (it <= 4 || it % 10 == 0 || it == opt.max_iter) {
      // Lower bound: rescale the exact member into the ball.
      const double on = op_norm(ys);
      const CMatrix t = (on > 1.0) ? CMatrix(ys / on) : ys;
      const Complex val = y.dot(t * x);  // (Tx, y)
      if (std::abs(val) > best_lower) {
        best_lower = std::abs(val);
        best_witness = t;
        best_val = val;
      }
      // Upper bound: project the dual point exactly onto the HS complement of
      // the member span; ||g - mu||_1 is then a certified upper bound.
      const CMatrix u = g + (z - ys) / gamma;
      const CMatrix mu = u - hs_project(a, u);
      const double up = trace_norm(g - mu);
      if (up < best_upper) {
        best_upper = up;
        best_mu = mu;
      }
      if (best_upper - best_lower <= opt.tol * std::max(1.0, best_upper)) res.converged = true;
    }

    if (!res.converged) {
      const CMatrix w = clip_to_contraction(2.0 * ys - z);
      z += relax * (w - ys);
    }
  }

  res.iterations = it;
  res.lower = best_lower;
  res.upper = best_upper;
  if (best_lower > 0.0) {
    const Complex phase = best_val / std::abs(best_val);
    res.witness = best_witness / phase;  // (witness x, y) = |val|, real nonnegative
  } else {
    res.witness = best_witness;
  }
  res.certificate = best_mu.adjoint();  // tr(T Z) = 0 on members; upper = ||xy^* - Z||_1
  return res;
}

double functional_norm_sampling(const AlgebraModel& a, const CVector& x, const CVector& y,
                                int samples, std::uint64_t seed) {
  check_pair(a, x, y, "functional_norm_sampling");
  if (samples < 1) throw Error("functional_norm_sampling: samples must be >= 1");
  std::mt19937_64 rng(seed);
  const double member_tol = 10.0 * a.tol().eq_tol;
  double best = 0.0;
  for (int i = 0; i < samples; ++i) {
    CMatrix t = random_member(a, rng);
    const double on = op_norm(t);
    if (on > 1.0) {
      // Clip when that stays inside the span (always true for *-closed
      // algebras); otherwise rescale, which preserves membership exactly.
      CMatrix clipped = clip_to_contraction(t);
      t = membership(a, clipped, member_tol) ? std::move(clipped) : CMatrix(t / on);
    }
    best = std::max(best, std::abs(y.dot(t * x)));
  }
  return best;
}

InterpolationResult interpolate(const AlgebraModel& a, const CVector& x, const CVector& y,
                                double tol, int max_iter) {
  check_pair(a, x, y, "interpolate");
  if (!a.has_finite_lattice())
    throw Error("interpolate: algebra has no explicit finite lattice");
  const Tolerances& tl = a.tol();

  // Necessary condition first: ||L^perp y|| <= ||L^perp x|| for every element.
  for (const Projection& l : a.finite_lattice()) {
    const double ry = (y - l.matrix * y).norm();
    const double rx = (x - l.matrix * x).norm();
    if (ry > rx + tl.eq_tol) return InterpolationResult{std::nullopt, l};
  }

  const Index n = a.dim();
  const double nx = x.norm();
  if (nx < 1e-150) {
    // No violation means ||y|| <= eq_tol; T = 0 interpolates within tol.
    return InterpolationResult{CMatrix::Zero(n, n), std::nullopt};
  }
  const CVector xs = x / nx;
  const CVector yt = y / nx;

  // Product-space Douglas-Rachford over three sets: member span, operator
  // ball, affine {T: T xs = yt}.
  auto project_affine = [&](const CMatrix& t) -> CMatrix {
    return t + (yt - t * xs) * xs.adjoint();
  };
  const double relax = 1.0;
  const CMatrix t0 = yt * xs.adjoint();
  CMatrix z1 = t0, z2 = t0, z3 = t0;

  for (int it = 1; it <= max_iter; ++it) {
    const CMatrix xbar = (z1 + z2 + z3) / 3.0;
    if (it % 5 == 0 || it == 1) {
      CMatrix cand = hs_project(a, xbar);
      const double on = op_norm(cand);
      if (on > 1.0) cand /= on;
      if ((cand * x - y).norm() <= tol)
        return InterpolationResult{std::move(cand), std::nullopt};
    }
    z1 += relax * (hs_project(a, 2.0 * xbar - z1) - xbar);
    z2 += relax * (clip_to_contraction(2.0 * xbar - z2) - xbar);
    z3 += relax * (project_affine(2.0 * xbar - z3) - xbar);
  }
  throw NoConvergence("interpolate: feasibility iteration exhausted its budget");
}

}  // namespace vfnorm
