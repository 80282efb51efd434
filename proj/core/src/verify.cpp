#include "vfnorm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace vfnorm {

namespace {

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t pair_hash(const CVector& x, const CVector& y) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a(x.data(), sizeof(Complex) * static_cast<std::size_t>(x.size()), h);
  h = fnv1a(y.data(), sizeof(Complex) * static_cast<std::size_t>(y.size()), h);
  return h;
}

// (value, argmin) of the lattice side for any model kind.
LatDistance lattice_side(const AlgebraModel& a, const CVector& x, const CVector& y,
                         const Tolerances& tol) {
  if (a.kind() == AlgebraModel::Kind::BlockVonNeumann) {
    const LatInfResult r = lat_inf_vn(a, x, y);
    return LatDistance{r.value, r.witness};
  }
  return lat_distance_sq(a.finite_lattice(), x, y, tol);
}

bool vn_like(const AlgebraModel& a) {
  using K = AlgebraModel::Kind;
  return a.kind() == K::Full || a.kind() == K::BlockVonNeumann;
}

// Full(d) counts as the one-block algebra M_d ⊗ I_1.
std::vector<std::pair<int, int>> flatten_blocks(const std::vector<AlgebraModel>& parts) {
  std::vector<std::pair<int, int>> blocks;
  for (const AlgebraModel& p : parts) {
    if (p.kind() == AlgebraModel::Kind::Full)
      blocks.emplace_back(static_cast<int>(p.dim()), 1);
    else
      for (const auto& b : p.blocks()) blocks.push_back(b);
  }
  return blocks;
}

}  // namespace

VGapReport vgap(const AlgebraModel& a, const CVector& x, const CVector& y,
                const NormOptions& opt, std::uint64_t seed) {
  if (x.size() != a.dim() || y.size() != a.dim())
    throw DimensionMismatch("vgap: vector dimension mismatch");

  VGapReport rep;
  rep.model_summary = a.summary();
  rep.pair_hash = pair_hash(x, y);
  rep.seed = seed;

  if (a.kind() == AlgebraModel::Kind::DirectSum) {
    // Both sides are additive across the summands.
    rep.converged = true;
    CMatrix argmin = CMatrix::Zero(a.dim(), a.dim());
    Index off = 0;
    int rank = 0;
    for (const AlgebraModel& p : a.parts()) {
      const Index d = p.dim();
      const VGapReport sub = vgap(p, x.segment(off, d), y.segment(off, d), opt, seed);
      rep.lhs += sub.lhs;
      rep.norm_lower += sub.norm_lower;
      rep.norm_upper += sub.norm_upper;
      rep.iterations = std::max(rep.iterations, sub.iterations);
      rep.converged = rep.converged && sub.converged;
      argmin.block(off, off, d, d) = sub.lhs_argmin.matrix;
      rank += sub.lhs_argmin.rank;
      off += d;
    }
    rep.lhs_argmin = Projection{std::move(argmin), rank};
  } else {
    const LatDistance ld = lattice_side(a, x, y, opt.tolerances);
    rep.lhs = ld.value;
    rep.lhs_argmin = ld.argmin;
    const NormResult nr = functional_norm(a, x, y, opt);
    rep.norm_lower = nr.lower;
    rep.norm_upper = nr.upper;
    rep.iterations = nr.iterations;
    rep.converged = nr.converged;
  }

  rep.margin = rep.norm_lower - rep.lhs;
  rep.satisfied = rep.lhs <= rep.norm_upper + opt.tol;
  if (rep.satisfied)
    rep.status = VGapStatus::Satisfied;
  else if (rep.lhs > rep.norm_upper + 10.0 * opt.tol)
    rep.status = VGapStatus::Violated;
  else
    rep.status = VGapStatus::Inconclusive;
  return rep;
}

LatInfResult lat_inf_vn(const AlgebraModel& a, const CVector& x, const CVector& y) {
  if (a.kind() != AlgebraModel::Kind::BlockVonNeumann)
    throw Error("lat_inf_vn: model is not a block von Neumann algebra");
  if (x.size() != a.dim() || y.size() != a.dim())
    throw DimensionMismatch("lat_inf_vn: vector dimension mismatch");

  const CMatrix m = y * y.adjoint() - x * x.adjoint();
  const Index n = a.dim();
  double value = x.squaredNorm();
  CMatrix witness = CMatrix::Zero(n, n);
  int rank = 0;

  Index off = 0;
  for (const auto& [s, mult] : a.blocks()) {
    // E_{A'}(m) on this block is I_s ⊗ Y with Y the s-averaged partial trace.
    CMatrix yk = CMatrix::Zero(mult, mult);
    for (Index aa = 0; aa < mult; ++aa)
      for (Index bb = 0; bb < mult; ++bb) {
        Complex acc = 0.0;
        for (Index i = 0; i < s; ++i) acc += m(off + i * mult + aa, off + i * mult + bb);
        yk(aa, bb) = acc / static_cast<double>(s);
      }
    const HermitianEig eig = hermitian_eig((yk + yk.adjoint()) / 2.0);
    Index neg = 0;
    CMatrix vneg(mult, mult);
    for (Index i = 0; i < mult; ++i)
      if (eig.values(i) < 0.0) {
        value += static_cast<double>(s) * eig.values(i);
        vneg.col(neg++) = eig.vectors.col(i);
      }
    if (neg > 0) {
      const CMatrix proj = vneg.leftCols(neg) * vneg.leftCols(neg).adjoint();
      witness.block(off, off, s * mult, s * mult) =
          kron(CMatrix::Identity(s, s), proj);
      rank += static_cast<int>(s * neg);
    }
    off += s * mult;
  }
  return LatInfResult{value, Projection{std::move(witness), rank}};
}

DirectSumCheck direct_sum_check(const std::vector<AlgebraModel>& parts,
                                const std::vector<std::pair<CVector, CVector>>& pairs,
                                const NormOptions& opt) {
  if (parts.size() < 2) throw Error("direct_sum_check: need at least two parts");
  if (pairs.size() != parts.size())
    throw DimensionMismatch("direct_sum_check: one vector pair per part required");

  Index dim = 0;
  for (const AlgebraModel& p : parts) dim += p.dim();
  CVector x(dim), y(dim);
  Index off = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& [xi, yi] = pairs[i];
    if (xi.size() != parts[i].dim() || yi.size() != parts[i].dim())
      throw DimensionMismatch("direct_sum_check: pair dimension mismatch");
    x.segment(off, parts[i].dim()) = xi;
    y.segment(off, parts[i].dim()) = yi;
    off += parts[i].dim();
  }

  DirectSumCheck out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    out.lat_sum += lattice_side(parts[i], pairs[i].first, pairs[i].second, opt.tolerances).value;
    const NormResult nr = functional_norm(parts[i], pairs[i].first, pairs[i].second, opt);
    out.norm_sum_lower += nr.lower;
    out.norm_sum_upper += nr.upper;
  }

  const AlgebraModel whole = AlgebraModel::direct_sum(parts);
  if (whole.has_finite_lattice()) {
    out.lat_whole = lat_distance_sq(whole.finite_lattice(), x, y, opt.tolerances).value;
  } else if (std::all_of(parts.begin(), parts.end(), vn_like)) {
    const AlgebraModel flat = AlgebraModel::block_von_neumann(flatten_blocks(parts));
    out.lat_whole = lat_inf_vn(flat, x, y).value;
  } else {
    out.lat_whole = out.lat_sum;  // mixed kinds: no independent whole-model route
  }

  const NormResult whole_nr = functional_norm(whole, x, y, opt);
  out.norm_whole_lower = whole_nr.lower;
  out.norm_whole_upper = whole_nr.upper;

  out.lat_residual = std::abs(out.lat_whole - out.lat_sum);
  // Bracket overlap distance: zero when [sum] and [whole] intersect.
  const double lo = std::max(out.norm_sum_lower, out.norm_whole_lower);
  const double hi = std::min(out.norm_sum_upper, out.norm_whole_upper);
  out.norm_residual = std::max(0.0, lo - hi);
  out.ok = out.lat_residual <= 2.0 * opt.tol && out.norm_residual <= 2.0 * opt.tol;
  return out;
}

VPrimeEstimate vprime_estimate(const AlgebraModel& a, int trials, std::uint64_t seed,
                               const NormOptions& opt) {
  if (trials < 1) throw Error("vprime_estimate: trials must be >= 1");
  const Index n = a.dim();

  // Structured pairs for the two-subspace model: (u_j, 0) vs (0, u_k) over
  // the eigenbasis of B; they drive the degenerate-angle mechanism.
  std::vector<std::pair<CVector, CVector>> structured;
  if (a.kind() == AlgebraModel::Kind::TwoSubspace) {
    const HalmosModel& hm = a.halmos();
    for (Index j = 0; j < hm.h0_dim; ++j)
      for (Index k = 0; k < hm.h0_dim; ++k) {
        CVector x = CVector::Zero(n), y = CVector::Zero(n);
        x.head(hm.h0_dim) = hm.b_vectors.col(j);
        y.tail(hm.h0_dim) = hm.b_vectors.col(k);
        structured.emplace_back(std::move(x), std::move(y));
      }
  }

  std::mt19937_64 rng(seed);
  VPrimeEstimate est;
  est.trials = trials;
  est.seed = seed;
  est.rows.reserve(trials);

  for (int i = 0; i < trials; ++i) {
    CVector x, y;
    if (i < static_cast<int>(structured.size())) {
      x = structured[i].first;
      y = structured[i].second;
    } else {
      x = random_unit_vector(n, rng);
      y = random_unit_vector(n, rng);
    }
    const double lhs = lattice_side(a, x, y, opt.tolerances).value;
    const NormResult nr = functional_norm(a, x, y, opt);

    VPrimeTrial row;
    row.index = i;
    row.lhs = lhs;
    row.norm_lower = nr.lower;
    row.norm_upper = nr.upper;
    if (nr.upper <= opt.tolerances.eq_tol)
      row.ratio = lhs > opt.tolerances.eq_tol ? std::numeric_limits<double>::infinity() : 0.0;
    else
      row.ratio = lhs / std::max(nr.lower, 1e-300);
    est.rows.push_back(row);
    if (row.ratio > est.c_hat) {
      est.c_hat = row.ratio;
      est.worst_trial = i;
      est.worst_x = x;
      est.worst_y = y;
    }
  }
  return est;
}

}  // namespace vfnorm
