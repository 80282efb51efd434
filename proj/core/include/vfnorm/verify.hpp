// Top-level property (V)/(V') experiments: the vgap report, the commutant
// closed-form minimax for block von Neumann algebras, direct-sum additivity
// checks and the (V')-constant estimator.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vfnorm/csl_witness.hpp"
#include "vfnorm/funcnorm.hpp"

namespace vfnorm {

enum class VGapStatus { Satisfied, Inconclusive, Violated };

struct VGapReport {
  double lhs = 0.0;            // lattice minimax
  Projection lhs_argmin;
  double norm_lower = 0.0;
  double norm_upper = 0.0;
  double margin = 0.0;         // norm_lower - lhs
  bool satisfied = false;      // lhs <= norm_upper + tol
  VGapStatus status = VGapStatus::Inconclusive;
  std::string model_summary;
  std::uint64_t pair_hash = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  bool converged = false;
};

// Violation is declared only past 10x the solver tolerance; near-ties are
// inconclusive so a one-sided solver error can never fabricate a
// counterexample.
VGapReport vgap(const AlgebraModel& a, const CVector& x, const CVector& y,
                const NormOptions& opt = {}, std::uint64_t seed = 0);

struct LatInfResult {
  double value = 0.0;
  Projection witness;  // in the commutant, attains the value
};

// min over projections L in A' of ||L^perp x||^2 + ||L y||^2, computed as
// ||x||^2 plus the sum of negative eigenvalues of E_{A'}(yy^* - xx^*).
LatInfResult lat_inf_vn(const AlgebraModel& block_vn, const CVector& x, const CVector& y);

struct DirectSumCheck {
  double lat_sum = 0, lat_whole = 0;
  double norm_sum_lower = 0, norm_sum_upper = 0;
  double norm_whole_lower = 0, norm_whole_upper = 0;
  double lat_residual = 0, norm_residual = 0;
  bool ok = false;
};

// Both additivity identities (lattice minimax and functional norm) checked
// against the assembled direct-sum model, one vector pair per part.
DirectSumCheck direct_sum_check(const std::vector<AlgebraModel>& parts,
                                const std::vector<std::pair<CVector, CVector>>& pairs,
                                const NormOptions& opt = {});

struct VPrimeTrial {
  int index = 0;
  double lhs = 0, norm_lower = 0, norm_upper = 0, ratio = 0;
};

struct VPrimeEstimate {
  double c_hat = 0.0;
  int worst_trial = -1;
  CVector worst_x, worst_y;
  int trials = 0;
  std::uint64_t seed = 0;
  std::vector<VPrimeTrial> rows;
};

// Max of lhs / norm_lower over sampled unit pairs (for two-subspace models
// the structured eigenvector pairs come first); a lower estimate of the best
// (V') constant, deterministic and prefix-monotone in trials for fixed seed.
VPrimeEstimate vprime_estimate(const AlgebraModel& a, int trials, std::uint64_t seed,
                               const NormOptions& opt = {});

}  // namespace vfnorm
