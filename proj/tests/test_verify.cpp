#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "vfnorm/verify.hpp"

using namespace vfnorm;
using namespace vfnorm::testsupport;

namespace {

AlgebraModel nest_algebra(Index dim) { return AlgebraModel::csl(nest_lattice(dim)); }

// f(L) = ||L^perp x||^2 + ||L y||^2
double lat_objective(const Projection& l, const CVector& x, const CVector& y) {
  return (x - l.matrix * x).squaredNorm() + (l.matrix * y).squaredNorm();
}

}  // namespace

TEST_CASE("vgap on the full algebra: both closed forms, margin zero") {
  std::mt19937_64 rng(1);
  const AlgebraModel a = AlgebraModel::full(3);
  const CVector x = random_unit_vector(3, rng);
  const CVector y = random_unit_vector(3, rng);
  const VGapReport r = vgap(a, x, y);
  CHECK(r.lhs == doctest::Approx(1.0));
  CHECK(r.norm_lower == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.norm_upper == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(r.margin) < 1e-6);
  CHECK(r.satisfied);
  CHECK(r.status == VGapStatus::Satisfied);
  CHECK(r.converged);
}

TEST_CASE("vgap on the nest flip pair") {
  const AlgebraModel nest = nest_algebra(2);
  CVector x = CVector::Zero(2), y = CVector::Zero(2);
  x(1) = 1.0;
  y(0) = 1.0;
  const VGapReport r = vgap(nest, x, y);
  CHECK(r.lhs == doctest::Approx(1.0));
  CHECK(r.norm_upper == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.satisfied);
}

TEST_CASE("vgap flags the degenerate-angle adversarial pair") {
  RVector sp(3);
  sp << 0.9, 0.5, 1e-4;
  CMatrix b = CMatrix::Zero(3, 3);
  for (Index i = 0; i < 3; ++i) b(i, i) = sp(i);
  const AlgebraModel a = AlgebraModel::two_subspace(build_halmos(b, Tolerances{}, true));
  CVector x = CVector::Zero(6), y = CVector::Zero(6);
  x(2) = 1.0;  // (e_j, 0), lambda_j = 1e-4
  y(3) = 1.0;  // (0, e_k), lambda_k = 0.9
  const VGapReport r = vgap(a, x, y);
  CHECK_FALSE(r.satisfied);
  CHECK(r.status == VGapStatus::Violated);
  CHECK(r.lhs == doctest::Approx(0.81 / 1.81 + 1e-8 / (1 + 1e-8)).epsilon(1e-10));
  CHECK(r.norm_upper <= 9e-5 + 1e-6);
  CHECK(r.margin == doctest::Approx(-0.4474).epsilon(1e-3));
}

TEST_CASE("lat_inf_vn closed forms") {
  std::mt19937_64 rng(3);

  // full algebra: min of the squared norms
  const AlgebraModel full = AlgebraModel::block_von_neumann({{4, 1}});
  const CVector x = random_vector(4, rng);
  const CVector y = random_vector(4, rng);
  const LatInfResult r = lat_inf_vn(full, x, y);
  CHECK(r.value == doctest::Approx(std::min(x.squaredNorm(), y.squaredNorm())).epsilon(1e-10));

  // x = y: the expectation vanishes, value = ||x||^2
  const LatInfResult same = lat_inf_vn(full, x, x);
  CHECK(same.value == doctest::Approx(x.squaredNorm()).epsilon(1e-12));
  CHECK(same.witness.rank == 0);
}

TEST_CASE("lat_inf_vn against diagonal mask enumeration") {
  std::mt19937_64 rng(5);
  for (Index n : {2, 4, 6, 8, 10, 12}) {
    const AlgebraModel diag =
        AlgebraModel::block_von_neumann(std::vector<std::pair<int, int>>(n, {1, 1}));
    const CVector x = random_vector(n, rng);
    const CVector y = random_vector(n, rng);
    const LatInfResult r = lat_inf_vn(diag, x, y);
    double closed = 0.0;
    for (Index i = 0; i < n; ++i) closed += std::min(std::norm(x(i)), std::norm(y(i)));
    CHECK(r.value == doctest::Approx(closed).epsilon(1e-10));
    CHECK(r.value == doctest::Approx(mask_enumeration_minimax(x, y)).epsilon(1e-10));
    CHECK(lat_objective(r.witness, x, y) == doctest::Approx(r.value).epsilon(1e-9));
  }
}

TEST_CASE("lat_inf_vn soundness against sampled commutant projections") {
  std::mt19937_64 rng(7);
  const std::vector<std::pair<int, int>> blocks = {{2, 2}, {1, 3}};
  const AlgebraModel a = AlgebraModel::block_von_neumann(blocks);
  const CVector x = random_unit_vector(7, rng);
  const CVector y = random_unit_vector(7, rng);
  const LatInfResult r = lat_inf_vn(a, x, y);

  CHECK(lat_objective(r.witness, x, y) == doctest::Approx(r.value).epsilon(1e-9));
  // witness commutes with the algebra
  for (const CMatrix& g : block_vn_generators(blocks))
    CHECK(op_norm(r.witness.matrix * g - g * r.witness.matrix) < 1e-9);

  for (int i = 0; i < 1000; ++i) {
    const Projection l = random_commutant_projection(blocks, rng);
    CHECK(r.value <= lat_objective(l, x, y) + 1e-9);
  }
}

TEST_CASE("vgap satisfied on block von Neumann instances") {
  std::mt19937_64 rng(9);
  const std::vector<std::vector<std::pair<int, int>>> shapes = {
      {{2, 2}}, {{3, 1}, {1, 2}}, {{2, 3}}, {{1, 1}, {1, 1}, {2, 1}}};
  for (const auto& blocks : shapes) {
    const AlgebraModel a = AlgebraModel::block_von_neumann(blocks);
    for (int i = 0; i < 3; ++i) {
      const CVector x = random_unit_vector(a.dim(), rng);
      const CVector y = random_unit_vector(a.dim(), rng);
      const VGapReport r = vgap(a, x, y);
      CHECK(r.converged);
      CHECK(r.satisfied);
    }
  }
}

TEST_CASE("direct_sum_check: full ⊕ full additivity") {
  std::mt19937_64 rng(11);
  const std::vector<AlgebraModel> parts = {AlgebraModel::full(2), AlgebraModel::full(2)};
  for (int i = 0; i < 3; ++i) {
    const std::vector<std::pair<CVector, CVector>> pairs = {
        {random_unit_vector(2, rng), random_unit_vector(2, rng)},
        {random_unit_vector(2, rng), random_unit_vector(2, rng)}};
    const DirectSumCheck r = direct_sum_check(parts, pairs);
    CHECK(r.ok);
    CHECK(r.lat_residual <= 2e-7);
    CHECK(r.norm_residual <= 2e-7);
  }
}

TEST_CASE("direct_sum_check: a zero part reduces to the other part") {
  std::mt19937_64 rng(13);
  const std::vector<AlgebraModel> parts = {AlgebraModel::full(2), nest_algebra(2)};
  const CVector x2 = random_unit_vector(2, rng);
  const CVector y2 = random_unit_vector(2, rng);
  const std::vector<std::pair<CVector, CVector>> pairs = {
      {CVector::Zero(2), CVector::Zero(2)}, {x2, y2}};
  const DirectSumCheck r = direct_sum_check(parts, pairs);
  CHECK(r.ok);
  const NormResult alone = functional_norm(parts[1], x2, y2);
  CHECK(r.norm_whole_lower == doctest::Approx(alone.lower).epsilon(1e-6));
}

TEST_CASE("direct_sum_check: nest ⊕ diagonal") {
  std::mt19937_64 rng(17);
  const std::vector<AlgebraModel> parts = {nest_algebra(2),
                                           AlgebraModel::csl(diagonal_lattice(2))};
  const std::vector<std::pair<CVector, CVector>> pairs = {
      {random_unit_vector(2, rng), random_unit_vector(2, rng)},
      {random_unit_vector(2, rng), random_unit_vector(2, rng)}};
  const DirectSumCheck r = direct_sum_check(parts, pairs);
  CHECK(r.ok);
}

TEST_CASE("vprime on the full algebra stays at one") {
  const AlgebraModel a = AlgebraModel::full(3);
  const VPrimeEstimate est = vprime_estimate(a, 25, 21);
  CHECK(est.c_hat <= 1.0 + 1e-6);
  CHECK(est.c_hat >= 0.9);  // generic pairs keep the ratio near one
}

TEST_CASE("vprime on an invertible two-subspace model respects the paper constant") {
  CMatrix b = CMatrix::Zero(2, 2);
  b(0, 0) = 0.8;
  b(1, 1) = 0.45;
  const HalmosModel hm = build_halmos(b);
  const AlgebraModel a = AlgebraModel::two_subspace(hm);
  const LemmaConstants c = lemma_constants(hm);
  const double t = op_norm(hm.s) * op_norm(hm.s_inv);
  const VPrimeEstimate est = vprime_estimate(a, 12, 23);
  CHECK(est.c_hat <= c.c * t + 1e-6);
}

TEST_CASE("vprime is prefix-monotone in trials") {
  const AlgebraModel a = nest_algebra(3);
  const VPrimeEstimate small = vprime_estimate(a, 5, 31);
  const VPrimeEstimate big = vprime_estimate(a, 15, 31);
  CHECK(big.c_hat >= small.c_hat - 1e-15);
  for (int i = 0; i < 5; ++i) {
    CHECK(big.rows[i].lhs == doctest::Approx(small.rows[i].lhs).epsilon(1e-15));
    CHECK(big.rows[i].ratio == doctest::Approx(small.rows[i].ratio).epsilon(1e-12));
  }
}

TEST_CASE("vgap satisfied across a random CSL corpus") {
  std::mt19937_64 rng(37);
  for (int c = 0; c < 5; ++c) {
    const Index dim = 3 + static_cast<Index>(c % 3);
    const AlgebraModel a = AlgebraModel::csl(random_csl(dim, 2, rng));
    for (int i = 0; i < 4; ++i) {
      const CVector x = random_unit_vector(dim, rng);
      const CVector y = random_unit_vector(dim, rng);
      const VGapReport r = vgap(a, x, y);
      CHECK(r.converged);
      CHECK(r.satisfied);
      CHECK(r.lhs <= r.norm_upper + 1e-6);
    }
  }
}
