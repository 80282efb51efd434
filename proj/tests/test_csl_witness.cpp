#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "vfnorm/csl_witness.hpp"
#include "vfnorm/verify.hpp"

using namespace vfnorm;
using namespace vfnorm::testsupport;

TEST_CASE("split picks the zero projection on the tied nest example") {
  const SubspaceLattice nest = nest_lattice(2);
  CVector x = CVector::Zero(2), y = CVector::Zero(2);
  x(1) = 1.0;
  y(0) = 1.0;
  const SplitData s = split(nest, x, y);
  CHECK(s.p.rank == 0);  // values 1, 2, 1; tie broken toward smaller rank
  CHECK(s.lat_value == doctest::Approx(1.0));
  CHECK((s.x2 - x).norm() < 1e-12);
  CHECK((s.y2 - y).norm() < 1e-12);
  CHECK(s.x1.norm() < 1e-12);
  CHECK(verify_split_inequalities(s));
}

TEST_CASE("split finds the zero-distance member pair") {
  const SubspaceLattice nest = nest_lattice(2);
  CVector x = CVector::Zero(2), y = CVector::Zero(2);
  x(0) = 1.0;
  y(1) = 1.0;
  const SplitData s = split(nest, x, y);
  CHECK(s.p.rank == 1);
  CHECK(s.lat_value == doctest::Approx(0.0));
  CHECK(verify_split_inequalities(s));
}

TEST_CASE("split on x = y gives value one") {
  std::mt19937_64 rng(3);
  const SubspaceLattice lat = random_csl(4, 2, rng);
  const CVector x = random_unit_vector(4, rng);
  const SplitData s = split(lat, x, x);
  CHECK(s.lat_value == doctest::Approx(1.0));
  CHECK(verify_split_inequalities(s));
}

TEST_CASE("split rejects non-commutative lattices") {
  CMatrix b = CMatrix::Zero(2, 2);
  b(0, 0) = 0.9;
  b(1, 1) = 0.5;
  const HalmosModel hm = build_halmos(b);
  CVector x = CVector::Zero(4), y = CVector::Zero(4);
  x(0) = 1.0;
  y(1) = 1.0;
  CHECK_THROWS_AS(split(hm.lattice(), x, y), NotCommutative);
}

TEST_CASE("a deliberately wrong minimizer fails the inequalities") {
  // P = diag(1,0) is not the minimizer for x = e2, y = e1.
  const SubspaceLattice nest = nest_lattice(2);
  CVector x = CVector::Zero(2), y = CVector::Zero(2);
  x(1) = 1.0;
  y(0) = 1.0;

  SplitData s;
  s.p = nest.elements[2].rank == 1 ? nest.elements[2] : nest.elements[1];
  REQUIRE(s.p.rank == 1);
  s.x1 = s.p.matrix * x;
  s.x2 = x - s.x1;
  s.y1 = s.p.matrix * y;
  s.y2 = y - s.y1;
  CMatrix iso1 = CMatrix::Zero(2, 1), iso2 = CMatrix::Zero(2, 1);
  iso1(0, 0) = 1.0;
  iso2(1, 0) = 1.0;
  s.iso1 = iso1;
  s.iso2 = iso2;
  std::vector<Projection> r1, r2;
  for (const Projection& l : nest.elements) {
    r1.push_back(Projection::from_matrix(iso1.adjoint() * l.matrix * iso1));
    r2.push_back(Projection::from_matrix(iso2.adjoint() * l.matrix * iso2));
  }
  s.l1 = SubspaceLattice::from_elements(1, r1);
  s.l2 = SubspaceLattice::from_elements(1, r2);

  CHECK_FALSE(verify_split_inequalities(s));
}

TEST_CASE("vacuous summand keeps the inequalities true") {
  const SubspaceLattice nest = nest_lattice(2);
  CVector x = CVector::Zero(2), y = CVector::Zero(2);
  x(1) = 1.0;
  y(0) = 1.0;
  SplitData s = split(nest, x, y);  // P = 0, so the first family is empty
  CHECK(s.p.rank == 0);
  CHECK(s.iso1.cols() == 0);
  CHECK(verify_split_inequalities(s));
}

TEST_CASE("build_witness solves the nest example exactly") {
  const SubspaceLattice nest = nest_lattice(2);
  CVector x = CVector::Zero(2), y = CVector::Zero(2);
  x(1) = 1.0;
  y(0) = 1.0;
  const WitnessResult w = build_witness(nest, x, y);
  CHECK(w.value == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(std::abs(w.t(0, 1) - Complex(1, 0)) < 1e-6);
  CHECK(std::abs(w.t(1, 0)) < 1e-9);
  CHECK(op_norm(w.t) <= 1.0 + 1e-7);
}

TEST_CASE("build_witness on the zero-distance pair") {
  const SubspaceLattice nest = nest_lattice(2);
  CVector x = CVector::Zero(2), y = CVector::Zero(2);
  x(0) = 1.0;
  y(1) = 1.0;
  const WitnessResult w = build_witness(nest, x, y);
  CHECK(w.value >= -1e-9);
  CHECK(op_norm(w.t) <= 1.0 + 1e-7);
}

TEST_CASE("witness value brackets between the lattice distance and the norm") {
  std::mt19937_64 rng(13);
  const SubspaceLattice lat = random_csl(6, 3, rng);
  const AlgebraModel model = AlgebraModel::csl(lat);
  for (int i = 0; i < 5; ++i) {
    const CVector x = random_unit_vector(6, rng);
    const CVector y = random_unit_vector(6, rng);
    const double lhs = lat_distance_sq(lat, x, y).value;
    const WitnessResult w = build_witness(lat, x, y);
    const NormResult nr = functional_norm(model, x, y);
    CHECK(w.value >= lhs - 1e-6);
    CHECK(w.value <= nr.upper + 1e-6);
    CHECK(membership(model, w.t, 1e-6));
    CHECK(op_norm(w.t) <= 1.0 + 1e-6);
  }
}

TEST_CASE("assembled witness leaves every lattice range invariant") {
  std::mt19937_64 rng(17);
  const SubspaceLattice lat = random_csl(5, 2, rng);
  const CVector x = random_unit_vector(5, rng);
  const CVector y = random_unit_vector(5, rng);
  const WitnessResult w = build_witness(lat, x, y);
  for (const Projection& l : lat.elements)
    CHECK(op_norm(l.complement() * w.t * l.matrix) < 1e-6);

  // omega-value decomposition across the split
  const SplitData s = split(lat, x, y);
  const Complex part1 = s.y1.dot(w.t * s.x1);
  const Complex part2 = s.y2.dot(w.t * s.x2);
  CHECK(std::abs(y.dot(w.t * x) - (part1 + part2)) < 1e-8);
}
