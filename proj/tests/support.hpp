// Shared generators and brute-force oracles for the test suites.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "vfnorm/algebra.hpp"
#include "vfnorm/lattice.hpp"
#include "vfnorm/numeric.hpp"

namespace vfnorm::testsupport {

// Random CSL: a random unitary conjugate of a mask family closed under
// bitwise and/or. Retries until the closed family fits max_elems.
inline SubspaceLattice random_csl(Index dim, int generators, std::mt19937_64& rng,
                                  std::size_t max_elems = 16, const Tolerances& tol = {}) {
  for (;;) {
    std::vector<std::uint32_t> masks = {0u, (1u << dim) - 1u};
    std::uniform_int_distribution<std::uint32_t> pick(1u, (1u << dim) - 2u);
    for (int g = 0; g < generators; ++g) masks.push_back(pick(rng));
    // close under and/or
    bool grew = true;
    while (grew) {
      grew = false;
      const std::size_t frozen = masks.size();
      for (std::size_t i = 0; i < frozen && masks.size() <= max_elems; ++i)
        for (std::size_t j = i + 1; j < frozen; ++j)
          for (std::uint32_t cand : {masks[i] & masks[j], masks[i] | masks[j]})
            if (std::find(masks.begin(), masks.end(), cand) == masks.end()) {
              masks.push_back(cand);
              grew = true;
            }
      if (masks.size() > max_elems) break;
    }
    if (masks.size() > max_elems) continue;

    const CMatrix u = random_unitary(dim, rng);
    std::vector<Projection> elems;
    for (std::uint32_t m : masks) {
      CMatrix d = CMatrix::Zero(dim, dim);
      int rank = 0;
      for (Index i = 0; i < dim; ++i)
        if (m & (1u << i)) {
          d(i, i) = 1.0;
          ++rank;
        }
      elems.push_back(Projection{u * d * u.adjoint(), rank});
    }
    return SubspaceLattice::from_elements(dim, std::move(elems), tol);
  }
}

// Nest lattice {0, diag(1,0,...), diag(1,1,0,...), ..., I} in the standard basis.
inline SubspaceLattice nest_lattice(Index dim, const Tolerances& tol = {}) {
  std::vector<Projection> elems;
  for (Index k = 1; k < dim; ++k) {
    CMatrix d = CMatrix::Zero(dim, dim);
    for (Index i = 0; i < k; ++i) d(i, i) = 1.0;
    elems.push_back(Projection{d, static_cast<int>(k)});
  }
  return SubspaceLattice::from_elements(dim, std::move(elems), tol);
}

// Lattice of all diagonal 0/1 masks (the diagonal algebra's invariant lattice).
inline SubspaceLattice diagonal_lattice(Index dim, const Tolerances& tol = {}) {
  std::vector<Projection> elems;
  for (std::uint32_t m = 0; m < (1u << dim); ++m) {
    CMatrix d = CMatrix::Zero(dim, dim);
    int rank = 0;
    for (Index i = 0; i < dim; ++i)
      if (m & (1u << i)) {
        d(i, i) = 1.0;
        ++rank;
      }
    elems.push_back(Projection{d, rank});
  }
  return SubspaceLattice::from_elements(dim, std::move(elems), tol);
}

// Matrix-unit generators of ⊕_k M_s ⊗ I_m.
inline std::vector<CMatrix> block_vn_generators(const std::vector<std::pair<int, int>>& blocks) {
  Index dim = 0;
  for (const auto& [s, m] : blocks) dim += static_cast<Index>(s) * m;
  std::vector<CMatrix> gens;
  Index off = 0;
  for (const auto& [s, m] : blocks) {
    for (int p = 0; p < s; ++p)
      for (int q = 0; q < s; ++q) {
        CMatrix g = CMatrix::Zero(dim, dim);
        for (int a = 0; a < m; ++a) g(off + p * m + a, off + q * m + a) = 1.0;
        gens.push_back(std::move(g));
      }
    off += static_cast<Index>(s) * m;
  }
  return gens;
}

// Random projection in the commutant (⊕ I_s ⊗ M_m) of a block model.
inline Projection random_commutant_projection(const std::vector<std::pair<int, int>>& blocks,
                                              std::mt19937_64& rng) {
  Index dim = 0;
  for (const auto& [s, m] : blocks) dim += static_cast<Index>(s) * m;
  CMatrix w = CMatrix::Zero(dim, dim);
  int rank = 0;
  Index off = 0;
  for (const auto& [s, m] : blocks) {
    std::uniform_int_distribution<int> pick(0, m);
    const int r = pick(rng);
    if (r > 0) {
      CMatrix g = random_matrix(m, r, rng);
      Eigen::HouseholderQR<CMatrix> qr(g);
      const CMatrix q = CMatrix(qr.householderQ()).leftCols(r);
      w.block(off, off, s * m, s * m) = kron(CMatrix::Identity(s, s), q * q.adjoint());
      rank += s * r;
    }
    off += static_cast<Index>(s) * m;
  }
  return Projection{w, rank};
}

// Brute-force minimax over all diagonal 0/1 masks.
inline double mask_enumeration_minimax(const CVector& x, const CVector& y) {
  const Index n = x.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t m = 0; m < (1u << n); ++m) {
    double v = 0.0;
    for (Index i = 0; i < n; ++i) {
      if (m & (1u << i))
        v += std::norm(y(i));
      else
        v += std::norm(x(i));
    }
    best = std::min(best, v);
  }
  return best;
}

}  // namespace vfnorm::testsupport
