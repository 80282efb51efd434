// Scalar/matrix carriers, tolerance knobs and the error hierarchy shared by
// every layer of the library.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace vfnorm {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;  // dense complex, the universal operator carrier
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct Tolerances {
  double eq_tol = 1e-9;      // matrix-equality threshold (operator norm, scaled by dim)
  double rank_tol = 1e-10;   // eigenvalue/singular-value cutoff for range/kernel splits
  double solver_tol = 1e-7;  // target norm-bracket width

  void validate() const {
    if (!(eq_tol > 0.0) || !(rank_tol > 0.0) || !(solver_tol > 0.0))
      throw std::invalid_argument("Tolerances: all thresholds must be strictly positive");
    if (eq_tol < std::numeric_limits<double>::epsilon())
      throw std::invalid_argument("Tolerances: eq_tol below machine epsilon");
  }

  // Operator comparisons use eq_tol scaled by dimension; dimension-free
  // thresholds fail past dim ~32.
  double eq(Index dim) const { return eq_tol * static_cast<double>(dim < 1 ? 1 : dim); }

  bool operator==(const Tolerances&) const = default;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define VFNORM_DEFINE_ERROR(Name)          \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

VFNORM_DEFINE_ERROR(DimensionMismatch);
VFNORM_DEFINE_ERROR(NonFinite);
VFNORM_DEFINE_ERROR(NotHermitian);
VFNORM_DEFINE_ERROR(ClosureOverflow);
VFNORM_DEFINE_ERROR(NotCommutative);
VFNORM_DEFINE_ERROR(AngleZero);
VFNORM_DEFINE_ERROR(SpectrumOutOfRange);
VFNORM_DEFINE_ERROR(StructureMismatch);
VFNORM_DEFINE_ERROR(NoConvergence);
VFNORM_DEFINE_ERROR(ParseError);
VFNORM_DEFINE_ERROR(ValidationError);

#undef VFNORM_DEFINE_ERROR

}  // namespace vfnorm
