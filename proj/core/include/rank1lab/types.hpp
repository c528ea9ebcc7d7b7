// types.hpp
// Shared small types: matrix aliases, open intervals, tolerances, errors.
#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <string>

namespace rank1lab {

using Mat32 = Eigen::Matrix<double, 3, 2>;
using Mat22 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Thrown when a scalar function is evaluated outside its domain interval.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Open interval (lo, hi); defaults to the whole real line.
struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return v > lo && v < hi; }
  bool contains(const Interval& other) const {
    return other.lo >= lo && other.hi <= hi;
  }
  double width() const { return hi - lo; }
  bool valid() const { return lo < hi; }
};

// Numerical decision thresholds. The underlying statements are exact; every
// tolerance is owned by the artifact, not the theory.
//   rank_tol     relative singular-value cutoff for numeric rank
//   residual_tol absolute equation-residual cutoff (scaled by data diameter
//                where a function documents it)
struct Tolerance {
  double rank_tol = 1e-10;
  double residual_tol = 1e-9;

  void validate() const {
    if (!(rank_tol > 0.0 && rank_tol < 1.0))
      throw std::invalid_argument("Tolerance: rank_tol must be in (0,1)");
    if (!(residual_tol > 0.0 && residual_tol < 1.0))
      throw std::invalid_argument("Tolerance: residual_tol must be in (0,1)");
  }
};

}  // namespace rank1lab
