// reduction.hpp
// Normal-form reduction of quadruples to the base-point sets U^k, the S and
// A matrices attached to them, and classification of rank-1 directions inside
// a 3x2 matrix subspace of dimension <= 3.
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "rank1lab/constitutive.hpp"
#include "rank1lab/matspace.hpp"

namespace rank1lab {

// The set U^k: entries Q_{v_k}(h_i^k, r_i^k) with h_i^k = u_i - u_k,
// r_i^k = v_i - v_k. Entry i == k is the zero matrix.
struct USet {
  int base = 0;
  KPoint base_point;
  std::array<Mat32, 4> entries;
  std::array<double, 4> h{};  // h_i^k
  std::array<double, 4> r{};  // r_i^k
  std::array<double, 4> z{};  // a_{v_k}(r_i^k)
  std::array<double, 4> w{};  // (h_i^k)^2/2 + F_{v_k}(r_i^k)

  // 3-vectors over the non-base indices, in increasing index order.
  Vec3 hvec() const;
  Vec3 rvec() const;
  Vec3 zvec() const;
  Vec3 yvec() const;  // h_i a(r_i)
  Vec3 wvec() const;

  std::array<int, 3> others() const;
};

USet reduce(const ConstitutiveFn& f, const Quadruple& k4, int k);

// The row-operation matrix B of the reduction: B * (P(u_i,v_i) - P(u_k,v_k))
// equals the USet entries exactly.
Eigen::Matrix3d reduction_row_op(const ConstitutiveFn& f, const KPoint& base);

// 3x5 matrix with rows (h_i, r_i, a(r_i), h_i a(r_i), h_i^2/2 + F(r_i)) over
// the non-base indices; its rank equals dim Span{U^k}.
struct SMatrix {
  Eigen::Matrix<double, 3, 5> s;
  int rank = 0;
  double gap = 1.0;  // singular-value ratio at the rank cut
};

SMatrix s_matrix(const USet& u, const Tolerance& tol = {});

// Al columns (h_i; a(r_i); h_i a(r_i)), Ar columns (r_i; h_i; h_i^2/2+F(r_i)),
// A0 = (Al | Ar). Span{U^k} = { (Al x | Ar x) : x in R^3 }.
struct AMatrices {
  Eigen::Matrix3d al, ar;
  Eigen::Matrix<double, 3, 6> a0;
  int rank_l = 0, rank_r = 0, rank_0 = 0;
};

AMatrices a_matrices(const USet& u, const Tolerance& tol = {});

// A subspace of M^{3x2}: explicit basis plus, when one exists, the linear
// form { (z | A z) : z in R^3 }.
struct SubspaceRep {
  std::vector<Mat32> basis;
  std::optional<Eigen::Matrix3d> a_form;

  int dim() const { return static_cast<int>(basis.size()); }
};

// Basis of Span{U^k} with the (z|Az) form attached when Al or Ar is
// invertible at tolerance.
SubspaceRep subspace_of(const USet& u, const Tolerance& tol = {});

// Classification of Lambda_R ∩ S for dim(S) in {1,2,3}.
struct Rank1Directions {
  enum class Kind { Empty, Lines, PlanePlusLine, Whole };

  Kind kind = Kind::Empty;
  // Unit-Frobenius lines, first nonzero entry positive, pairwise
  // non-proportional. For PlanePlusLine these are the isolated lines (may be
  // empty when the whole rank-1 set is a single plane).
  std::vector<Mat32> lines;
  // Basis of the rank-1 plane when kind == PlanePlusLine.
  std::array<Mat32, 2> plane_basis;
};

struct ClassifyResult {
  bool ok = false;
  std::string failure;  // set when !ok; classification is never guessed
  Rank1Directions dirs;
  double margin = 0.0;  // smallest decision margin met along the way
};

ClassifyResult rank1_directions(const SubspaceRep& s, const Tolerance& tol = {});

// Normalize a direction to unit Frobenius norm with its first nonzero entry
// (column-major scan) positive.
Mat32 normalize_direction(const Mat32& m);

}  // namespace rank1lab
