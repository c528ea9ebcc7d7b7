// tn.hpp
// T_N configurations over general m x n matrices: certificate verification,
// multistart least-squares search over orderings, the 2x2 determinant-sign
// filter, and lamination-hull approximation of finite sets.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rank1lab/matspace.hpp"

namespace rank1lab {

// C_i = a_i b_i^T; the staircase is T_i = P + C_1 + ... + C_{i-1} + k_i C_i
// with sum C_i = 0 and every k_i > 1.
struct TnCertificate {
  MatX p;
  std::vector<VecX> a;  // m-vectors
  std::vector<VecX> b;  // n-vectors
  std::vector<double> kappa;

  MatX c(size_t i) const { return a[i] * b[i].transpose(); }
  size_t size() const { return kappa.size(); }
};

enum class VerdictStatus { Valid, Invalid, Found, NotFound };

struct Verdict {
  VerdictStatus status = VerdictStatus::Invalid;
  std::string reason;                  // Invalid diagnoses
  std::optional<TnCertificate> cert;   // present for Found
  double residual = 0.0;               // max equation residual (Found/Valid),
                                       // best residual reached (NotFound)
  int starts_used = 0;
};

struct VerifyOptions {
  Tolerance tol;
  double kappa_margin = 1e-6;  // requires kappa_i >= 1 + margin
};

// Definition check: (a) no pair rank-1 connected, (b) every C_i numeric rank
// one, (c) kappa_i >= 1 + kappa_margin, (d) staircase and sum-zero residuals
// below residual_tol, (e) affine span of the T_i at least 2-dimensional.
Verdict verify(const std::vector<MatX>& t, const TnCertificate& cert,
               const VerifyOptions& opt = {});

struct SearchOptions {
  int starts = 64;
  int iters = 120;
  std::uint64_t seed = 0;
  double kappa_margin = 1e-6;
  Tolerance tol;
};

// Multistart damped least squares over (P, a_i, b_i, s_i) with
// kappa_i = 1 + margin + s_i^2. Found only when verify() accepts the result;
// NotFound reports the best residual reached and is evidence, not proof.
Verdict search_ordering(const std::vector<MatX>& t, const SearchOptions& opt = {});

struct OrderingResult {
  std::array<int, 4> ordering;
  int cyclic_orbit = 0;    // orbit id under cyclic rotation
  int dihedral_orbit = 0;  // orbit id under rotation + reversal
  Verdict verdict;
};

// All 24 orderings of a 4-element set, each searched independently; results
// carry their cyclic and dihedral orbit ids. Cyclic rotation provably
// preserves T4 membership (certificates transport along the staircase);
// reversal does not, so every ordering is evaluated.
std::vector<OrderingResult> search_all_orderings(const std::array<MatX, 4>& t,
                                                 const SearchOptions& opt = {});

// Necessary condition of the 2x2 theory: a set containing a T_N has, for
// every i, determinants det(T_i - T_j) of both signs over j != i.
struct DetSignReport {
  MatX det_table;                     // N x N, zero diagonal
  std::vector<int> row_sign;          // +1 all positive, -1 all negative, 0 mixed
  std::vector<int> fails_at;          // indices with a strict constant sign
  bool pass = true;                   // false when fails_at is nonempty
  bool has_rank1_pair = false;        // some det vanished at margin
};

DetSignReport det_sign_filter(const std::vector<Mat22>& t, double margin = 0.0);

struct HullOptions {
  double eps = 0.05;
  int max_gen = 12;
  std::size_t max_points = 2'000'000;   // grid budget
  bool staircase_augment = true;        // add certified T_N staircase points
  std::uint64_t seed = 0;               // seeds the embedded searcher
  Tolerance tol;
};

struct HullApprox {
  std::vector<MatX> points;
  std::vector<int> generation;  // 0 for inputs; augmentation/closure rounds after
  int generations = 0;
  bool complete = true;  // false when the grid budget was exhausted
};

// Inside-out approximation of the rank-1 convex hull: epsilon-grid closure
// under segments between rank-1 connected members, restricted to the affine
// span of the input, plus staircase points of certified T_N
// sub-configurations (those barycenters lie in the hull). Monotone over
// generations; a fixpoint under re-running.
HullApprox lamination_hull(const std::vector<MatX>& t, const HullOptions& opt = {});

}  // namespace rank1lab
