// k1analysis.hpp
// K1-specific analysis: rank-1 connection existence on the constitutive
// manifold, the lambda-system and its structure checks, the D-sign matrix,
// and the complete no-T4 certification pipeline for quadruples.
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rank1lab/constitutive.hpp"
#include "rank1lab/reduction.hpp"

namespace rank1lab {

// g_v(r) = 2 F_v(r) - r a_v(r); zero exactly at rank-1 connection offsets.
double g_eval(const ConstitutiveFn& f, double v, double r);

// A rank-1 connection between P(u,v) and P(u+h, v+r).
struct Rank1Connection {
  double v = 0.0, r = 0.0, h = 0.0;
  KPoint witness0, witness1;
  double g_resid = 0.0;      // |g_v(r)|
  double minor_resid = 0.0;  // worst minor of Q_v(h,r)
  double sv_ratio = 0.0;     // sigma2/sigma1 of the P-difference
};

struct FindRank1Options {
  int grid = 2048;           // inflection scan resolution
  double g_tol = 1e-12;      // bisection target on |g|
  int max_connections = 4;   // one per inflection bracket, capped
  Tolerance tol;
};

struct Rank1Search {
  std::vector<Rank1Connection> connections;
  bool certified_empty = false;  // fixed-sign 𝔞'' proof that none exist
  std::string basis;             // one-line justification of the result
  std::vector<std::pair<double, double>> inflections;
};

// Constructive search when 𝔞 has an isolated inflection in (lo,hi); when
// 𝔞'' has strict fixed sign the empty result is certified. Requires 𝔞' > 0.
Rank1Search find_rank1(const FnPtr& f, double lo, double hi,
                       const FindRank1Options& opt = {});

// One solution of h a(r) = l1 h + l2 a(r), h^2/2 + F(r) = l1 r + l2 h.
struct LambdaSolution {
  double h = 0.0, r = 0.0;
  bool trivial = false;    // the (0,0) solution
  double resid_y = 0.0;    // first equation residual
  double resid_w = 0.0;    // second equation residual
};

struct LambdaSystem {
  double base_v = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  std::vector<LambdaSolution> solutions;
  int count_below = 0;  // solutions with a(r) < lambda1 (trivial included)
};

// Root isolation for the lambda-system via the scalar reduction
// p(r) = q(r) with h = l2 a(r)/(a(r)-l1): dense grid bracketing plus
// bisection; the interval is split at the pole a(r) = l1 implicitly.
LambdaSystem lambda_solve(const ConstitutiveFn& f, double v_k, double lambda1,
                          double lambda2, double rlo, double rhi,
                          int grid = 4096, double residual_tol = 1e-8);

// D_i^k = (h_i^k)^2 - r_i^k a_{v_k}(r_i^k); symmetric with zero diagonal.
struct DSignMatrix {
  Eigen::Matrix4d d = Eigen::Matrix4d::Zero();
  double symmetry_error = 0.0;
  std::array<int, 4> row_sign{};  // +1 / -1 strict constant sign, 0 mixed
  bool some_constant_row = false;
};

// Requires pairwise distinct v_i (throws std::invalid_argument otherwise);
// entries are filled from the translated functions.
DSignMatrix d_matrix(const ConstitutiveFn& f, const Quadruple& k4,
                     double margin = 0.0);

enum class CertOutcome { Degenerate, NoT4, Rank1Present, Inconclusive };

// Per-base-point record of where the decision tree landed.
struct BaseAnalysis {
  int base = 0;
  std::string branch;     // "L1.3", "L1.5", "LC3", "L12", "L15", "L17", "lambda"
  bool resolves = false;  // branch proves no T4 on its own
  int dim = 0;
  int rank_l = 0, rank_r = 0, rank_0 = 0;
  double lambda1 = 0.0, lambda2 = 0.0;
  double fit_resid = 0.0;
  std::string note;
  // intermediate matrices for audit
  std::optional<Eigen::Matrix<double, 3, 5>> s;
  std::optional<Eigen::Matrix<double, 3, 6>> a0;
};

struct CertReport {
  CertOutcome outcome = CertOutcome::Inconclusive;
  std::string lemma_path;  // tag of the branch that decided the outcome
  std::string reason;
  std::map<std::string, double> margins;
  std::vector<BaseAnalysis> bases;
  std::optional<DSignMatrix> dsign;          // present on the L23 path
  std::optional<Rank1Connection> connection; // present for Rank1Present
};

struct CertOptions {
  Tolerance tol;
  double margin = 1e-9;   // strict-inequality margin, scaled by data size
  double fit_gate = 1e-8; // least-squares residual gate for lambda/gamma fits
  int probe = 257;        // hypothesis probe grid size
};

// Decision tree of the no-T4 theorems: degeneracy and hypothesis gates, the
// special h/r/z branches, the dim-2 theorem, the dim-3 rank cases, and the
// four-base lambda-system finale with the D-sign row filter. Inconclusive is
// returned whenever a margin is too small to call; nothing is guessed.
CertReport certify_no_t4(const FnPtr& f, const Quadruple& k4,
                         const CertOptions& opt = {});

struct StructureViolation {
  std::string lemma;  // "l21" or "l22"
  std::string detail;
};

struct StructureReport {
  int checked_l21 = 0;
  int checked_l22 = 0;
  std::vector<StructureViolation> violations;
  bool pass = true;
};

// Sign and monotonicity checks of the lambda-system structure lemmas over
// already-computed solution sets.
StructureReport structure_checks(const ConstitutiveFn& f,
                                 const std::vector<LambdaSystem>& systems,
                                 double margin = 1e-12);

}  // namespace rank1lab
