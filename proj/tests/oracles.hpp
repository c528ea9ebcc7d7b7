// oracles.hpp
// Test-side oracles, independent of the library's solution paths:
//  - exact linear-feasibility solver for T4 staircases of diagonal 2x2 sets
//  - projective grid scan of the minor system for (z|Az) subspaces
//  - exact K^rc membership for the classical Tartar square
//  - deterministic rng and quadruple sampling for property tests
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "rank1lab/constitutive.hpp"

namespace oracle {

struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  double gauss() {
    // Box-Muller, one value per call for determinism
    const double u1 = std::max(uniform01(), 1e-300), u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }
};

using Point2 = std::pair<double, double>;

// Result of the exact staircase solve for one ordering of diagonal 2x2
// matrices (as plane points). Tries every axis pattern for the rank-1
// increments; the staircase equations are linear once d_i = kappa_i c_i.
struct DiagT4 {
  bool feasible = false;
  std::array<double, 4> kappa{};
  Point2 p{};                      // staircase base point P
  std::array<Point2, 4> corners{}; // P_i = P + C_1 + ... + C_{i-1}
};

DiagT4 diag_t4_solve(const std::array<Point2, 4>& pts);

// All orderings (as index permutations) of a diagonal 4-point set that admit
// a T4 staircase.
std::vector<std::array<int, 4>> diag_t4_valid_orderings(const std::array<Point2, 4>& pts);

// Scans the three affine charts of RP^2 at the given step and reports every
// unit vector alpha with |cross(alpha, A alpha)|_inf below tau (a quadratic
// necessary-and-sufficient minor condition for (alpha|A alpha) to be rank 1).
void scan_minor_zeros(const Eigen::Matrix3d& a, double step, double tau,
                      const std::function<void(const Eigen::Vector3d&)>& cb);

// Exact rank-1 convex hull membership for the Tartar square of
// diag(-1,-3), diag(-3,1), diag(1,3), diag(3,-1): the inner square plus the
// four legs.
bool tartar_krc_member(double x, double y, double tol);

rank1lab::Quadruple random_quadruple(Rng& rng, double vlo, double vhi,
                                     double urange = 2.0);

// Central finite differences.
double fd1(const std::function<double(double)>& f, double x, double h);

}  // namespace oracle
