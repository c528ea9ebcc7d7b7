// oracles.cpp
#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

DiagT4 diag_t4_solve(const std::array<Point2, 4>& pts) {
  DiagT4 best;
  double scale = 1.0;
  for (const auto& [x, y] : pts) scale = std::max({scale, std::abs(x), std::abs(y)});

  // unknowns: [px, py, c0..c3, d0..d3]; d_i stands for kappa_i c_i
  for (int pattern = 0; pattern < 16; ++pattern) {
    const auto axis = [&](int i) { return (pattern >> i) & 1; };  // 0 moves x, 1 moves y
    Eigen::Matrix<double, 10, 10> m = Eigen::Matrix<double, 10, 10>::Zero();
    Eigen::Matrix<double, 10, 1> rhs = Eigen::Matrix<double, 10, 1>::Zero();
    int row = 0;
    for (int i = 0; i < 4; ++i) {
      for (int coord = 0; coord < 2; ++coord) {
        m(row, coord) = 1.0;  // P
        for (int j = 0; j < i; ++j)
          if (axis(j) == coord) m(row, 2 + j) = 1.0;
        if (axis(i) == coord) m(row, 6 + i) = 1.0;
        rhs(row) = coord == 0 ? pts[static_cast<size_t>(i)].first
                              : pts[static_cast<size_t>(i)].second;
        ++row;
      }
    }
    for (int coord = 0; coord < 2; ++coord) {  // sum C_i = 0
      for (int j = 0; j < 4; ++j)
        if (axis(j) == coord) m(row, 2 + j) = 1.0;
      ++row;
    }
    const Eigen::Matrix<double, 10, 1> sol = m.colPivHouseholderQr().solve(rhs);
    if ((m * sol - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale) continue;
    bool ok = true;
    std::array<double, 4> kappa{};
    for (int i = 0; i < 4; ++i) {
      const double c = sol(2 + i), d = sol(6 + i);
      if (std::abs(c) < 1e-9 * scale) { ok = false; break; }
      kappa[static_cast<size_t>(i)] = d / c;
      if (!(kappa[static_cast<size_t>(i)] > 1.0 + 1e-9)) { ok = false; break; }
    }
    if (!ok) continue;
    best.feasible = true;
    best.kappa = kappa;
    best.p = {sol(0), sol(1)};
    Point2 acc = best.p;
    for (int i = 0; i < 4; ++i) {
      best.corners[static_cast<size_t>(i)] = acc;
      if (axis(i) == 0) acc.first += sol(2 + i);
      else acc.second += sol(2 + i);
    }
    return best;
  }
  return best;
}

std::vector<std::array<int, 4>> diag_t4_valid_orderings(const std::array<Point2, 4>& pts) {
  std::vector<std::array<int, 4>> valid;
  std::array<int, 4> perm{0, 1, 2, 3};
  std::sort(perm.begin(), perm.end());
  do {
    std::array<Point2, 4> ordered;
    for (int i = 0; i < 4; ++i) ordered[static_cast<size_t>(i)] = pts[static_cast<size_t>(perm[static_cast<size_t>(i)])];
    if (diag_t4_solve(ordered).feasible) valid.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return valid;
}

void scan_minor_zeros(const Eigen::Matrix3d& a, double step, double tau,
                      const std::function<void(const Eigen::Vector3d&)>& cb) {
  using Eigen::Vector3d;
  const int n = static_cast<int>(std::lround(2.0 / step));
  for (int chart = 0; chart < 3; ++chart) {
    for (int ix = 0; ix <= n; ++ix) {
      const double x = -1.0 + 2.0 * ix / n;
      // alpha(y) = base + y * dir, cross(alpha, A alpha) quadratic in y
      Vector3d base, dir;
      if (chart == 0) { base = Vector3d(1.0, x, 0.0); dir = Vector3d(0, 0, 1); }
      else if (chart == 1) { base = Vector3d(x, 1.0, 0.0); dir = Vector3d(0, 0, 1); }
      else { base = Vector3d(x, 0.0, 1.0); dir = Vector3d(0, 1, 0); }
      const Vector3d ab = a * base, ad = a * dir;
      const Vector3d c0 = base.cross(ab);
      const Vector3d c1 = base.cross(ad) + dir.cross(ab);
      const Vector3d c2 = dir.cross(ad);
      for (int iy = 0; iy <= n; ++iy) {
        const double y = -1.0 + 2.0 * iy / n;
        const Vector3d c = c0 + y * (c1 + y * c2);
        if (std::abs(c(0)) < tau && std::abs(c(1)) < tau && std::abs(c(2)) < tau) {
          Vector3d al = base + y * dir;
          // the charts are not normalized; rescale the threshold check
          const double norm2 = al.squaredNorm();
          if (c.cwiseAbs().maxCoeff() < tau * norm2) cb(al / std::sqrt(norm2));
        }
      }
    }
  }
}

bool tartar_krc_member(double x, double y, double tol) {
  if (x >= -1.0 - tol && x <= 1.0 + tol && y >= -1.0 - tol && y <= 1.0 + tol) return true;
  if (std::abs(x + 1.0) <= tol && y >= -3.0 - tol && y <= 1.0 + tol) return true;
  if (std::abs(y + 1.0) <= tol && x >= -1.0 - tol && x <= 3.0 + tol) return true;
  if (std::abs(x - 1.0) <= tol && y >= -1.0 - tol && y <= 3.0 + tol) return true;
  if (std::abs(y - 1.0) <= tol && x >= -3.0 - tol && x <= 1.0 + tol) return true;
  return false;
}

rank1lab::Quadruple random_quadruple(Rng& rng, double vlo, double vhi, double urange) {
  rank1lab::Quadruple q;
  const double pad = 1e-9 * (vhi - vlo);
  for (int i = 0; i < 4; ++i) {
    double v = 0.0;
    for (int tries = 0; tries < 64; ++tries) {
      v = rng.uniform(vlo + pad, vhi - pad);
      bool distinct = true;
      for (int j = 0; j < i; ++j)
        if (std::abs(q.pts[static_cast<size_t>(j)].v - v) < 1e-9 * (vhi - vlo)) distinct = false;
      if (distinct) break;
    }
    q.pts[static_cast<size_t>(i)] = {rng.uniform(-urange, urange), v};
  }
  return q;
}

double fd1(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracle
