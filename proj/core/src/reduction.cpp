// reduction.cpp
#include "rank1lab/reduction.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace rank1lab {

Vec3 USet::hvec() const {
  const auto o = others();
  return Vec3(h[o[0]], h[o[1]], h[o[2]]);
}
Vec3 USet::rvec() const {
  const auto o = others();
  return Vec3(r[o[0]], r[o[1]], r[o[2]]);
}
Vec3 USet::zvec() const {
  const auto o = others();
  return Vec3(z[o[0]], z[o[1]], z[o[2]]);
}
Vec3 USet::yvec() const {
  const auto o = others();
  return Vec3(h[o[0]] * z[o[0]], h[o[1]] * z[o[1]], h[o[2]] * z[o[2]]);
}
Vec3 USet::wvec() const {
  const auto o = others();
  return Vec3(w[o[0]], w[o[1]], w[o[2]]);
}

std::array<int, 3> USet::others() const {
  std::array<int, 3> o{};
  int n = 0;
  for (int i = 0; i < 4; ++i)
    if (i != base) o[n++] = i;
  return o;
}

USet reduce(const ConstitutiveFn& f, const Quadruple& k4, int k) {
  if (k < 0 || k > 3) throw std::invalid_argument("reduce: base index in 0..3");
  USet u;
  u.base = k;
  u.base_point = k4.pts[k];
  const double a0 = f.eval(u.base_point.v);
  const double F0 = f.potential(u.base_point.v);
  for (int i = 0; i < 4; ++i) {
    const double hi = k4.pts[i].u - u.base_point.u;
    const double ri = k4.pts[i].v - u.base_point.v;
    const double zi = f.eval(k4.pts[i].v) - a0;
    const double Fi = f.potential(k4.pts[i].v) - F0 - a0 * ri;
    u.h[i] = hi;
    u.r[i] = ri;
    u.z[i] = zi;
    u.w[i] = 0.5 * hi * hi + Fi;
    u.entries[i] << hi, ri, zi, hi, hi * zi, u.w[i];
  }
  return u;
}

Eigen::Matrix3d reduction_row_op(const ConstitutiveFn& f, const KPoint& base) {
  Eigen::Matrix3d b = Eigen::Matrix3d::Identity();
  b(2, 0) = -f.eval(base.v);
  b(2, 1) = -base.u;
  return b;
}

SMatrix s_matrix(const USet& u, const Tolerance& tol) {
  SMatrix out;
  const auto o = u.others();
  for (int n = 0; n < 3; ++n) {
    const int i = o[n];
    out.s(n, 0) = u.h[i];
    out.s(n, 1) = u.r[i];
    out.s(n, 2) = u.z[i];
    out.s(n, 3) = u.h[i] * u.z[i];
    out.s(n, 4) = u.w[i];
  }
  out.rank = numeric_rank(out.s, tol);
  out.gap = rank_gap(out.s, tol);
  return out;
}

AMatrices a_matrices(const USet& u, const Tolerance& tol) {
  AMatrices out;
  const auto o = u.others();
  for (int n = 0; n < 3; ++n) {
    const int i = o[n];
    out.al.col(n) << u.h[i], u.z[i], u.h[i] * u.z[i];
    out.ar.col(n) << u.r[i], u.h[i], u.w[i];
  }
  out.a0 << out.al, out.ar;
  out.rank_l = numeric_rank(out.al, tol);
  out.rank_r = numeric_rank(out.ar, tol);
  out.rank_0 = numeric_rank(out.a0, tol);
  return out;
}

namespace {

// Greedy basis extraction: keep entries that grow the numeric rank.
std::vector<Mat32> extract_basis(const std::array<Mat32, 4>& entries, const Tolerance& tol) {
  std::vector<Mat32> basis;
  for (const auto& e : entries) {
    std::vector<Mat32> trial = basis;
    trial.push_back(e);
    if (span_dim(trial, tol) > static_cast<int>(basis.size())) basis.push_back(e);
  }
  return basis;
}

}  // namespace

SubspaceRep subspace_of(const USet& u, const Tolerance& tol) {
  SubspaceRep rep;
  rep.basis = extract_basis(u.entries, tol);
  if (rep.basis.size() == 3) {
    const AMatrices am = a_matrices(u, tol);
    if (am.rank_l == 3)
      rep.a_form = am.ar * am.al.inverse();
  }
  return rep;
}

Mat32 normalize_direction(const Mat32& m) {
  const double n = m.norm();
  if (!(n > 0.0)) return Mat32::Zero();
  Mat32 out = m / n;
  for (Eigen::Index k = 0; k < out.size(); ++k) {
    const double v = out.data()[k];
    if (std::abs(v) > 1e-14) {
      if (v < 0.0) out = -out;
      break;
    }
  }
  return out;
}

namespace {

// Quadratic form coefficients of one minor over a basis: M(s B1 + t B2) =
// a s^2 + b st + c t^2, by polarization.
struct Quadratic {
  double a = 0.0, b = 0.0, c = 0.0;

  double eval(double s, double t) const { return a * s * s + b * s * t + c * t * t; }
  double scale() const { return std::max({std::abs(a), std::abs(b), std::abs(c)}); }
};

Quadratic minor_quadratic(int which, const Mat32& b1, const Mat32& b2) {
  const auto mi = [&](const Mat32& m) { return minors_of(m)(which); };
  Quadratic q;
  q.a = mi(b1);
  q.c = mi(b2);
  q.b = mi(b1 + b2) - q.a - q.c;
  return q;
}

// Real root lines (s,t) of a homogeneous quadratic, as direction pairs.
std::vector<std::pair<double, double>> root_lines(const Quadratic& q, double tol_abs) {
  std::vector<std::pair<double, double>> out;
  if (std::abs(q.a) <= tol_abs) {
    // q = t (b s + c t)
    out.emplace_back(1.0, 0.0);
    if (std::abs(q.b) > tol_abs) out.emplace_back(-q.c, q.b);
    return out;
  }
  const double disc = q.b * q.b - 4.0 * q.a * q.c;
  if (disc < -tol_abs * std::abs(q.a)) return out;
  if (disc <= tol_abs * std::abs(q.a)) {
    out.emplace_back(-q.b, 2.0 * q.a);
    return out;
  }
  const double sq = std::sqrt(disc);
  out.emplace_back(-q.b + sq, 2.0 * q.a);
  out.emplace_back(-q.b - sq, 2.0 * q.a);
  return out;
}

void push_unique_line(std::vector<Mat32>& lines, const Mat32& cand) {
  const Mat32 n = normalize_direction(cand);
  for (const auto& l : lines)
    if ((l - n).norm() < 1e-7) return;
  lines.push_back(n);
}

ClassifyResult classify_dim1(const SubspaceRep& s, const Tolerance& tol) {
  ClassifyResult res;
  res.ok = true;
  if (numeric_rank(s.basis[0], tol) == 1) {
    res.dirs.kind = Rank1Directions::Kind::Lines;
    res.dirs.lines.push_back(normalize_direction(s.basis[0]));
  } else {
    res.dirs.kind = Rank1Directions::Kind::Empty;
  }
  res.margin = rank_gap(s.basis[0], tol);
  return res;
}

ClassifyResult classify_dim2(const SubspaceRep& s, const Tolerance&) {
  ClassifyResult res;
  const Mat32 &b1 = s.basis[0], &b2 = s.basis[1];
  const Quadratic q12 = minor_quadratic(0, b1, b2);
  const Quadratic q13 = minor_quadratic(1, b1, b2);
  const Quadratic q23 = minor_quadratic(2, b1, b2);
  const double scale = std::max({q12.scale(), q13.scale(), q23.scale()});

  if (scale <= 1e-13 * std::max(1.0, b1.squaredNorm() + b2.squaredNorm())) {
    res.ok = true;
    res.dirs.kind = Rank1Directions::Kind::Whole;
    return res;
  }

  // Root lines of the largest minor form, verified against all three.
  const Quadratic* lead = &q12;
  if (q13.scale() > lead->scale()) lead = &q13;
  if (q23.scale() > lead->scale()) lead = &q23;

  const double tol_abs = 1e-12 * scale;
  std::vector<Mat32> lines;
  for (auto [sv, tv] : root_lines(*lead, tol_abs)) {
    const double n = std::hypot(sv, tv);
    if (!(n > 0.0)) continue;
    sv /= n;
    tv /= n;
    const double worst = std::max(
        {std::abs(q12.eval(sv, tv)), std::abs(q13.eval(sv, tv)), std::abs(q23.eval(sv, tv))});
    if (worst <= 1e-8 * scale) push_unique_line(lines, sv * b1 + tv * b2);
  }
  res.ok = true;
  res.margin = 1.0;
  if (lines.empty()) {
    res.dirs.kind = Rank1Directions::Kind::Empty;
  } else {
    res.dirs.kind = Rank1Directions::Kind::Lines;
    res.dirs.lines = std::move(lines);
  }
  return res;
}

ClassifyResult classify_eigen(const SubspaceRep& s, const Tolerance& tol) {
  ClassifyResult res;
  const Eigen::Matrix3d a = *s.a_form;
  Eigen::EigenSolver<Eigen::Matrix3d> es(a);
  if (es.info() != Eigen::Success) {
    res.failure = "eigen decomposition failed";
    return res;
  }
  const double scale = std::max(1e-300, std::max(a.norm(), es.eigenvalues().cwiseAbs().maxCoeff()));
  const double real_tol = 1e-9 * scale;
  const double cluster_tol = 1e-7 * scale;

  std::vector<double> real_eigs;
  for (int k = 0; k < 3; ++k) {
    const auto ev = es.eigenvalues()(k);
    if (std::abs(ev.imag()) <= real_tol) real_eigs.push_back(ev.real());
  }
  if (real_eigs.empty()) {
    res.failure = "no real eigenvalue detected (3x3 real matrix); numerical anomaly";
    return res;
  }
  std::sort(real_eigs.begin(), real_eigs.end());

  struct Cluster {
    double value;
    int geo;
  };
  std::vector<Cluster> clusters;
  size_t i = 0;
  res.margin = 1.0;
  while (i < real_eigs.size()) {
    size_t j = i + 1;
    double sum = real_eigs[i];
    while (j < real_eigs.size() && real_eigs[j] - real_eigs[j - 1] <= cluster_tol) {
      sum += real_eigs[j];
      ++j;
    }
    const double mean = sum / static_cast<double>(j - i);
    Tolerance rt = tol;
    rt.rank_tol = std::max(tol.rank_tol, 1e-9);
    const int geo = 3 - numeric_rank(a - mean * Eigen::Matrix3d::Identity(), rt);
    if (geo < 1) {
      res.failure = "eigenvalue with empty numerical eigenspace";
      return res;
    }
    clusters.push_back({mean, geo});
    i = j;
  }

  // Separation margin between clusters, relative to scale.
  for (size_t k = 1; k < clusters.size(); ++k)
    res.margin = std::min(res.margin, (clusters[k].value - clusters[k - 1].value) / scale);

  const auto dir_of = [&](const Vec3& zeta) {
    Mat32 m;
    m.col(0) = zeta;
    m.col(1) = a * zeta;
    return normalize_direction(m);
  };
  const auto null_vectors = [&](double lambda, int count) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(a - lambda * Eigen::Matrix3d::Identity(),
                                          Eigen::ComputeFullV);
    std::vector<Vec3> vs;
    for (int k = 0; k < count; ++k) vs.push_back(svd.matrixV().col(2 - k));
    return vs;
  };

  res.ok = true;
  auto& d = res.dirs;
  bool have_plane = false;
  for (const auto& c : clusters) {
    if (c.geo >= 3) {
      d.kind = Rank1Directions::Kind::Whole;
      d.lines.clear();
      return res;
    }
    if (c.geo == 2) {
      const auto vs = null_vectors(c.value, 2);
      d.plane_basis = {dir_of(vs[0]), dir_of(vs[1])};
      have_plane = true;
    } else {
      const auto vs = null_vectors(c.value, 1);
      push_unique_line(d.lines, dir_of(vs[0]));
    }
  }
  d.kind = have_plane ? Rank1Directions::Kind::PlanePlusLine
                      : (d.lines.empty() ? Rank1Directions::Kind::Empty
                                         : Rank1Directions::Kind::Lines);
  return res;
}

// Projective scan over the three affine charts of RP^2 with Gauss-Newton
// polish; used when no (z|Az) form is available.
ClassifyResult classify_grid(const SubspaceRep& s, const Tolerance&) {
  ClassifyResult res;
  const auto& b = s.basis;
  Quadratic g[3][3];  // g[minor] over pairs via polarization below
  // Represent each minor as alpha^T G alpha with symmetric G.
  Eigen::Matrix3d gm[3];
  for (int which = 0; which < 3; ++which) {
    Eigen::Matrix3d g3;
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        const auto mi = [&](const Mat32& m) { return minors_of(m)(which); };
        const double mij = 0.5 * (mi(b[i] + b[j]) - mi(b[i]) - mi(b[j]));
        g3(i, j) = g3(j, i) = (i == j) ? mi(b[i]) : mij;
      }
    }
    gm[which] = g3;
  }
  (void)g;
  double scale = 0.0;
  for (const auto& g3 : gm) scale = std::max(scale, g3.cwiseAbs().maxCoeff());
  if (scale <= 0.0) {
    res.ok = true;
    res.dirs.kind = Rank1Directions::Kind::Whole;
    return res;
  }

  const auto minors_at = [&](const Vec3& al) {
    return Vec3(al.dot(gm[0] * al), al.dot(gm[1] * al), al.dot(gm[2] * al));
  };
  // damped least squares on the unit sphere with monotone acceptance
  const auto polish = [&](Vec3 al) {
    al.normalize();
    Vec3 f = minors_at(al);
    double f2 = f.squaredNorm();
    double mu = 1e-4 * scale * scale;
    for (int it = 0; it < 80; ++it) {
      Eigen::Matrix3d jac;
      for (int k = 0; k < 3; ++k) jac.row(k) = (2.0 * gm[k] * al).transpose();
      bool accepted = false;
      for (int tries = 0; tries < 8; ++tries) {
        const Eigen::Matrix3d jtj =
            jac.transpose() * jac + mu * Eigen::Matrix3d::Identity();
        const Vec3 cand = (al - jtj.ldlt().solve(jac.transpose() * f)).normalized();
        const Vec3 fc = minors_at(cand);
        if (fc.squaredNorm() < f2) {
          al = cand;
          f = fc;
          f2 = fc.squaredNorm();
          mu = std::max(mu * 0.3, 1e-14 * scale * scale);
          accepted = true;
          break;
        }
        mu *= 4.0;
      }
      if (!accepted || f2 < 1e-28 * scale * scale) break;
    }
    return al;
  };

  // polish from a fixed chart lattice; no seed gating, so shallow basins
  // still get visited
  const double step = 0.05;
  const double accept_tol = 1e-9 * scale;
  std::vector<Vec3> roots;
  for (int chart = 0; chart < 3; ++chart) {
    for (double x = -1.0; x <= 1.0 + 1e-12; x += step) {
      for (double y = -1.0; y <= 1.0 + 1e-12; y += step) {
        Vec3 al;
        if (chart == 0) al = Vec3(1.0, x, y);
        else if (chart == 1) al = Vec3(x, 1.0, y);
        else al = Vec3(x, y, 1.0);
        const Vec3 root = polish(al.normalized());
        if (minors_at(root).cwiseAbs().maxCoeff() > accept_tol) continue;
        bool dup = false;
        for (const auto& q : roots)
          if (std::min((q - root).norm(), (q + root).norm()) < 1e-5) dup = true;
        if (!dup) roots.push_back(root);
      }
    }
  }

  res.ok = true;
  auto& d = res.dirs;
  const auto dir_at = [&](const Vec3& al) {
    return normalize_direction(al(0) * b[0] + al(1) * b[1] + al(2) * b[2]);
  };
  if (roots.empty()) {
    d.kind = Rank1Directions::Kind::Empty;
    return res;
  }
  if (roots.size() <= 3) {
    d.kind = Rank1Directions::Kind::Lines;
    for (const auto& root : roots) push_unique_line(d.lines, dir_at(root));
    return res;
  }

  // Many roots: test whether they sit in a plane (plus at most one line) or
  // fill the whole space.
  MatX pts(static_cast<Eigen::Index>(roots.size()), 3);
  for (size_t k = 0; k < roots.size(); ++k) pts.row(static_cast<Eigen::Index>(k)) = roots[k].transpose();
  Eigen::JacobiSVD<MatX> svd(pts, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  if (sv(2) < 1e-6 * sv(0)) {
    // coplanar root set; confirm the plane is rank-1 throughout
    const Vec3 n = svd.matrixV().col(2);
    Vec3 e1 = n.unitOrthogonal(), e2 = n.cross(e1);
    bool plane_ok = true;
    for (int k = 0; k < 32 && plane_ok; ++k) {
      const double th = 2.0 * M_PI * k / 32.0;
      const Vec3 al = std::cos(th) * e1 + std::sin(th) * e2;
      if (minors_at(al).cwiseAbs().maxCoeff() > 1e-7 * scale) plane_ok = false;
    }
    if (plane_ok) {
      d.kind = Rank1Directions::Kind::PlanePlusLine;
      d.plane_basis = {dir_at(e1), dir_at(e2)};
      return res;
    }
    res.ok = false;
    res.failure = "coplanar root cloud without a rank-1 plane; cannot classify at tolerance";
    return res;
  }
  // Full-dimensional root cloud: whole space only if random samples vanish.
  bool whole = true;
  for (int k = 0; k < 64 && whole; ++k) {
    Vec3 al(std::sin(0.7 * k + 0.3), std::cos(1.3 * k + 1.1), std::sin(2.1 * k + 2.7));
    al.normalize();
    if (minors_at(al).cwiseAbs().maxCoeff() > 1e-7 * scale) whole = false;
  }
  if (whole) {
    d.kind = Rank1Directions::Kind::Whole;
    return res;
  }
  res.ok = false;
  res.failure = "root cloud neither <=3 lines, a plane, nor the whole space";
  return res;
}

}  // namespace

ClassifyResult rank1_directions(const SubspaceRep& s, const Tolerance& tol) {
  ClassifyResult res;
  switch (s.dim()) {
    case 1:
      return classify_dim1(s, tol);
    case 2:
      return classify_dim2(s, tol);
    case 3:
      if (s.a_form) return classify_eigen(s, tol);
      return classify_grid(s, tol);
    default:
      res.failure = "dim(S) must be 1, 2 or 3";
      return res;
  }
}

}  // namespace rank1lab
