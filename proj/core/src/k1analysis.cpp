// k1analysis.cpp
#include "rank1lab/k1analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace rank1lab {

double g_eval(const ConstitutiveFn& f, double v, double r) {
  const double a0 = f.eval(v);
  const double ar = f.eval(v + r) - a0;
  const double Fr = f.potential(v + r) - f.potential(v) - a0 * r;
  return 2.0 * Fr - r * ar;
}

namespace {

double bisect_sign_change(const std::function<double(double)>& fn, double lo,
                          double hi, double flo, double target, int iters) {
  // assumes fn(lo) and fn(hi) have opposite signs
  for (int it = 0; it < iters; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = fn(mid);
    if (std::abs(fm) <= target || hi - lo < 1e-16 * std::max(1.0, std::abs(lo) + std::abs(hi)))
      return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

Rank1Search find_rank1(const FnPtr& f, double lo, double hi, const FindRank1Options& opt) {
  if (!(lo < hi)) throw std::invalid_argument("find_rank1: interval lo < hi required");
  if (!f->domain().contains(Interval{lo, hi}))
    throw DomainError("find_rank1: interval outside the function domain");
  if (!strictly_increasing_on(*f, lo, hi, std::max(3, opt.grid)))
    throw std::invalid_argument("find_rank1: 𝔞' > 0 fails on the interval");

  Rank1Search out;
  const ConvexityClass cls = classify_convexity(*f, lo, hi, std::max(3, opt.grid));
  out.inflections = inflection_scan(*f, lo, hi, std::max(3, opt.grid));

  if (cls == ConvexityClass::StrictlyConvex || cls == ConvexityClass::StrictlyConcave) {
    out.certified_empty = true;
    out.basis = "fixed-sign second derivative: 2F_v(r) = r a_v(r) has no nonzero root, "
                "so no rank-1 connection exists on the interval";
    return out;
  }
  if (out.inflections.empty()) {
    out.basis = "second derivative has no bracketed sign change at this resolution; "
                "no certificate either way";
    return out;
  }

  // Roots of 𝔞'' give candidate isolated inflections.
  std::vector<double> roots;
  for (const auto& [bl, bh] : out.inflections) {
    const double v0 =
        bisect_sign_change([&](double x) { return f->d2(x); }, bl, bh, f->d2(bl), 0.0, 200);
    roots.push_back(v0);
  }

  for (size_t ri = 0; ri < roots.size() && out.connections.size() <
                                               static_cast<size_t>(opt.max_connections);
       ++ri) {
    const double v0 = roots[ri];
    double delta = 0.9 * std::min(v0 - lo, hi - v0);
    for (double other : roots)
      if (other != v0) delta = std::min(delta, 0.9 * std::abs(other - v0));
    if (!(delta > 0.0)) continue;

    // shrink until 𝔞'' has fixed opposite signs on both flanks
    const auto flank_sign = [&](double a, double b) {
      int sign = 0;
      for (int k = 0; k < 33; ++k) {
        const double x = a + (b - a) * (k + 0.5) / 33.0;
        const double s = f->d2(x);
        if (s == 0.0) return 0;
        const int si = s > 0.0 ? 1 : -1;
        if (sign == 0) sign = si;
        else if (sign != si) return 0;
      }
      return sign;
    };
    int sl = 0, sr = 0;
    for (int shrink = 0; shrink < 40; ++shrink) {
      sl = flank_sign(v0 - delta, v0);
      sr = flank_sign(v0, v0 + delta);
      if (sl != 0 && sr != 0 && sl != sr) break;
      delta *= 0.5;
    }
    if (!(sl != 0 && sr != 0 && sl != sr)) continue;

    // pick v1 < v0 with g_{v1}(v0 - v1) and g_{v1}(v0 + delta/2 - v1) of
    // opposite signs, then bisect between the two offsets
    double v1 = 0.0;
    bool have = false;
    for (double c = 0.25; c > 1e-6; c *= 0.5) {
      const double cand = v0 - delta * c;
      const double p = g_eval(*f, cand, v0 - cand);
      const double q = g_eval(*f, cand, v0 + 0.5 * delta - cand);
      if (p != 0.0 && q != 0.0 && std::signbit(p) != std::signbit(q)) {
        v1 = cand;
        have = true;
        break;
      }
    }
    if (!have) continue;

    const auto gw = [&](double w) { return g_eval(*f, v1, v0 + w - v1); };
    const double w0 = 0.0, w1 = 0.5 * delta;
    const double r = v0 + bisect_sign_change(gw, w0, w1, gw(w0), opt.g_tol, 240) - v1;
    const double ar = f->eval(v1 + r) - f->eval(v1);
    const double ra = r * ar;
    if (!(ra > 0.0)) continue;

    Rank1Connection conn;
    conn.v = v1;
    conn.r = r;
    conn.h = std::sqrt(ra);
    conn.witness0 = {0.0, v1};
    conn.witness1 = {conn.h, v1 + r};
    conn.g_resid = std::abs(g_eval(*f, v1, r));
    conn.minor_resid = minors_of(q_map(*f, v1, conn.h, r)).cwiseAbs().maxCoeff();
    {
      const Mat32 diff = p_map(*f, conn.witness1) - p_map(*f, conn.witness0);
      Eigen::JacobiSVD<MatX> svd(diff);
      conn.sv_ratio = svd.singularValues()(1) / svd.singularValues()(0);
    }
    out.connections.push_back(conn);
  }
  out.basis = out.connections.empty()
                  ? "isolated inflection bracketed but bisection produced no root"
                  : "bisection on g_{v1}(v0 + w - v1) across the inflection";
  return out;
}

LambdaSystem lambda_solve(const ConstitutiveFn& f, double v_k, double lambda1,
                          double lambda2, double rlo, double rhi, int grid,
                          double residual_tol) {
  if (lambda1 == 0.0 || lambda2 == 0.0)
    throw std::invalid_argument("lambda_solve: lambda1 and lambda2 must be nonzero");
  if (!(rlo < rhi)) throw std::invalid_argument("lambda_solve: rlo < rhi required");
  if (grid < 16) throw std::invalid_argument("lambda_solve: grid too small");

  LambdaSystem sys;
  sys.base_v = v_k;
  sys.lambda1 = lambda1;
  sys.lambda2 = lambda2;

  const double a_base = f.eval(v_k);
  const double F_base = f.potential(v_k);
  const auto a = [&](double r) { return f.eval(v_k + r) - a_base; };
  const auto F = [&](double r) { return f.potential(v_k + r) - F_base - a_base * r; };
  const auto phi = [&](double r) {
    const double den = a(r) - lambda1;
    return F(r) - lambda1 * r - 0.5 * lambda2 * lambda2 +
           0.5 * lambda1 * lambda1 * lambda2 * lambda2 / (den * den);
  };
  const auto push_solution = [&](double r, bool trivial) {
    LambdaSolution s;
    s.r = r;
    s.trivial = trivial;
    const double ar = a(r);
    const double den = ar - lambda1;
    s.h = trivial ? 0.0 : lambda2 * ar / den;
    s.resid_y = std::abs(s.h * ar - lambda1 * s.h - lambda2 * ar);
    s.resid_w = std::abs(0.5 * s.h * s.h + F(r) - lambda1 * r - lambda2 * s.h);
    if (std::max(s.resid_y, s.resid_w) <= residual_tol) sys.solutions.push_back(s);
  };

  // keep the scan inside the function domain
  const Interval dom = f.domain();
  double lo = std::max(rlo, dom.lo - v_k), hi = std::min(rhi, dom.hi - v_k);
  const double pad = 1e-12 * std::max(1.0, std::abs(lo) + std::abs(hi));
  lo += pad;
  hi -= pad;
  if (!(lo < hi)) throw DomainError("lambda_solve: interval outside the function domain");

  push_solution(0.0, true);

  double xprev = lo, fprev = phi(lo);
  for (int k = 1; k < grid; ++k) {
    const double x = lo + (hi - lo) * k / (grid - 1);
    const double fx = phi(x);
    if (std::isfinite(fprev) && std::isfinite(fx) && fprev != 0.0 && fx != 0.0 &&
        std::signbit(fprev) != std::signbit(fx)) {
      const double r = bisect_sign_change(phi, xprev, x, fprev, 0.0, 200);
      if (std::abs(r) > 1e-9 * std::max(1.0, hi - lo)) push_solution(r, false);
    }
    xprev = x;
    fprev = fx;
  }
  std::sort(sys.solutions.begin(), sys.solutions.end(),
            [](const LambdaSolution& x, const LambdaSolution& y) { return x.r < y.r; });
  for (const auto& s : sys.solutions)
    if (a(s.r) < lambda1) ++sys.count_below;
  return sys;
}

DSignMatrix d_matrix(const ConstitutiveFn& f, const Quadruple& k4, double margin) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (k4.pts[i].v == k4.pts[j].v)
        throw std::invalid_argument("d_matrix: v values must be pairwise distinct");

  DSignMatrix out;
  double scale = 0.0;
  for (int k = 0; k < 4; ++k) {
    const double ak = f.eval(k4.pts[k].v);
    for (int i = 0; i < 4; ++i) {
      if (i == k) continue;
      const double h = k4.pts[i].u - k4.pts[k].u;
      const double r = k4.pts[i].v - k4.pts[k].v;
      const double avk = f.eval(k4.pts[k].v + r) - ak;  // a_{v_k}(r_i^k)
      out.d(i, k) = h * h - r * avk;
      scale = std::max(scale, std::abs(out.d(i, k)));
    }
  }
  out.symmetry_error = (out.d - out.d.transpose()).cwiseAbs().maxCoeff();
  const double m = margin > 0.0 ? margin : 1e-12 * std::max(1.0, scale);
  for (int k = 0; k < 4; ++k) {
    bool pos = false, neg = false, zero = false;
    for (int i = 0; i < 4; ++i) {
      if (i == k) continue;
      // column k of the table = the dets of the base-k reduced 2x2 set
      const double d = out.d(i, k);
      if (d > m) pos = true;
      else if (d < -m) neg = true;
      else zero = true;
    }
    out.row_sign[static_cast<size_t>(k)] = (pos && !neg && !zero) ? 1 : (neg && !pos && !zero) ? -1 : 0;
    if (out.row_sign[static_cast<size_t>(k)] != 0) out.some_constant_row = true;
  }
  return out;
}

namespace {

struct LsFit {
  double c0 = 0.0, c1 = 0.0;
  double resid = 0.0;  // max abs residual
};

LsFit fit2(const Vec3& x0, const Vec3& x1, const Vec3& target) {
  Eigen::Matrix<double, 3, 2> a;
  a.col(0) = x0;
  a.col(1) = x1;
  const Eigen::Vector2d c = a.colPivHouseholderQr().solve(target);
  LsFit fit;
  fit.c0 = c(0);
  fit.c1 = c(1);
  fit.resid = (a * c - target).cwiseAbs().maxCoeff();
  return fit;
}

struct EigenStructure {
  bool ok = false;
  std::string kind;  // "lines:<n>", "plane+line", "whole", or failure note
};

EigenStructure eigen_structure(const Eigen::Matrix3d& a, const Tolerance& tol) {
  SubspaceRep rep;
  rep.basis.resize(3);
  for (int i = 0; i < 3; ++i) {
    Mat32 b;
    b.col(0) = Vec3::Unit(i);
    b.col(1) = a.col(i);
    rep.basis[static_cast<size_t>(i)] = b;
  }
  rep.a_form = a;
  const ClassifyResult cr = rank1_directions(rep, tol);
  EigenStructure es;
  if (!cr.ok) {
    es.kind = cr.failure;
    return es;
  }
  es.ok = true;
  switch (cr.dirs.kind) {
    case Rank1Directions::Kind::Whole: es.kind = "whole"; break;
    case Rank1Directions::Kind::PlanePlusLine: es.kind = "plane+line"; break;
    case Rank1Directions::Kind::Lines:
      es.kind = "lines:" + std::to_string(cr.dirs.lines.size());
      break;
    case Rank1Directions::Kind::Empty: es.kind = "lines:0"; break;
  }
  return es;
}

}  // namespace

CertReport certify_no_t4(const FnPtr& f, const Quadruple& k4, const CertOptions& opt) {
  CertReport rep;
  double scale_u = 1.0, scale_v = 1.0;
  for (const auto& p : k4.pts) {
    if (!f->domain().contains(p.v))
      throw DomainError("certify_no_t4: quadruple point outside function domain");
    scale_u = std::max(scale_u, std::abs(p.u));
    scale_v = std::max(scale_v, std::abs(p.v));
  }
  const double m_u = opt.margin * scale_u;
  const double m_v = opt.margin * scale_v;

  // (0) exact duplicates are degenerate before anything else
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (std::abs(k4.pts[i].u - k4.pts[j].u) <= m_u &&
          std::abs(k4.pts[i].v - k4.pts[j].v) <= m_v) {
        rep.outcome = CertOutcome::Degenerate;
        rep.reason = "duplicate points " + std::to_string(i) + "," + std::to_string(j);
        return rep;
      }

  // (1) rank-1 connected pair inside the quadruple; under the convexity
  // hypotheses none exist, so a hit reports the witness before the gate
  std::array<Mat32, 4> pmats;
  for (int i = 0; i < 4; ++i) pmats[static_cast<size_t>(i)] = p_map(*f, k4.pts[i]);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (is_rank1_connected(pmats[static_cast<size_t>(i)], pmats[static_cast<size_t>(j)], opt.tol)) {
        rep.outcome = CertOutcome::Rank1Present;
        rep.reason = "points " + std::to_string(i) + "," + std::to_string(j) +
                     " are rank-1 connected";
        Rank1Connection conn;
        conn.v = k4.pts[i].v;
        conn.r = k4.pts[j].v - k4.pts[i].v;
        conn.h = k4.pts[j].u - k4.pts[i].u;
        conn.witness0 = k4.pts[i];
        conn.witness1 = k4.pts[j];
        conn.g_resid = std::abs(g_eval(*f, conn.v, conn.r));
        rep.connection = conn;
        return rep;
      }

  // (2) hypothesis gate on the convex hull of the v's
  double vlo = k4.pts[0].v, vhi = k4.pts[0].v;
  for (const auto& p : k4.pts) {
    vlo = std::min(vlo, p.v);
    vhi = std::max(vhi, p.v);
  }
  const double vpad = vhi > vlo ? 0.0 : 1e-9 * std::max(1.0, std::abs(vlo));
  if (!strictly_increasing_on(*f, vlo - vpad, vhi + vpad, opt.probe)) {
    rep.outcome = CertOutcome::Inconclusive;
    rep.reason = "hypothesis violated: 𝔞' > 0 fails on [v_min, v_max]";
    return rep;
  }
  const ConvexityClass cls = classify_convexity(*f, vlo - vpad, vhi + vpad, opt.probe);
  if (cls != ConvexityClass::StrictlyConvex && cls != ConvexityClass::StrictlyConcave) {
    rep.outcome = CertOutcome::Inconclusive;
    rep.reason = cls == ConvexityClass::SignChanging
                     ? "hypothesis violated: 𝔞'' changes sign on [v_min, v_max]"
                     : "hypothesis violated: 𝔞'' vanishes on the probe grid";
    return rep;
  }

  // (3) affine dimension <= 1 means every T4 there would be degenerate
  {
    std::vector<Mat32> diffs;
    for (int i = 1; i < 4; ++i) diffs.push_back(pmats[static_cast<size_t>(i)] - pmats[0]);
    if (span_dim(diffs, opt.tol) < 2) {
      rep.outcome = CertOutcome::Degenerate;
      rep.reason = "affine span of the quadruple has dimension <= 1";
      return rep;
    }
  }

  // (4) per-base cascade
  const double m_rel = opt.margin;
  bool anomalous = false;
  std::string anomaly;
  for (int k = 0; k < 4 && !anomalous; ++k) {
    BaseAnalysis ba;
    ba.base = k;
    const USet u = reduce(*f, k4, k);
    const Vec3 h = u.hvec(), r = u.rvec(), z = u.zvec();
    const double sh = h.cwiseAbs().maxCoeff(), sr = r.cwiseAbs().maxCoeff(),
                 sz = z.cwiseAbs().maxCoeff();

    if (sh <= m_u || sr <= m_v) {
      ba.branch = "L1.3";
      ba.resolves = true;
      ba.note = sh <= m_u ? "h vector vanishes" : "r vector vanishes";
      rep.bases.push_back(ba);
      break;
    }
    if (cross3(h, r).norm() <= m_rel * std::max(1.0, sh * sr)) {
      ba.branch = "L1.5";
      ba.resolves = true;
      ba.note = "h x r = 0";
      rep.bases.push_back(ba);
      break;
    }
    if (cross3(h, z).norm() <= m_rel * std::max(1.0, sh * sz)) {
      ba.branch = "L1.5";
      ba.resolves = true;
      ba.note = "h x z = 0";
      rep.bases.push_back(ba);
      break;
    }

    const SMatrix sm = s_matrix(u, opt.tol);
    ba.dim = sm.rank;
    ba.s = sm.s;
    rep.margins["sv_gap_base" + std::to_string(k)] = sm.gap;
    if (sm.rank <= 1) {
      anomalous = true;
      anomaly = "S matrix rank <= 1 after the h,r checks";
      rep.bases.push_back(ba);
      break;
    }

    if (sm.rank == 2) {
      // dim-2 theorem: gamma/lambda/mu fits, factor roots, minor comparison
      const Vec3 y = u.yvec(), w = u.wvec();
      const LsFit gam = fit2(h, z, r);
      const LsFit lam = fit2(h, z, y);
      const LsFit mu = fit2(h, z, w);
      const double tscale = std::max({1.0, sr, y.cwiseAbs().maxCoeff(), w.cwiseAbs().maxCoeff()});
      ba.fit_resid = std::max({gam.resid, lam.resid, mu.resid});
      if (ba.fit_resid > opt.fit_gate * tscale) {
        anomalous = true;
        anomaly = "dim 2 but the gamma/lambda/mu fits do not close";
        rep.bases.push_back(ba);
        break;
      }
      const double g1 = gam.c0, g2 = gam.c1;
      const double disc = g1 * g1 + 4.0 * g2;
      const double dscale = std::max(1.0, g1 * g1 + std::abs(g2));
      rep.margins["lc3_disc_base" + std::to_string(k)] = disc / dscale;
      ba.branch = "LC3";
      if (disc <= m_rel * dscale) {
        ba.resolves = true;
        ba.note = disc < -m_rel * dscale ? "discriminant < 0: no rank-1 direction"
                                         : "double root: a single rank-1 line";
        rep.bases.push_back(ba);
        break;
      }
      const double sq = std::sqrt(disc);
      int surviving = 0;
      for (const double root : {0.5 * (g1 + sq), 0.5 * (g1 - sq)}) {
        // minors of O(s,t) at (s,t) = (root,1)
        const double s = root, t = 1.0;
        const double m2 = s * (mu.c0 * s + mu.c1 * t) - (g1 * s + g2 * t) * (lam.c0 * s + lam.c1 * t);
        const double m3 = t * (mu.c0 * s + mu.c1 * t) - s * (lam.c0 * s + lam.c1 * t);
        const double mscale = std::max(1.0, (1.0 + s * s) *
                                                std::max({std::abs(lam.c0) + std::abs(lam.c1),
                                                          std::abs(mu.c0) + std::abs(mu.c1), 1.0}));
        if (std::max(std::abs(m2), std::abs(m3)) <= opt.fit_gate * mscale) ++surviving;
      }
      if (surviving <= 1) {
        ba.resolves = true;
        ba.note = "at most one of the factor roots is a rank-1 direction";
        rep.bases.push_back(ba);
        break;
      }
      anomalous = true;
      anomaly = "dim 2: both factor roots satisfy all minors (cardinality contradiction)";
      rep.bases.push_back(ba);
      break;
    }

    // dim 3
    const AMatrices am = a_matrices(u, opt.tol);
    ba.rank_l = am.rank_l;
    ba.rank_r = am.rank_r;
    ba.rank_0 = am.rank_0;
    ba.a0 = am.a0;
    if (am.rank_l == 3 || am.rank_r == 3) {
      ba.branch = "L12";
      ba.resolves = true;
      const Eigen::Matrix3d aform = am.rank_l == 3 ? Eigen::Matrix3d(am.ar * am.al.inverse())
                                                   : Eigen::Matrix3d(am.al * am.ar.inverse());
      const EigenStructure es = eigen_structure(aform, opt.tol);
      ba.note = es.ok ? ("eigen classification: " + es.kind)
                      : ("rank-3 side; classification diagnostics: " + es.kind);
      rep.bases.push_back(ba);
      break;
    }
    if (am.rank_0 == 3) {
      ba.branch = "L15";
      const Vec3 y = u.yvec(), w = u.wvec();
      const LsFit lam = fit2(h, z, y);   // y = l1 h + l2 z
      const LsFit mu = fit2(r, h, w);    // w = m1 r + m2 h
      const double tscale = std::max({1.0, y.cwiseAbs().maxCoeff(), w.cwiseAbs().maxCoeff()});
      ba.fit_resid = std::max(lam.resid, mu.resid);
      ba.lambda1 = lam.c0;
      ba.lambda2 = lam.c1;
      if (ba.fit_resid > opt.fit_gate * tscale) {
        anomalous = true;
        anomaly = "rank(A0)=3 with rank-2 sides but the lambda/mu fits do not close";
        rep.bases.push_back(ba);
        break;
      }
      const double sep = std::max(std::abs(lam.c0 - mu.c0), std::abs(lam.c1 - mu.c1));
      rep.margins["l15_sep_base" + std::to_string(k)] =
          sep / std::max(1.0, std::abs(lam.c0) + std::abs(lam.c1));
      if (sep <= m_rel * std::max(1.0, std::abs(lam.c0) + std::abs(lam.c1))) {
        anomalous = true;
        anomaly = "(lambda) = (mu) at margin contradicts rank(A0)=3";
        rep.bases.push_back(ba);
        break;
      }
      ba.resolves = true;
      ba.note = "at most three rank-1 lines";
      rep.bases.push_back(ba);
      break;
    }
    if (am.rank_0 == 2) {
      // joint lambda fit over both equations
      const Vec3 y = u.yvec(), w = u.wvec();
      Eigen::Matrix<double, 6, 2> a6;
      Eigen::Matrix<double, 6, 1> t6;
      for (int i = 0; i < 3; ++i) {
        a6(i, 0) = h(i);
        a6(i, 1) = z(i);
        t6(i) = y(i);
        a6(3 + i, 0) = r(i);
        a6(3 + i, 1) = h(i);
        t6(3 + i) = w(i);
      }
      const Eigen::Vector2d c = a6.colPivHouseholderQr().solve(t6);
      ba.lambda1 = c(0);
      ba.lambda2 = c(1);
      ba.fit_resid = (a6 * c - t6).cwiseAbs().maxCoeff();
      const double tscale = std::max({1.0, y.cwiseAbs().maxCoeff(), w.cwiseAbs().maxCoeff()});
      if (ba.fit_resid > opt.fit_gate * tscale) {
        anomalous = true;
        anomaly = "rank(A0)=2 but the lambda-system fit does not close";
        rep.bases.push_back(ba);
        break;
      }
      const double lscale = std::max(1.0, std::abs(ba.lambda1) + std::abs(ba.lambda2));
      if (std::abs(ba.lambda1) <= m_rel * lscale || std::abs(ba.lambda2) <= m_rel * lscale) {
        ba.branch = "L17";
        ba.resolves = true;
        ba.note = std::abs(ba.lambda1) <= m_rel * lscale ? "lambda1 = 0" : "lambda2 = 0";
        rep.bases.push_back(ba);
        break;
      }
      ba.branch = "lambda";
      rep.bases.push_back(ba);
      continue;
    }
    anomalous = true;
    anomaly = "rank(A0) <= 1 after the h,r checks";
    rep.bases.push_back(ba);
  }

  if (anomalous) {
    rep.outcome = CertOutcome::Inconclusive;
    rep.reason = anomaly;
    return rep;
  }
  for (const auto& ba : rep.bases)
    if (ba.resolves) {
      rep.outcome = CertOutcome::NoT4;
      rep.lemma_path = ba.branch;
      rep.reason = "base " + std::to_string(ba.base) + ": " + ba.note;
      return rep;
    }

  // (5) all four bases satisfy a lambda-system with nonzero coefficients:
  // sort by v and apply the D-sign row filter
  {
    Quadruple sorted = k4;
    std::sort(sorted.pts.begin(), sorted.pts.end(),
              [](const KPoint& a, const KPoint& b) { return a.v < b.v; });
    double min_sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
      min_sep = std::min(min_sep, sorted.pts[static_cast<size_t>(i + 1)].v -
                                      sorted.pts[static_cast<size_t>(i)].v);
    rep.margins["l23_v_sep"] = min_sep;
    if (!(min_sep > m_v)) {
      rep.outcome = CertOutcome::Inconclusive;
      rep.reason = "lambda branch with coincident v values";
      return rep;
    }
    const DSignMatrix ds = d_matrix(*f, sorted, opt.margin);
    rep.dsign = ds;
    rep.margins["d_symmetry"] = ds.symmetry_error;
    if (ds.some_constant_row) {
      rep.outcome = CertOutcome::NoT4;
      rep.lemma_path = "L23";
      for (int k = 0; k < 4; ++k)
        if (ds.row_sign[static_cast<size_t>(k)] != 0) {
          rep.reason = "determinant table column " + std::to_string(k) +
                       " has constant sign " +
                       (ds.row_sign[static_cast<size_t>(k)] > 0 ? std::string("+") : std::string("-"));
          break;
        }
      return rep;
    }
    rep.outcome = CertOutcome::Inconclusive;
    rep.reason = "all four lambda-systems close but no constant-sign row at margin";
    return rep;
  }
}

StructureReport structure_checks(const ConstitutiveFn& f,
                                 const std::vector<LambdaSystem>& systems,
                                 double margin) {
  StructureReport rep;
  for (const auto& sys : systems) {
    const double a_base = f.eval(sys.base_v);
    const auto a = [&](double r) { return f.eval(sys.base_v + r) - a_base; };
    const auto dval = [&](const LambdaSolution& s) { return s.h * s.h - s.r * a(s.r); };

    std::vector<const LambdaSolution*> above;  // a(r) > lambda1
    for (const auto& s : sys.solutions) {
      if (s.trivial) continue;
      const double d = dval(s);
      const double ar = a(s.r);
      if (std::abs(d) <= margin) continue;
      if (sys.lambda1 > 0.0 && ar < sys.lambda1 - margin) {
        ++rep.checked_l21;
        if (!(d > 0.0))
          rep.violations.push_back({"l21", "lambda1 > 0, a(r) < lambda1 but h^2 - r a(r) <= 0"});
      } else if (sys.lambda1 < 0.0 && ar > sys.lambda1 + margin) {
        ++rep.checked_l21;
        if (!(d < 0.0))
          rep.violations.push_back({"l21", "lambda1 < 0, a(r) > lambda1 but h^2 - r a(r) >= 0"});
      }
      if (sys.lambda1 > 0.0 && ar > sys.lambda1 + margin) above.push_back(&s);
    }
    std::sort(above.begin(), above.end(), [&](const LambdaSolution* x, const LambdaSolution* y) {
      return a(x->r) < a(y->r);
    });
    for (size_t i = 0; i + 1 < above.size(); ++i)
      for (size_t j = i + 1; j < above.size(); ++j) {
        ++rep.checked_l22;
        if (!(dval(*above[i]) > dval(*above[j])))
          rep.violations.push_back({"l22", "D not strictly decreasing in a(r) above lambda1"});
      }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

}  // namespace rank1lab
