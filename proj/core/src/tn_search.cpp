// tn_search.cpp
#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "rank1lab/tn.hpp"

namespace rank1lab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Problem {
  const std::vector<MatX>& t;
  Eigen::Index m, n, mn;
  int big_n;
  double kappa_margin;

  int params() const { return static_cast<int>(mn) + big_n * static_cast<int>(m + n) + big_n; }
  int resids() const { return (big_n + 1) * static_cast<int>(mn); }

  int off_p() const { return 0; }
  int off_a(int i) const { return static_cast<int>(mn) + i * static_cast<int>(m + n); }
  int off_b(int i) const { return off_a(i) + static_cast<int>(m); }
  int off_s(int i) const { return static_cast<int>(mn) + big_n * static_cast<int>(m + n) + i; }

  MatX cmat(const VecX& th, int i) const {
    const auto a = th.segment(off_a(i), m);
    const auto b = th.segment(off_b(i), n);
    return a * b.transpose();
  }

  double kappa(const VecX& th, int i) const {
    const double s = th(off_s(i));
    return 1.0 + kappa_margin + s * s;
  }

  void residuals(const VecX& th, VecX& r) const {
    r.resize(resids());
    MatX acc = Eigen::Map<const MatX>(th.data(), m, n);
    for (int i = 0; i < big_n; ++i) {
      const MatX ci = cmat(th, i);
      const MatX ri = acc + kappa(th, i) * ci - t[static_cast<size_t>(i)];
      r.segment(i * mn, mn) = Eigen::Map<const VecX>(ri.data(), mn);
      acc += ci;
    }
    const MatX sum = acc - Eigen::Map<const MatX>(th.data(), m, n);
    r.segment(big_n * mn, mn) = Eigen::Map<const VecX>(sum.data(), mn);
  }

  void jacobian(const VecX& th, MatX& j) const {
    j.setZero(resids(), params());
    for (int blk = 0; blk <= big_n; ++blk) {
      const int row0 = blk * static_cast<int>(mn);
      if (blk < big_n)
        for (Eigen::Index k = 0; k < mn; ++k) j(row0 + k, k) = 1.0;  // d/dP
      for (int i = 0; i < big_n; ++i) {
        double coef = 0.0;
        if (blk == big_n) coef = 1.0;
        else if (i < blk) coef = 1.0;
        else if (i == blk) coef = kappa(th, i);
        if (coef == 0.0) continue;
        const auto a = th.segment(off_a(i), m);
        const auto b = th.segment(off_b(i), n);
        // vec(a b^T)(r + m c) = a_r b_c
        for (Eigen::Index c = 0; c < n; ++c)
          for (Eigen::Index rr = 0; rr < m; ++rr) {
            j(row0 + rr + m * c, off_a(i) + rr) += coef * b(c);
            j(row0 + rr + m * c, off_b(i) + c) += coef * a(rr);
          }
        if (i == blk && blk < big_n) {
          const double ds = 2.0 * th(off_s(i));
          for (Eigen::Index c = 0; c < n; ++c)
            for (Eigen::Index rr = 0; rr < m; ++rr)
              j(row0 + rr + m * c, off_s(i)) = ds * a(rr) * b(c);
        }
      }
    }
  }
};

double max_abs_residual(const VecX& r) { return r.cwiseAbs().maxCoeff(); }

// Damped least squares from one start; returns the final max residual.
double lm_run(const Problem& pb, VecX& th, int iters) {
  VecX r, rtry;
  MatX j;
  pb.residuals(th, r);
  double f2 = r.squaredNorm();
  double mu = -1.0;
  for (int it = 0; it < iters; ++it) {
    pb.jacobian(th, j);
    const MatX h = j.transpose() * j;
    const VecX g = j.transpose() * r;
    if (mu < 0.0) mu = 1e-3 * h.diagonal().maxCoeff() + 1e-12;
    bool accepted = false;
    for (int tries = 0; tries < 12; ++tries) {
      MatX hd = h;
      hd.diagonal().array() += mu * (h.diagonal().array() + 1e-12);
      const VecX step = hd.ldlt().solve(-g);
      const VecX cand = th + step;
      pb.residuals(cand, rtry);
      const double f2try = rtry.squaredNorm();
      if (f2try < f2) {
        th = cand;
        r = rtry;
        f2 = f2try;
        mu = std::max(mu * 0.3, 1e-15);
        accepted = true;
        break;
      }
      mu *= 3.5;
      if (mu > 1e18) break;
    }
    if (!accepted) break;
    if (max_abs_residual(r) < 1e-12) break;
  }
  return max_abs_residual(r);
}

TnCertificate assemble(const Problem& pb, const VecX& th) {
  TnCertificate cert;
  cert.p = Eigen::Map<const MatX>(th.data(), pb.m, pb.n);
  for (int i = 0; i < pb.big_n; ++i) {
    VecX a = th.segment(pb.off_a(i), pb.m);
    VecX b = th.segment(pb.off_b(i), pb.n);
    // gauge: balanced norms, leading entry of a positive
    const double na = a.norm(), nb = b.norm();
    if (na > 0.0 && nb > 0.0) {
      const double s = std::sqrt(nb / na);
      a *= s;
      b /= s;
    }
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      if (std::abs(a(k)) > 1e-14) {
        if (a(k) < 0.0) {
          a = -a;
          b = -b;
        }
        break;
      }
    }
    cert.a.push_back(a);
    cert.b.push_back(b);
    cert.kappa.push_back(pb.kappa(th, i));
  }
  return cert;
}

double data_diameter(const std::vector<MatX>& t) {
  double d = 0.0;
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j)
      d = std::max(d, (t[i] - t[j]).norm());
  return std::max(d, 1e-12);
}

VecX structured_start(const Problem& pb) {
  VecX th = VecX::Zero(pb.params());
  MatX centroid = MatX::Zero(pb.m, pb.n);
  for (const auto& m : pb.t) centroid += m;
  centroid /= static_cast<double>(pb.t.size());
  Eigen::Map<MatX>(th.data(), pb.m, pb.n) = centroid;
  for (int i = 0; i < pb.big_n; ++i) {
    const MatX d = 0.5 * (pb.t[(i + 1) % pb.big_n] - pb.t[i]);
    Eigen::JacobiSVD<MatX> svd(d, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double s0 = std::sqrt(std::max(svd.singularValues()(0), 1e-8));
    th.segment(pb.off_a(i), pb.m) = svd.matrixU().col(0) * s0;
    th.segment(pb.off_b(i), pb.n) = svd.matrixV().col(0) * s0;
    th(pb.off_s(i)) = 1.0;
  }
  return th;
}

VecX random_start(const Problem& pb, double diam, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  VecX th(pb.params());
  MatX centroid = MatX::Zero(pb.m, pb.n);
  for (const auto& m : pb.t) centroid += m;
  centroid /= static_cast<double>(pb.t.size());
  for (Eigen::Index k = 0; k < pb.mn; ++k)
    th(k) = centroid.data()[k] + 0.25 * diam * gauss(rng);
  const double sa = std::sqrt(0.5 * diam);
  for (int i = 0; i < pb.big_n; ++i) {
    for (Eigen::Index k = 0; k < pb.m; ++k) th(pb.off_a(i) + k) = sa * gauss(rng);
    for (Eigen::Index k = 0; k < pb.n; ++k) th(pb.off_b(i) + k) = sa * gauss(rng);
    th(pb.off_s(i)) = std::abs(gauss(rng)) + 0.25;
  }
  return th;
}

std::optional<Verdict> prefilter(const std::vector<MatX>& t, const Tolerance& tol) {
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j) {
      const int rk = numeric_rank(t[i] - t[j], tol);
      if (rk <= 1) {
        Verdict v;
        v.status = VerdictStatus::Invalid;
        v.reason = rk == 0 ? "duplicate matrices " + std::to_string(i) + "," + std::to_string(j)
                           : "rank-1 connected pair " + std::to_string(i) + "," + std::to_string(j);
        return v;
      }
    }
  std::vector<MatX> diffs;
  for (size_t i = 1; i < t.size(); ++i) diffs.push_back(t[i] - t[0]);
  if (span_dim(diffs, tol) < 2) {
    Verdict v;
    v.status = VerdictStatus::Invalid;
    v.reason = "degenerate: affine span has dimension <= 1";
    return v;
  }
  return std::nullopt;
}

}  // namespace

Verdict search_ordering(const std::vector<MatX>& t, const SearchOptions& opt) {
  const size_t n = t.size();
  if (n < 4) throw std::invalid_argument("search_ordering: N >= 4 required");
  if (n > 8) throw std::invalid_argument("search_ordering: N > 8 unsupported");
  const Eigen::Index rows = t[0].rows(), cols = t[0].cols();
  for (const auto& m : t)
    if (m.rows() != rows || m.cols() != cols)
      throw std::invalid_argument("search_ordering: inconsistent matrix shapes");

  if (auto bad = prefilter(t, opt.tol)) return *bad;

  Problem pb{t, rows, cols, rows * cols, static_cast<int>(n), opt.kappa_margin};
  const double diam = data_diameter(t);
  VerifyOptions vopt;
  vopt.tol = opt.tol;
  vopt.kappa_margin = opt.kappa_margin;

  Verdict out;
  out.status = VerdictStatus::NotFound;
  out.residual = std::numeric_limits<double>::infinity();
  for (int start = 0; start < std::max(1, opt.starts); ++start) {
    std::mt19937_64 rng(splitmix64(opt.seed + 0x517cc1b727220a95ULL * (start + 1)));
    VecX th = start == 0 ? structured_start(pb) : random_start(pb, diam, rng);
    const double resid = lm_run(pb, th, opt.iters);
    out.starts_used = start + 1;
    out.residual = std::min(out.residual, resid);
    if (resid < opt.tol.residual_tol) {
      TnCertificate cert = assemble(pb, th);
      const Verdict chk = verify(t, cert, vopt);
      if (chk.status == VerdictStatus::Valid) {
        out.status = VerdictStatus::Found;
        out.cert = std::move(cert);
        out.residual = chk.residual;
        return out;
      }
    }
  }
  return out;
}

namespace {

std::array<int, 4> rotate(const std::array<int, 4>& p, int k) {
  std::array<int, 4> q{};
  for (int i = 0; i < 4; ++i) q[i] = p[(i + k) % 4];
  return q;
}

std::array<int, 4> reversed(const std::array<int, 4>& p) {
  return {p[3], p[2], p[1], p[0]};
}

std::array<int, 4> cyclic_canon(const std::array<int, 4>& p) {
  std::array<int, 4> best = p;
  for (int k = 1; k < 4; ++k) best = std::min(best, rotate(p, k));
  return best;
}

std::array<int, 4> dihedral_canon(const std::array<int, 4>& p) {
  std::array<int, 4> best = cyclic_canon(p);
  best = std::min(best, cyclic_canon(reversed(p)));
  return best;
}

}  // namespace

std::vector<OrderingResult> search_all_orderings(const std::array<MatX, 4>& t,
                                                 const SearchOptions& opt) {
  std::vector<std::array<int, 4>> perms;
  std::array<int, 4> p{0, 1, 2, 3};
  do {
    perms.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));

  std::map<std::array<int, 4>, int> cyc_ids, dih_ids;
  std::vector<OrderingResult> out;
  out.reserve(perms.size());
  for (const auto& perm : perms) {
    OrderingResult res;
    res.ordering = perm;
    const auto cc = cyclic_canon(perm);
    const auto dc = dihedral_canon(perm);
    res.cyclic_orbit = cyc_ids.emplace(cc, static_cast<int>(cyc_ids.size())).first->second;
    res.dihedral_orbit = dih_ids.emplace(dc, static_cast<int>(dih_ids.size())).first->second;

    std::vector<MatX> ordered;
    for (int idx : perm) ordered.push_back(t[static_cast<size_t>(idx)]);
    SearchOptions o = opt;
    const std::uint64_t code = static_cast<std::uint64_t>(perm[0]) |
                               (static_cast<std::uint64_t>(perm[1]) << 2) |
                               (static_cast<std::uint64_t>(perm[2]) << 4) |
                               (static_cast<std::uint64_t>(perm[3]) << 6);
    o.seed = splitmix64(opt.seed ^ (code * 0x2545f4914f6cdd1dULL));
    res.verdict = search_ordering(ordered, o);
    out.push_back(std::move(res));
  }
  return out;
}

}  // namespace rank1lab
