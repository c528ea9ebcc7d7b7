// tn_hull.cpp
#include <algorithm>
#include <cmath>
#include <map>

#include "rank1lab/tn.hpp"

namespace rank1lab {

namespace {

// ||wedge^2 D|| = sigma1*sigma2 for rank <= 2; cheap rank-1 proximity test.
double wedge_norm(const MatX& d) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.rows(); ++i)
    for (Eigen::Index j = i + 1; j < d.rows(); ++j)
      for (Eigen::Index k = 0; k < d.cols(); ++k)
        for (Eigen::Index l = k + 1; l < d.cols(); ++l) {
          const double m = d(i, k) * d(j, l) - d(i, l) * d(j, k);
          s += m * m;
        }
  return std::sqrt(s);
}

using Key = std::array<std::int64_t, 6>;

struct Frame {
  MatX base;
  MatX basis;  // (mn) x d, orthonormal columns
  int d = 0;

  VecX coords(const MatX& m) const {
    const VecX v = Eigen::Map<const VecX>(m.data(), m.size()) -
                   Eigen::Map<const VecX>(base.data(), base.size());
    return basis.transpose() * v;
  }
  double off_span(const MatX& m) const {
    const VecX v = Eigen::Map<const VecX>(m.data(), m.size()) -
                   Eigen::Map<const VecX>(base.data(), base.size());
    return (v - basis * (basis.transpose() * v)).norm();
  }
};

Key key_of(const VecX& x, double eps) {
  Key k{};
  for (Eigen::Index i = 0; i < x.size(); ++i)
    k[static_cast<size_t>(i)] = static_cast<std::int64_t>(std::llround(x(i) / eps));
  return k;
}

struct Members {
  std::vector<MatX> pts;
  std::vector<VecX> xs;
  std::vector<int> gen;
  std::map<Key, int> index;

  bool add(const MatX& m, const VecX& x, double eps, int g) {
    const Key k = key_of(x, eps);
    if (index.count(k)) return false;
    index.emplace(k, static_cast<int>(pts.size()));
    pts.push_back(m);
    xs.push_back(x);
    gen.push_back(g);
    return true;
  }
};

}  // namespace

HullApprox lamination_hull(const std::vector<MatX>& t, const HullOptions& opt) {
  if (t.empty()) throw std::invalid_argument("lamination_hull: empty input");
  if (!(opt.eps > 0.0)) throw std::invalid_argument("lamination_hull: eps > 0 required");
  const Eigen::Index rows = t[0].rows(), cols = t[0].cols();
  for (const auto& m : t)
    if (m.rows() != rows || m.cols() != cols)
      throw std::invalid_argument("lamination_hull: inconsistent matrix shapes");

  HullApprox out;
  if (t.size() == 1) {
    out.points = t;
    out.generation = {0};
    return out;
  }

  // Affine frame of the input, by Gram-Schmidt over the diffs in input
  // order. Re-running the hull on its own output reproduces this frame
  // exactly, because the original inputs lead the output list.
  Frame fr;
  fr.base = t[0];
  {
    std::vector<VecX> basis;
    for (size_t i = 1; i < t.size(); ++i) {
      const MatX d = t[i] - t[0];
      VecX v = Eigen::Map<const VecX>(d.data(), d.size());
      const double n0 = v.norm();
      if (!(n0 > 0.0)) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& b : basis) v -= b * b.dot(v);
      if (v.norm() > 1e-9 * n0) basis.push_back(v.normalized());
      if (basis.size() == static_cast<size_t>(rows * cols)) break;
    }
    fr.d = static_cast<int>(basis.size());
    fr.basis.resize(rows * cols, fr.d);
    for (int k = 0; k < fr.d; ++k) fr.basis.col(k) = basis[static_cast<size_t>(k)];
  }
  if (fr.d == 0) {  // all points identical
    out.points = {t[0]};
    out.generation = {0};
    return out;
  }

  Members mem;
  for (const auto& m : t) mem.add(m, fr.coords(m), opt.eps, 0);

  const double rank1_rel = std::max(opt.tol.rank_tol, 1e-9);
  const auto connected = [&](const MatX& a, const MatX& b) {
    const MatX d = a - b;
    const double f2 = d.squaredNorm();
    if (!(f2 > 0.0)) return false;
    return wedge_norm(d) <= rank1_rel * f2;
  };

  int gen = 0;
  bool budget_ok = true;
  const auto closure = [&]() {
    size_t frontier_begin = 0;
    size_t frontier_end = mem.pts.size();
    while (frontier_begin < frontier_end && gen < opt.max_gen && budget_ok) {
      ++gen;
      const size_t known = mem.pts.size();
      for (size_t i = frontier_begin; i < frontier_end && budget_ok; ++i) {
        for (size_t j = 0; j < known && budget_ok; ++j) {
          if (j == i) continue;
          if (j > i && j >= frontier_begin) continue;  // pair seen from j's side
          if (!connected(mem.pts[i], mem.pts[j])) continue;
          const VecX xa = mem.xs[i], xb = mem.xs[j];
          const int steps =
              std::max(1, static_cast<int>(std::ceil((xb - xa).norm() / (0.5 * opt.eps))));
          for (int s = 1; s < steps; ++s) {
            const double tt = static_cast<double>(s) / steps;
            const MatX z = mem.pts[i] + tt * (mem.pts[j] - mem.pts[i]);
            mem.add(z, xa + tt * (xb - xa), opt.eps, gen);
            if (mem.pts.size() > opt.max_points) {
              budget_ok = false;
              break;
            }
          }
        }
      }
      frontier_begin = frontier_end;
      frontier_end = mem.pts.size();
    }
  };

  closure();

  // Certified T_N staircases among the input points: their barycentric
  // P_i = P + C_1 + ... + C_{i-1} chain lies in the rank-1 convex hull.
  if (opt.staircase_augment && t.size() >= 4 && t.size() <= 8 && budget_ok) {
    std::vector<size_t> idx(t.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<std::array<size_t, 4>> subsets;
    for (size_t a = 0; a < t.size(); ++a)
      for (size_t b = a + 1; b < t.size(); ++b)
        for (size_t c = b + 1; c < t.size(); ++c)
          for (size_t d = c + 1; d < t.size(); ++d) subsets.push_back({a, b, c, d});

    const int stair_gen = gen + 1;
    bool added = false;
    for (const auto& sub : subsets) {
      // one representative per cyclic orbit: first element pinned
      std::array<size_t, 3> rest{sub[1], sub[2], sub[3]};
      std::sort(rest.begin(), rest.end());
      do {
        std::vector<MatX> ordered{t[sub[0]], t[rest[0]], t[rest[1]], t[rest[2]]};
        SearchOptions so;
        so.starts = 24;
        so.iters = 120;
        so.tol = opt.tol;
        so.seed = opt.seed ^ (0x9e3779b97f4a7c15ULL * (sub[0] + 3 * rest[0] + 17 * rest[1] + 101 * rest[2]));
        const Verdict v = search_ordering(ordered, so);
        if (v.status != VerdictStatus::Found) continue;
        MatX p = v.cert->p;
        for (size_t i = 0; i < v.cert->size(); ++i) {
          if (fr.off_span(p) < 1e-6 * std::max(1.0, p.norm())) {
            added |= mem.add(p, fr.coords(p), opt.eps, stair_gen);
          }
          p += v.cert->c(i);
        }
      } while (std::next_permutation(rest.begin(), rest.end()));
    }
    if (added) {
      gen = stair_gen;
      // rewind the frontier so the new staircase points combine with everything
      closure();
    }
  }

  out.points = mem.pts;
  out.generation = mem.gen;
  out.generations = gen;
  out.complete = budget_ok;
  return out;
}

}  // namespace rank1lab
