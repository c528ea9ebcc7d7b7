// matspace.cpp
#include "rank1lab/matspace.hpp"

#include <Eigen/SVD>

namespace rank1lab {

double minor_of(const Mat32& m, int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3 || i == j)
    throw std::invalid_argument("minor_of: row indices must be distinct and in 1..3");
  const int a = i - 1, b = j - 1;
  return m(a, 0) * m(b, 1) - m(a, 1) * m(b, 0);
}

Vec3 minors_of(const Mat32& m) {
  return Vec3(minor_of(m, 1, 2), minor_of(m, 1, 3), minor_of(m, 2, 3));
}

namespace {

Eigen::VectorXd singular_values(const MatX& m) {
  // JacobiSVD is accurate for the small dense matrices used here.
  Eigen::JacobiSVD<MatX> svd(m);
  return svd.singularValues();
}

}  // namespace

int numeric_rank(const MatX& m, const Tolerance& tol) {
  if (m.size() == 0) return 0;
  const Eigen::VectorXd sv = singular_values(m);
  const double top = sv.size() ? sv(0) : 0.0;
  if (!(top > 0.0)) return 0;
  const double cut = tol.rank_tol * top;
  int r = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > cut) ++r;
  return r;
}

double rank_gap(const MatX& m, const Tolerance& tol) {
  if (m.size() == 0) return 1.0;
  const Eigen::VectorXd sv = singular_values(m);
  const double top = sv.size() ? sv(0) : 0.0;
  if (!(top > 0.0)) return 1.0;
  const double cut = tol.rank_tol * top;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (!(sv(k) > cut))
      return k == 0 ? 1.0 : sv(k) / sv(k - 1);
  }
  return 1.0;
}

bool is_rank1_connected(const MatX& a, const MatX& b, const Tolerance& tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("is_rank1_connected: shape mismatch");
  return numeric_rank(a - b, tol) == 1;
}

namespace {

template <typename M>
int span_dim_impl(const std::vector<M>& ms, const Tolerance& tol) {
  if (ms.empty()) throw std::invalid_argument("span_dim: empty list");
  const Eigen::Index n = ms.front().size();
  MatX flat(static_cast<Eigen::Index>(ms.size()), n);
  for (size_t k = 0; k < ms.size(); ++k) {
    if (ms[k].size() != n)
      throw std::invalid_argument("span_dim: mixed shapes");
    flat.row(static_cast<Eigen::Index>(k)) =
        Eigen::Map<const Eigen::VectorXd>(ms[k].data(), n).transpose();
  }
  return numeric_rank(flat, tol);
}

}  // namespace

int span_dim(const std::vector<Mat32>& ms, const Tolerance& tol) { return span_dim_impl(ms, tol); }
int span_dim(const std::vector<Mat22>& ms, const Tolerance& tol) { return span_dim_impl(ms, tol); }
int span_dim(const std::vector<MatX>& ms, const Tolerance& tol) { return span_dim_impl(ms, tol); }

}  // namespace rank1lab
