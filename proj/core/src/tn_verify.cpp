// tn_verify.cpp
#include <cmath>
#include <sstream>

#include "rank1lab/tn.hpp"

namespace rank1lab {

namespace {

Verdict invalid(std::string reason) {
  Verdict v;
  v.status = VerdictStatus::Invalid;
  v.reason = std::move(reason);
  return v;
}

}  // namespace

Verdict verify(const std::vector<MatX>& t, const TnCertificate& cert,
               const VerifyOptions& opt) {
  const size_t n = t.size();
  if (n < 4) throw std::invalid_argument("verify: N >= 4 required");
  const Eigen::Index rows = t[0].rows(), cols = t[0].cols();
  for (const auto& m : t)
    if (m.rows() != rows || m.cols() != cols)
      throw std::invalid_argument("verify: inconsistent matrix shapes");
  if (cert.size() != n || cert.a.size() != n || cert.b.size() != n)
    throw std::invalid_argument("verify: certificate size mismatch");
  if (cert.p.rows() != rows || cert.p.cols() != cols)
    throw std::invalid_argument("verify: certificate P shape mismatch");

  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      const int rk = numeric_rank(t[i] - t[j], opt.tol);
      if (rk == 0) return invalid("duplicate matrices " + std::to_string(i) + "," + std::to_string(j));
      if (rk == 1) return invalid("rank-1 connected pair " + std::to_string(i) + "," + std::to_string(j));
    }

  for (size_t i = 0; i < n; ++i) {
    if (!(cert.a[i].norm() * cert.b[i].norm() > 0.0))
      return invalid("factor " + std::to_string(i) + " is zero");
    if (numeric_rank(cert.c(i), opt.tol) != 1)
      return invalid("C_" + std::to_string(i) + " is not numerically rank one");
    if (!(cert.kappa[i] >= 1.0 + opt.kappa_margin * (1.0 - 1e-9)))
      return invalid("kappa_" + std::to_string(i) + " below 1 + margin");
  }

  double resid = 0.0;
  MatX acc = cert.p;
  for (size_t i = 0; i < n; ++i) {
    const MatX ci = cert.c(i);
    resid = std::max(resid, (acc + cert.kappa[i] * ci - t[i]).cwiseAbs().maxCoeff());
    acc += ci;
  }
  resid = std::max(resid, (acc - cert.p).cwiseAbs().maxCoeff());  // sum C_i = 0
  if (!(resid < opt.tol.residual_tol)) {
    std::ostringstream os;
    os << "equation residual " << resid << " exceeds " << opt.tol.residual_tol;
    return invalid(os.str());
  }

  std::vector<MatX> diffs;
  for (size_t i = 1; i < n; ++i) diffs.push_back(t[i] - t[0]);
  if (span_dim(diffs, opt.tol) < 2)
    return invalid("degenerate: affine span has dimension <= 1");

  Verdict v;
  v.status = VerdictStatus::Valid;
  v.residual = resid;
  return v;
}

DetSignReport det_sign_filter(const std::vector<Mat22>& t, double margin) {
  const size_t n = t.size();
  if (n < 4) throw std::invalid_argument("det_sign_filter: N >= 4 required");
  DetSignReport rep;
  rep.det_table = MatX::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  double scale = 0.0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = (t[i] - t[j]).determinant();
      rep.det_table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d;
      scale = std::max(scale, std::abs(d));
    }
  const double m = margin > 0.0 ? margin : 1e-12 * scale;
  rep.row_sign.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    bool pos = false, neg = false, zero = false;
    for (size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = rep.det_table(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (d > m) pos = true;
      else if (d < -m) neg = true;
      else zero = true;
    }
    if (zero) rep.has_rank1_pair = true;
    if (pos && !neg && !zero) rep.row_sign[i] = 1;
    if (neg && !pos && !zero) rep.row_sign[i] = -1;
    if (rep.row_sign[i] != 0) rep.fails_at.push_back(static_cast<int>(i));
  }
  rep.pass = rep.fails_at.empty();
  return rep;
}

}  // namespace rank1lab
