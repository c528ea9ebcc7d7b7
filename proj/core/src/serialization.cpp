// serialization.cpp
#include "rank1lab/serialization.hpp"

#include <cinttypes>
#include <cstdio>

namespace rank1lab {

namespace {

// shortest round-trip decimal for byte-stable output
std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  double back = 0.0;
  std::sscanf(buf, "%lf", &back);
  if (back == x) {
    for (int prec = 1; prec < 17; ++prec) {
      char c[40];
      std::snprintf(c, sizeof c, "%.*g", prec, x);
      std::sscanf(c, "%lf", &back);
      if (back == x) return c;
    }
  }
  return buf;
}

}  // namespace

ordered_json matrix_to_json(const MatX& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatX matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("matrix: expected nested row arrays");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
  MatX m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<size_t>(i)].size()) != cols)
      throw std::invalid_argument("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(i, c) = j[static_cast<size_t>(i)][static_cast<size_t>(c)].get<double>();
  }
  return m;
}

std::vector<MatX> matrices_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrices: expected a JSON array");
  std::vector<MatX> out;
  for (const auto& e : j) out.push_back(matrix_from_json(e));
  return out;
}

Quadruple quadruple_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4)
    throw std::invalid_argument("quadruple: expected an array of four [u,v] pairs");
  Quadruple q;
  for (size_t i = 0; i < 4; ++i) {
    const auto& p = j[i];
    if (!p.is_array() || p.size() != 2)
      throw std::invalid_argument("quadruple: entries must be [u,v] pairs");
    q.pts[i] = {p[0].get<double>(), p[1].get<double>()};
  }
  return q;
}

ordered_json certificate_to_json(const TnCertificate& c) {
  ordered_json j;
  j["P"] = matrix_to_json(c.p);
  ordered_json cs = ordered_json::array();
  for (size_t i = 0; i < c.size(); ++i) {
    ordered_json f;
    f["a"] = std::vector<double>(c.a[i].data(), c.a[i].data() + c.a[i].size());
    f["b"] = std::vector<double>(c.b[i].data(), c.b[i].data() + c.b[i].size());
    cs.push_back(std::move(f));
  }
  j["C"] = std::move(cs);
  j["kappa"] = c.kappa;
  return j;
}

TnCertificate certificate_from_json(const nlohmann::json& j) {
  TnCertificate c;
  c.p = matrix_from_json(j.at("P"));
  for (const auto& f : j.at("C")) {
    const auto av = f.at("a").get<std::vector<double>>();
    const auto bv = f.at("b").get<std::vector<double>>();
    c.a.push_back(Eigen::Map<const VecX>(av.data(), static_cast<Eigen::Index>(av.size())));
    c.b.push_back(Eigen::Map<const VecX>(bv.data(), static_cast<Eigen::Index>(bv.size())));
  }
  c.kappa = j.at("kappa").get<std::vector<double>>();
  if (c.a.size() != c.kappa.size() || c.b.size() != c.kappa.size())
    throw std::invalid_argument("certificate: C and kappa lengths differ");
  return c;
}

namespace {

const char* status_name(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::Valid: return "valid";
    case VerdictStatus::Invalid: return "invalid";
    case VerdictStatus::Found: return "found";
    case VerdictStatus::NotFound: return "not_found";
  }
  return "?";
}

const char* outcome_name(CertOutcome o) {
  switch (o) {
    case CertOutcome::Degenerate: return "degenerate";
    case CertOutcome::NoT4: return "no_t4";
    case CertOutcome::Rank1Present: return "rank1_present";
    case CertOutcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace

ordered_json verdict_to_json(const Verdict& v) {
  ordered_json j;
  j["status"] = status_name(v.status);
  if (!v.reason.empty()) j["reason"] = v.reason;
  j["residual"] = v.residual;
  if (v.starts_used > 0) j["starts_used"] = v.starts_used;
  if (v.cert) j["certificate"] = certificate_to_json(*v.cert);
  return j;
}

ordered_json connection_to_json(const Rank1Connection& c) {
  ordered_json j;
  j["v"] = c.v;
  j["r"] = c.r;
  j["h"] = c.h;
  j["witness"] = {{c.witness0.u, c.witness0.v}, {c.witness1.u, c.witness1.v}};
  j["g_resid"] = c.g_resid;
  j["minor_resid"] = c.minor_resid;
  j["sv_ratio"] = c.sv_ratio;
  return j;
}

ordered_json det_sign_to_json(const DetSignReport& r) {
  ordered_json j;
  j["pass"] = r.pass;
  j["fails_at"] = r.fails_at;
  j["row_sign"] = r.row_sign;
  j["has_rank1_pair"] = r.has_rank1_pair;
  j["det_table"] = matrix_to_json(r.det_table);
  return j;
}

ordered_json cert_report_to_json(const CertReport& r) {
  ordered_json j;
  j["outcome"] = outcome_name(r.outcome);
  if (!r.lemma_path.empty()) j["lemma"] = r.lemma_path;
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (!r.margins.empty()) j["margins"] = r.margins;
  if (!r.bases.empty()) {
    ordered_json bases = ordered_json::array();
    for (const auto& b : r.bases) {
      ordered_json bj;
      bj["base"] = b.base;
      bj["branch"] = b.branch;
      bj["resolves"] = b.resolves;
      bj["dim"] = b.dim;
      if (b.dim == 3) {
        bj["rank_l"] = b.rank_l;
        bj["rank_r"] = b.rank_r;
        bj["rank_0"] = b.rank_0;
      }
      if (b.branch == "lambda" || b.branch == "L17" || b.branch == "L15") {
        bj["lambda1"] = b.lambda1;
        bj["lambda2"] = b.lambda2;
      }
      bj["fit_resid"] = b.fit_resid;
      if (!b.note.empty()) bj["note"] = b.note;
      if (b.s) bj["S"] = matrix_to_json(*b.s);
      if (b.a0) bj["A0"] = matrix_to_json(*b.a0);
      bases.push_back(std::move(bj));
    }
    j["bases"] = std::move(bases);
  }
  if (r.dsign) {
    j["d_matrix"] = matrix_to_json(r.dsign->d);
    j["d_symmetry_error"] = r.dsign->symmetry_error;
    j["d_row_sign"] = std::vector<int>(r.dsign->row_sign.begin(), r.dsign->row_sign.end());
  }
  if (r.connection) j["connection"] = connection_to_json(*r.connection);
  return j;
}

namespace {

std::string csv_block(const std::string& header, const MatX& m) {
  std::string out = header + "\n";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ",";
      out += fmt_double(m(i, j));
    }
    out += "\n";
  }
  return out;
}

}  // namespace

std::string s_matrix_csv(const SMatrix& s) {
  return csv_block("h,r,a(r),h a(r),h^2/2+F(r)", s.s);
}

std::string a_matrices_csv(const AMatrices& a) {
  return csv_block("Al", a.al) + csv_block("Ar", a.ar) + csv_block("A0", a.a0);
}

std::string hull_to_csv(const HullApprox& h) {
  std::string out;
  if (h.points.empty()) return out;
  const Eigen::Index rows = h.points[0].rows(), cols = h.points[0].cols();
  out += "generation";
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      out += ",m" + std::to_string(i + 1) + std::to_string(j + 1);
  out += "\n";
  for (size_t k = 0; k < h.points.size(); ++k) {
    out += std::to_string(h.generation[k]);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j)
        out += "," + fmt_double(h.points[k](i, j));
    out += "\n";
  }
  return out;
}

}  // namespace rank1lab
