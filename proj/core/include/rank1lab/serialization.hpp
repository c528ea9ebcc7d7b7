// serialization.hpp
// JSON wire formats: matrices as nested row arrays, certificates as
// {"P":..,"C":[{"a":..,"b":..}],"kappa":..}, quadruples as [u,v] pairs,
// plus report serializers for the CLI.
#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rank1lab/k1analysis.hpp"
#include "rank1lab/tn.hpp"

namespace rank1lab {

using ordered_json = nlohmann::ordered_json;

ordered_json matrix_to_json(const MatX& m);
MatX matrix_from_json(const nlohmann::json& j);

std::vector<MatX> matrices_from_json(const nlohmann::json& j);
Quadruple quadruple_from_json(const nlohmann::json& j);

ordered_json certificate_to_json(const TnCertificate& c);
TnCertificate certificate_from_json(const nlohmann::json& j);

ordered_json verdict_to_json(const Verdict& v);
ordered_json cert_report_to_json(const CertReport& r);
ordered_json connection_to_json(const Rank1Connection& c);
ordered_json det_sign_to_json(const DetSignReport& r);

std::string hull_to_csv(const HullApprox& h);

// Debug dumps of the reduction matrices.
std::string s_matrix_csv(const SMatrix& s);
std::string a_matrices_csv(const AMatrices& a);

}  // namespace rank1lab
