// tn_test.cpp
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "rank1lab/serialization.hpp"
#include "rank1lab/tn.hpp"

using namespace rank1lab;

namespace {

MatX diag2(double a, double b) {
  Mat22 m;
  m << a, 0, 0, b;
  return m;
}

// Tartar square, labelled A1..A4.
const std::array<MatX, 4> kTartar{diag2(-1, -3), diag2(-3, 1), diag2(1, 3), diag2(3, -1)};

// The known certificate for the ordering (A1, A4, A3, A2).
std::vector<MatX> tartar_ordering() {
  return {kTartar[0], kTartar[3], kTartar[2], kTartar[1]};
}

TnCertificate tartar_certificate() {
  TnCertificate cert;
  cert.p = diag2(-1, 1);
  const auto push = [&](double a0, double a1, double b0, double b1) {
    VecX a(2), b(2);
    a << a0, a1;
    b << b0, b1;
    cert.a.push_back(a);
    cert.b.push_back(b);
    cert.kappa.push_back(2.0);
  };
  push(0, 1, 0, -2);  // diag(0, -2)
  push(1, 0, 2, 0);   // diag(2, 0)
  push(0, 1, 0, 2);   // diag(0, 2)
  push(1, 0, -2, 0);  // diag(-2, 0)
  return cert;
}

std::array<oracle::Point2, 4> tartar_points(const std::vector<MatX>& t) {
  std::array<oracle::Point2, 4> pts;
  for (size_t i = 0; i < 4; ++i) pts[i] = {t[i](0, 0), t[i](1, 1)};
  return pts;
}

}  // namespace

TEST_CASE("verify accepts the hand-built Tartar certificate") {
  const Verdict v = verify(tartar_ordering(), tartar_certificate());
  CHECK(v.status == VerdictStatus::Valid);
  CHECK(v.residual < 1e-12);
}

TEST_CASE("verify rejects kappa at the bound") {
  TnCertificate cert = tartar_certificate();
  cert.kappa[0] = 1.0;
  const Verdict v = verify(tartar_ordering(), cert);
  CHECK(v.status == VerdictStatus::Invalid);
  CHECK(v.reason.find("kappa") != std::string::npos);
}

TEST_CASE("verify rejects rank-1 connected inputs and degenerate spans") {
  // two matrices sharing a diagonal entry are rank-1 connected
  std::vector<MatX> bad{diag2(-1, -3), diag2(-1, 1), diag2(1, 3), diag2(3, -1)};
  CHECK(verify(bad, tartar_certificate()).status == VerdictStatus::Invalid);

  // collinear points: affine dimension 1
  std::vector<MatX> collinear{diag2(0, 0), diag2(1, 1), diag2(2, 2), diag2(3, 3)};
  const Verdict v = verify(collinear, tartar_certificate());
  CHECK(v.status == VerdictStatus::Invalid);

  CHECK_THROWS_AS(verify({diag2(0, 0), diag2(1, 2), diag2(2, 5)}, tartar_certificate()),
                  std::invalid_argument);
}

TEST_CASE("cyclic shift transports certificates") {
  // rotation by one: T' = (T2,T3,T4,T1) with P' = P + C1
  const auto t = tartar_ordering();
  const TnCertificate cert = tartar_certificate();
  std::vector<MatX> shifted{t[1], t[2], t[3], t[0]};
  TnCertificate scert;
  scert.p = cert.p + cert.c(0);
  for (size_t i = 1; i < 4; ++i) {
    scert.a.push_back(cert.a[i]);
    scert.b.push_back(cert.b[i]);
    scert.kappa.push_back(cert.kappa[i]);
  }
  scert.a.push_back(cert.a[0]);
  scert.b.push_back(cert.b[0]);
  scert.kappa.push_back(cert.kappa[0]);
  CHECK(verify(shifted, scert).status == VerdictStatus::Valid);
}

TEST_CASE("invertible row operations preserve T4 certificates") {
  oracle::Rng rng(73);
  const auto t = tartar_ordering();
  const TnCertificate cert = tartar_certificate();
  for (int trial = 0; trial < 20; ++trial) {
    Mat22 l;
    do {
      for (int i = 0; i < 4; ++i) l.data()[i] = rng.gauss();
    } while (std::abs(l.determinant()) < 0.1);
    std::vector<MatX> lt;
    for (const auto& m : t) lt.push_back(l * m);
    TnCertificate lcert = cert;
    lcert.p = l * cert.p;
    for (size_t i = 0; i < 4; ++i) lcert.a[i] = l * cert.a[i];
    CHECK(verify(lt, lcert).status == VerdictStatus::Valid);
  }
}

TEST_CASE("search_ordering finds the Tartar certificate") {
  SearchOptions opt;
  opt.seed = 2024;
  const Verdict v = search_ordering(tartar_ordering(), opt);
  REQUIRE(v.status == VerdictStatus::Found);
  for (double k : v.cert->kappa) CHECK(k == doctest::Approx(2.0).epsilon(1e-6));
  CHECK((v.cert->p - diag2(-1, 1)).cwiseAbs().maxCoeff() < 1e-6);
  // round trip
  CHECK(verify(tartar_ordering(), *v.cert).status == VerdictStatus::Valid);
}

TEST_CASE("search_ordering: the listed Tartar order has no certificate") {
  // oracle cross-check first
  const std::vector<MatX> listed{kTartar[0], kTartar[1], kTartar[2], kTartar[3]};
  CHECK_FALSE(oracle::diag_t4_solve(tartar_points(listed)).feasible);
  SearchOptions opt;
  opt.seed = 5;
  const Verdict v = search_ordering(listed, opt);
  CHECK(v.status == VerdictStatus::NotFound);
  CHECK(v.residual > 1e-3);
}

TEST_CASE("search_ordering filters invalid inputs") {
  std::vector<MatX> with_pair{diag2(-1, -3), diag2(-1, 1), diag2(1, 3), diag2(3, -1)};
  CHECK(search_ordering(with_pair).status == VerdictStatus::Invalid);
  std::vector<MatX> collinear{diag2(0, 0), diag2(1, 1), diag2(2, 2), diag2(3, 3)};
  CHECK(search_ordering(collinear).status == VerdictStatus::Invalid);
  CHECK_THROWS_AS(search_ordering({diag2(0, 0), diag2(1, 2), diag2(2, 5)}),
                  std::invalid_argument);
}

TEST_CASE("search_all_orderings agrees with the exact staircase oracle") {
  SearchOptions opt;
  opt.seed = 99;
  opt.starts = 32;
  const auto results = search_all_orderings(kTartar, opt);
  CHECK(results.size() == 24);

  const auto pts = tartar_points({kTartar[0], kTartar[1], kTartar[2], kTartar[3]});
  const auto valid = oracle::diag_t4_valid_orderings(pts);
  int found = 0;
  for (const auto& r : results) {
    const bool oracle_valid =
        std::find(valid.begin(), valid.end(), r.ordering) != valid.end();
    CHECK((r.verdict.status == VerdictStatus::Found) == oracle_valid);
    if (r.verdict.status == VerdictStatus::Found) ++found;
  }
  CHECK(found == static_cast<int>(valid.size()));
  CHECK(found == 4);  // one cyclic orbit

  // all found orderings share one dihedral orbit
  int dihedral = -1;
  for (const auto& r : results)
    if (r.verdict.status == VerdictStatus::Found) {
      if (dihedral < 0) dihedral = r.dihedral_orbit;
      CHECK(r.dihedral_orbit == dihedral);
    }
}

TEST_CASE("search_all_orderings: a set with a rank-1 pair is invalid everywhere") {
  std::array<MatX, 4> t{diag2(-1, -3), diag2(-1, 1), diag2(1, 3), diag2(3, -1)};
  SearchOptions opt;
  opt.starts = 2;
  for (const auto& r : search_all_orderings(t, opt))
    CHECK(r.verdict.status == VerdictStatus::Invalid);
}

TEST_CASE("det_sign_filter on the Tartar square passes every row") {
  std::vector<Mat22> t;
  for (const auto& m : kTartar) t.push_back(Mat22(m));
  const DetSignReport rep = det_sign_filter(t);
  CHECK(rep.pass);
  for (int s : rep.row_sign) CHECK(s == 0);
  CHECK_FALSE(rep.has_rank1_pair);
  CHECK_THROWS_AS(det_sign_filter({t[0], t[1], t[2]}), std::invalid_argument);
}

TEST_CASE("certificates survive a JSON round trip") {
  const TnCertificate cert = tartar_certificate();
  const auto j = certificate_to_json(cert);
  const TnCertificate back = certificate_from_json(nlohmann::json::parse(j.dump()));
  CHECK(verify(tartar_ordering(), back).status == VerdictStatus::Valid);
  CHECK((back.p - cert.p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("search_ordering accepts N = 5 inputs") {
  const std::vector<MatX> five{diag2(0, 0), diag2(1, 3), diag2(2, 1), diag2(3, 6),
                               diag2(5, 2)};
  SearchOptions opt;
  opt.starts = 4;
  opt.iters = 60;
  opt.seed = 21;
  const Verdict v = search_ordering(five, opt);
  CHECK((v.status == VerdictStatus::NotFound || v.status == VerdictStatus::Found));
  std::vector<MatX> nine(9, diag2(0, 0));
  CHECK_THROWS_AS(search_ordering(nine, opt), std::invalid_argument);
}

TEST_CASE("search_all_orderings smoke test on a random 3x2 four-tuple") {
  oracle::Rng rng(127);
  std::array<MatX, 4> t;
  for (auto& m : t) {
    m = MatX(3, 2);
    for (int i = 0; i < 6; ++i) m.data()[i] = rng.gauss();
  }
  SearchOptions opt;
  opt.starts = 2;
  opt.iters = 40;
  const auto results = search_all_orderings(t, opt);
  CHECK(results.size() == 24);  // report only; no ground truth asserted
}

TEST_CASE("det_sign_filter flags vanishing determinants") {
  Mat22 z = Mat22::Zero(), e;
  e << 1, 0, 0, 2;
  const DetSignReport rep = det_sign_filter({z, e, e, e});
  CHECK(rep.has_rank1_pair);  // duplicates produce zero determinants
}

TEST_CASE("det-sign failure implies no ordering can be found") {
  // random diagonal 4-sets: whenever some det row keeps a strict sign, the
  // exact staircase oracle must find no valid ordering, and the searcher must
  // agree on a spot-checked subset
  oracle::Rng rng(131);
  int filtered = 0, searched = 0;
  while (filtered < 20) {
    std::array<oracle::Point2, 4> pts;
    std::vector<Mat22> t22;
    std::array<MatX, 4> tx;
    for (int i = 0; i < 4; ++i) {
      pts[static_cast<size_t>(i)] = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
      Mat22 m;
      m << pts[static_cast<size_t>(i)].first, 0, 0, pts[static_cast<size_t>(i)].second;
      t22.push_back(m);
      tx[static_cast<size_t>(i)] = m;
    }
    const DetSignReport rep = det_sign_filter(t22);
    if (rep.pass || rep.has_rank1_pair) continue;
    ++filtered;
    CHECK(oracle::diag_t4_valid_orderings(pts).empty());
    if (searched < 3) {
      ++searched;
      SearchOptions opt;
      opt.starts = 4;
      opt.seed = 1000 + static_cast<std::uint64_t>(filtered);
      for (const auto& r : search_all_orderings(tx, opt))
        CHECK(r.verdict.status != VerdictStatus::Found);
    }
  }
}

TEST_CASE("3x3 row factors preserve embedded T4 certificates") {
  // embed the Tartar square into 3x2 matrices with a zero third row
  std::vector<MatX> t;
  for (const auto& m : tartar_ordering()) {
    MatX e = MatX::Zero(3, 2);
    e.topRows(2) = m;
    t.push_back(e);
  }
  SearchOptions opt;
  opt.seed = 17;
  const Verdict found = search_ordering(t, opt);
  REQUIRE(found.status == VerdictStatus::Found);

  oracle::Rng rng(137);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::Matrix3d l;
    do {
      for (int i = 0; i < 9; ++i) l.data()[i] = rng.gauss();
    } while (std::abs(l.determinant()) < 0.1);
    std::vector<MatX> lt;
    for (const auto& m : t) lt.push_back(l * m);
    TnCertificate lcert = *found.cert;
    lcert.p = l * found.cert->p;
    for (size_t i = 0; i < 4; ++i) lcert.a[i] = l * found.cert->a[i];
    VerifyOptions vopt;
    vopt.tol.residual_tol = 1e-7;  // the factor amplifies the search residual
    CHECK(verify(lt, lcert, vopt).status == VerdictStatus::Valid);
  }
}

TEST_CASE("lamination_hull: two non-connected points are a fixpoint") {
  const std::vector<MatX> two{diag2(-1, -3), diag2(-3, 1)};
  HullOptions opt;
  opt.eps = 0.05;
  const HullApprox h = lamination_hull(two, opt);
  CHECK(h.points.size() == 2);
  // idempotent
  const HullApprox h2 = lamination_hull(h.points, opt);
  CHECK(h2.points.size() == 2);
}

TEST_CASE("lamination_hull: a rank-1 pair fills its segment") {
  const std::vector<MatX> two{diag2(0, 0), diag2(0, 2)};
  HullOptions opt;
  opt.eps = 0.1;
  const HullApprox h = lamination_hull(two, opt);
  CHECK(h.points.size() >= 19);
  for (const auto& p : h.points) {
    CHECK(std::abs(p(0, 0)) < 1e-9);
    CHECK(p(1, 1) > -1e-9);
    CHECK(p(1, 1) < 2.0 + 1e-9);
    CHECK(std::abs(p(0, 1)) + std::abs(p(1, 0)) < 1e-9);
  }
}

TEST_CASE("lamination_hull: single point and budget flag") {
  const HullApprox one = lamination_hull({diag2(1, 2)});
  CHECK(one.points.size() == 1);
  CHECK(one.complete);

  HullOptions tiny;
  tiny.eps = 0.001;
  tiny.max_points = 50;
  tiny.staircase_augment = false;
  const HullApprox capped = lamination_hull({diag2(0, 0), diag2(0, 2)}, tiny);
  CHECK_FALSE(capped.complete);
}
