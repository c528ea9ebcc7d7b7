// cli_test.cpp
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = rank1lab::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempFile {
  std::string path;

  TempFile(const std::string& name, const std::string& content)
      : path("cli_test_" + name) {
    std::ofstream f(path, std::ios::binary);
    f << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

const char* kTartarJson =
    "[[[-1,0],[0,-3]],[[-3,0],[0,1]],[[1,0],[0,3]],[[3,0],[0,-1]]]";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"find-rank1", "--fn", "exp", "--interval", "1", "-1"}).code == 2);
  CHECK(run({"find-rank1"}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"find-rank1", "--fn", "not_a_builtin", "--interval", "-1", "1"}).code == 2);
  TempFile three("three.json", "[[[0,0],[0,0]],[[1,0],[0,2]],[[3,0],[0,1]]]");
  CHECK(run({"search-t4", "--matrices", three.path}).code == 2);
}

TEST_CASE("find-rank1 reports certified emptiness for exp") {
  const RunResult r = run({"find-rank1", "--fn", "exp", "--interval", "-1", "1"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("connections").empty());
  CHECK(j.at("certified").get<bool>());
}

TEST_CASE("find-rank1 on the cubic finds the symmetry family") {
  const RunResult r = run({"find-rank1", "--fn", "cubic_plus_linear", "--interval", "-2", "2"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE_FALSE(j.at("connections").empty());
  for (const auto& c : j.at("connections"))
    CHECK(std::abs(c.at("v").get<double>() + 0.5 * c.at("r").get<double>()) < 1e-6);
}

TEST_CASE("byte-identical output for identical config and seed") {
  const std::vector<std::string> args{"certify", "--fn",   "exp", "--sample",
                                      "25",      "--seed", "7"};
  const RunResult a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("certify accepts a quadruple file and flags duplicates") {
  TempFile quad("dup.json", "[[0.1,0.2],[0.1,0.2],[1.0,0.5],[-1.0,-0.5]]");
  const RunResult r = run({"certify", "--fn", "exp", "--quadruple", quad.path});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("reports")[0].at("outcome") == "degenerate");
}

TEST_CASE("certify flags hypothesis violations for the cubic") {
  TempFile quad("span.json", "[[0.0,-1.0],[0.5,-0.3],[1.0,0.4],[-0.5,1.0]]");
  const RunResult r = run({"certify", "--fn", "cubic_plus_linear", "--quadruple", quad.path});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("reports")[0].at("outcome") == "inconclusive");
}

TEST_CASE("search-t4 on the Tartar square") {
  TempFile mats("tartar.json", kTartarJson);
  const RunResult r =
      run({"search-t4", "--matrices", mats.path, "--starts", "32", "--seed", "3"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("found_count") == 4);
  int found_orbits = 0;
  for (const auto& o : j.at("dihedral_orbits"))
    if (o.at("found").get<bool>()) ++found_orbits;
  CHECK(found_orbits == 1);
}

TEST_CASE("search-t4 given-ordering mode") {
  TempFile mats("tartar2.json", kTartarJson);
  const RunResult r = run({"search-t4", "--matrices", mats.path, "--orderings", "given",
                           "--starts", "16", "--seed", "3"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("result").at("status") == "not_found");  // listed order is not a T4
}

TEST_CASE("hull emits CSV with a generation column") {
  TempFile mats("pair.json", "[[[0,0],[0,0]],[[0,0],[0,2]]]");
  const RunResult r = run({"hull", "--matrices", mats.path, "--eps", "0.1"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("generation,m11,m12,m21,m22", 0) == 0);
  size_t lines = 0;
  for (char c : r.out)
    if (c == '\n') ++lines;
  CHECK(lines >= 20);
}

TEST_CASE("certify sampling summary is clean for exp") {
  const RunResult r = run({"certify", "--fn", "exp", "--sample", "100", "--seed", "7"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  const auto& s = j.at("summary");
  const int no_t4 = s.value("no_t4", 0), degenerate = s.value("degenerate", 0);
  CHECK(no_t4 + degenerate == 100);
  CHECK(s.value("inconclusive", 0) == 0);
}

TEST_CASE("search-t4 finds nothing on a surface quadruple") {
  // four points of the exp surface, written as 3x2 matrices
  std::ostringstream os;
  os << "[";
  const double uv[4][2] = {{0.2, -0.5}, {-1.1, 0.3}, {0.9, 0.7}, {-0.4, -0.1}};
  for (int i = 0; i < 4; ++i) {
    const double u = uv[i][0], v = uv[i][1];
    const double a = std::exp(v), A = std::exp(v);
    if (i) os << ",";
    os << "[[" << u << "," << v << "],[" << a << "," << u << "],[" << u * a << ","
       << 0.5 * u * u + A << "]]";
  }
  os << "]";
  TempFile mats("surface.json", os.str());
  const RunResult r =
      run({"search-t4", "--matrices", mats.path, "--starts", "8", "--seed", "11"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("found_count") == 0);
}

TEST_CASE("scan-lemmas exit codes") {
  CHECK(run({"scan-lemmas", "--fn", "exp", "--interval", "-1", "1", "--grid", "400"}).code == 0);
  CHECK(run({"scan-lemmas", "--fn", "cubic_plus_linear", "--interval", "-2", "2", "--grid",
             "400"}).code == 1);
}
