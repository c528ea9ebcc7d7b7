// commands.cpp
// Subcommands: find-rank1, certify, search-t4, hull, scan-lemmas.
#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rank1lab/k1analysis.hpp"
#include "rank1lab/parallel.hpp"
#include "rank1lab/serialization.hpp"
#include "rank1lab/tn.hpp"

namespace rank1lab::cli {

namespace {

using nlohmann::json;

// Deterministic uniform stream, independent of the standard library's
// distribution implementations.
struct Rng {
  std::uint64_t state;

  explicit Rng(std::uint64_t seed) : state(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t x = (state += 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
};

struct OutputSink {
  std::string path;
  std::ostream& fallback;

  void write(const std::string& text) const {
    if (path.empty()) {
      fallback << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + path);
    f << text;
  }
};

void emit_json(const OutputSink& sink, const ordered_json& j, bool pretty) {
  if (!pretty) {
    sink.write(j.dump(2) + "\n");
    return;
  }
  // --pretty is a rendering of the same structure
  std::ostringstream os;
  os << j.dump(2) << "\n";
  sink.write(os.str());
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open file: " + path);
  json j;
  f >> j;
  return j;
}

Quadruple sample_quadruple(Rng& rng, double vlo, double vhi) {
  const double pad = 1e-9 * (vhi - vlo);
  Quadruple q;
  for (int i = 0; i < 4; ++i) {
    double v = 0.0;
    for (int tries = 0; tries < 64; ++tries) {
      v = rng.uniform(vlo + pad, vhi - pad);
      bool distinct = true;
      for (int j = 0; j < i; ++j)
        if (std::abs(q.pts[static_cast<size_t>(j)].v - v) < 1e-9 * (vhi - vlo)) distinct = false;
      if (distinct) break;
    }
    q.pts[static_cast<size_t>(i)] = {rng.uniform(-2.0, 2.0), v};
  }
  return q;
}

const char* outcome_key(CertOutcome o) {
  switch (o) {
    case CertOutcome::Degenerate: return "degenerate";
    case CertOutcome::NoT4: return "no_t4";
    case CertOutcome::Rank1Present: return "rank1_present";
    case CertOutcome::Inconclusive: return "inconclusive";
  }
  return "?";
}

// 𝔞_m(v) = -𝔞(-v): flips concavity, keeps monotonicity; lets the convex-case
// lambda lemmas run unchanged on concave inputs.
class MirrorFn final : public ConstitutiveFn {
 public:
  explicit MirrorFn(FnPtr inner)
      : ConstitutiveFn("mirror(" + inner->name() + ")",
                       Interval{-inner->domain().hi, -inner->domain().lo}),
        inner_(std::move(inner)) {}

 protected:
  double a(double v) const override { return -inner_->eval(-v); }
  double a1(double v) const override { return inner_->d1(-v); }
  double a2(double v) const override { return -inner_->d2(-v); }
  double F(double v) const override { return inner_->potential(-v); }

 private:
  FnPtr inner_;
};

int cmd_find_rank1(const std::string& fnspec, std::pair<double, double> interval, int grid,
                   const OutputSink& sink, bool pretty) {
  const FnPtr f = fn_from_spec_string(fnspec);
  FindRank1Options opt;
  opt.grid = grid;
  const Rank1Search res = find_rank1(f, interval.first, interval.second, opt);

  ordered_json j;
  j["command"] = "find-rank1";
  j["fn"] = f->name();
  j["interval"] = {interval.first, interval.second};
  ordered_json conns = ordered_json::array();
  for (const auto& c : res.connections) conns.push_back(connection_to_json(c));
  j["connections"] = std::move(conns);
  j["certified"] = res.certified_empty;
  j["basis"] = res.basis;
  ordered_json infl = ordered_json::array();
  for (const auto& [a, b] : res.inflections) infl.push_back({a, b});
  j["inflections"] = std::move(infl);
  emit_json(sink, j, pretty);
  return 0;
}

int cmd_certify(const std::string& fnspec, const std::string& quadfile, int sample,
                std::uint64_t seed, std::pair<double, double> interval,
                const Tolerance& tol, const OutputSink& sink, bool pretty) {
  const FnPtr f = fn_from_spec_string(fnspec);
  std::vector<Quadruple> quads;
  if (!quadfile.empty()) {
    const json data = read_json_file(quadfile);
    if (data.is_array() && !data.empty() && data[0].is_array() && !data[0].empty() &&
        data[0][0].is_array()) {
      for (const auto& q : data) quads.push_back(quadruple_from_json(q));
    } else {
      quads.push_back(quadruple_from_json(data));
    }
  } else {
    Rng rng(seed);
    for (int i = 0; i < sample; ++i)
      quads.push_back(sample_quadruple(rng, interval.first, interval.second));
  }

  CertOptions copt;
  copt.tol = tol;
  std::vector<ordered_json> reports(quads.size());
  std::map<std::string, int> counts, lemmas;
  parallel_for(quads.size(), [&](std::size_t i) {
    ordered_json rj;
    rj["index"] = static_cast<int>(i);
    ordered_json pts = ordered_json::array();
    for (const auto& p : quads[i].pts) pts.push_back({p.u, p.v});
    rj["quadruple"] = std::move(pts);
    try {
      const CertReport cr = certify_no_t4(f, quads[i], copt);
      rj.update(cert_report_to_json(cr));
    } catch (const DomainError& e) {
      rj["outcome"] = "error";
      rj["reason"] = e.what();
    }
    reports[i] = std::move(rj);
  });
  for (const auto& r : reports) {
    counts[r.at("outcome").get<std::string>()]++;
    if (r.contains("lemma")) lemmas[r.at("lemma").get<std::string>()]++;
  }

  ordered_json j;
  j["command"] = "certify";
  j["fn"] = f->name();
  j["reports"] = reports;
  ordered_json summary;
  summary["total"] = static_cast<int>(quads.size());
  for (const auto& [k, v] : counts) summary[k] = v;
  summary["lemmas"] = lemmas;
  j["summary"] = std::move(summary);
  emit_json(sink, j, pretty);
  return 0;
}

int cmd_search_t4(const std::string& matfile, const std::string& orderings, int starts,
                  std::uint64_t seed, const Tolerance& tol, const OutputSink& sink,
                  bool pretty) {
  const auto mats = matrices_from_json(read_json_file(matfile));
  if (mats.size() < 4) throw CLI::ValidationError("search-t4", "need at least 4 matrices");
  SearchOptions opt;
  opt.starts = starts;
  opt.seed = seed;
  opt.tol = tol;

  ordered_json j;
  j["command"] = "search-t4";
  j["n"] = static_cast<int>(mats.size());
  j["orderings"] = orderings;

  if (orderings == "given" || mats.size() != 4) {
    const Verdict v = search_ordering(mats, opt);
    j["result"] = verdict_to_json(v);
    j["found_count"] = v.status == VerdictStatus::Found ? 1 : 0;
    emit_json(sink, j, pretty);
    return 0;
  }

  std::array<MatX, 4> t{mats[0], mats[1], mats[2], mats[3]};
  const auto results = search_all_orderings(t, opt);
  ordered_json rs = ordered_json::array();
  int found = 0;
  std::map<int, std::pair<int, bool>> dihedral;  // orbit -> (size, any found)
  for (const auto& r : results) {
    ordered_json e;
    e["ordering"] = r.ordering;
    e["cyclic_orbit"] = r.cyclic_orbit;
    e["dihedral_orbit"] = r.dihedral_orbit;
    e.update(verdict_to_json(r.verdict));
    rs.push_back(std::move(e));
    auto& d = dihedral[r.dihedral_orbit];
    d.first++;
    if (r.verdict.status == VerdictStatus::Found) {
      d.second = true;
      ++found;
    }
  }
  j["results"] = std::move(rs);
  ordered_json orbits = ordered_json::array();
  for (const auto& [orbit, info] : dihedral) {
    ordered_json e;
    e["dihedral_orbit"] = orbit;
    e["orderings"] = info.first;
    e["found"] = info.second;
    orbits.push_back(std::move(e));
  }
  j["dihedral_orbits"] = std::move(orbits);
  j["found_count"] = found;
  emit_json(sink, j, pretty);
  return 0;
}

int cmd_hull(const std::string& matfile, double eps, int max_gen, std::uint64_t seed,
             const Tolerance& tol, const OutputSink& sink) {
  const auto mats = matrices_from_json(read_json_file(matfile));
  HullOptions opt;
  opt.eps = eps;
  opt.max_gen = max_gen;
  opt.seed = seed;
  opt.tol = tol;
  const HullApprox hull = lamination_hull(mats, opt);
  std::string csv = hull_to_csv(hull);
  if (!hull.complete) csv = "# partial=true budget exceeded\n" + csv;
  sink.write(csv);
  return 0;
}

int cmd_scan_lemmas(const std::string& fnspec, std::pair<double, double> interval, int grid,
                    std::uint64_t seed, const OutputSink& sink, bool pretty) {
  const FnPtr f = fn_from_spec_string(fnspec);
  const double lo = interval.first, hi = interval.second;
  if (!f->domain().contains(Interval{lo, hi}))
    throw DomainError("scan-lemmas: interval outside the function domain");

  const ConvexityClass cls = classify_convexity(*f, lo, hi, std::max(3, grid));
  const bool expect_concave = cls == ConvexityClass::StrictlyConcave;

  ordered_json j;
  j["command"] = "scan-lemmas";
  j["fn"] = f->name();
  j["interval"] = {lo, hi};
  j["grid"] = grid;
  j["convexity"] = cls == ConvexityClass::StrictlyConvex    ? "strictly_convex"
                   : cls == ConvexityClass::StrictlyConcave ? "strictly_concave"
                   : cls == ConvexityClass::SignChanging    ? "sign_changing"
                                                            : "flat";

  // l18: sign of g_v(r) over a (v,r) grid
  int checked = 0, violations = 0;
  double bad_vlo = 0, bad_vhi = 0, bad_rlo = 0, bad_rhi = 0;
  const int side = std::max(3, static_cast<int>(std::lround(std::sqrt(grid))));
  for (int a = 0; a < side; ++a) {
    const double v = lo + (hi - lo) * (a + 0.5) / side;
    for (int b = 0; b < side; ++b) {
      const double vr = lo + (hi - lo) * (b + 0.5) / side;
      const double r = vr - v;
      if (r == 0.0) continue;
      ++checked;
      const double g = g_eval(*f, v, r);
      const bool ok = expect_concave ? (r < 0.0 ? g < 0.0 : g > 0.0)
                                     : (r < 0.0 ? g > 0.0 : g < 0.0);
      if (!ok) {
        if (violations == 0) {
          bad_vlo = bad_vhi = v;
          bad_rlo = bad_rhi = r;
        }
        bad_vlo = std::min(bad_vlo, v);
        bad_vhi = std::max(bad_vhi, v);
        bad_rlo = std::min(bad_rlo, r);
        bad_rhi = std::max(bad_rhi, r);
        ++violations;
      }
    }
  }
  ordered_json l18;
  l18["checked"] = checked;
  l18["violations"] = violations;
  l18["expected_signs"] = expect_concave ? "concave" : "convex";
  if (violations > 0)
    l18["violating_region"] = {{"v", {bad_vlo, bad_vhi}}, {"r", {bad_rlo, bad_rhi}}};
  j["l18"] = std::move(l18);

  // l20/l21/l22 on random lambda draws; concave inputs run through the
  // mirror function so the convex statements apply verbatim
  FnPtr g = expect_concave ? std::make_shared<MirrorFn>(f) : f;
  const double glo = expect_concave ? -hi : lo, ghi = expect_concave ? -lo : hi;
  Rng rng(seed);
  int draws = 0, root_violations = 0, max_below = 0;
  std::vector<LambdaSystem> systems;
  const int ndraws = 200;
  for (int k = 0; k < ndraws; ++k) {
    const double vk = rng.uniform(glo + 0.25 * (ghi - glo), ghi - 0.25 * (ghi - glo));
    const double l1 = (k % 2 == 0 ? 1.0 : -1.0) * rng.uniform(0.05, 3.0);
    const double l2 = (rng.uniform01() < 0.5 ? 1.0 : -1.0) * rng.uniform(0.05, 2.0);
    try {
      const LambdaSystem sys = lambda_solve(*g, vk, l1, l2, glo - vk, ghi - vk, 2048);
      ++draws;
      max_below = std::max(max_below, sys.count_below);
      if (sys.count_below > 2) ++root_violations;
      systems.push_back(sys);
    } catch (const DomainError&) {
      continue;
    }
  }
  const StructureReport sr = structure_checks(*g, systems);
  j["l20"] = {{"draws", draws}, {"max_roots_below", max_below}, {"violations", root_violations}};
  j["l21"] = {{"checked", sr.checked_l21}};
  j["l22"] = {{"checked", sr.checked_l22}};
  ordered_json viol = ordered_json::array();
  for (const auto& v : sr.violations) viol.push_back({{"lemma", v.lemma}, {"detail", v.detail}});
  j["structure_violations"] = std::move(viol);

  const bool pass = violations == 0 && root_violations == 0 && sr.violations.empty();
  j["pass"] = pass;
  emit_json(sink, j, pretty);
  return pass ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rank1lab: T_N configurations and rank-1 connections in K1"};
  app.require_subcommand(1);

  std::string fnspec, quadfile, matfile, outpath;
  std::vector<double> interval{-1.0, 1.0};
  int grid = 2048;
  int sample = 0;
  int starts = 64;
  int max_gen = 12;
  double eps = 0.05;
  std::uint64_t seed = 0;
  std::string orderings = "all";
  bool pretty = false;
  Tolerance tol;

  const auto add_common = [&](CLI::App* c) {
    c->add_option("--out", outpath, "write the result to a file instead of stdout");
    c->add_flag("--pretty", pretty, "pretty rendering of the same JSON structure");
    c->add_option("--tol-rank", tol.rank_tol, "relative singular-value threshold");
    c->add_option("--tol-resid", tol.residual_tol, "absolute residual threshold");
  };

  auto* c_find = app.add_subcommand("find-rank1", "search for rank-1 connections in K1 over an interval");
  c_find->add_option("--fn", fnspec, "builtin name or JSON function spec")->required();
  c_find->add_option("--interval", interval, "open interval lo hi")->expected(2);
  c_find->add_option("--grid", grid, "scan resolution");
  add_common(c_find);

  auto* c_cert = app.add_subcommand("certify", "run the no-T4 certification on quadruples");
  c_cert->add_option("--fn", fnspec, "builtin name or JSON function spec")->required();
  c_cert->add_option("--quadruple", quadfile, "JSON file with one quadruple or a list");
  c_cert->add_option("--sample", sample, "number of random quadruples");
  c_cert->add_option("--seed", seed, "sampling seed");
  c_cert->add_option("--interval", interval, "sampling interval for v")->expected(2);
  add_common(c_cert);

  auto* c_search = app.add_subcommand("search-t4", "search matrix lists for T4 certificates");
  c_search->add_option("--matrices", matfile, "JSON file with row-major matrices")->required();
  c_search->add_option("--orderings", orderings, "all | given")
      ->check(CLI::IsMember({"all", "given"}));
  c_search->add_option("--starts", starts, "multistart count");
  c_search->add_option("--seed", seed, "search seed");
  add_common(c_search);

  auto* c_hull = app.add_subcommand("hull", "lamination hull approximation, CSV output");
  c_hull->add_option("--matrices", matfile, "JSON file with row-major matrices")->required();
  c_hull->add_option("--eps", eps, "grid resolution")->required();
  c_hull->add_option("--max-gen", max_gen, "generation cap");
  c_hull->add_option("--seed", seed, "seed for the embedded searcher");
  add_common(c_hull);

  auto* c_scan = app.add_subcommand("scan-lemmas", "property scan of the structure lemmas");
  c_scan->add_option("--fn", fnspec, "builtin name or JSON function spec")->required();
  c_scan->add_option("--interval", interval, "open interval lo hi")->expected(2)->required();
  c_scan->add_option("--grid", grid, "grid size for the sign scan");
  c_scan->add_option("--seed", seed, "seed for the lambda draws");
  add_common(c_scan);

  std::vector<const char*> argv;
  argv.push_back("rank1lab");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (interval.size() != 2 || !(interval[0] < interval[1]))
      throw std::invalid_argument("interval must satisfy lo < hi");
    tol.validate();
    const OutputSink sink{outpath, out};
    const std::pair<double, double> iv{interval[0], interval[1]};
    if (c_find->parsed()) return cmd_find_rank1(fnspec, iv, grid, sink, pretty);
    if (c_cert->parsed()) {
      if (quadfile.empty() && sample <= 0)
        throw std::invalid_argument("certify: provide --quadruple or --sample");
      return cmd_certify(fnspec, quadfile, sample, seed, iv, tol, sink, pretty);
    }
    if (c_search->parsed()) return cmd_search_t4(matfile, orderings, starts, seed, tol, sink, pretty);
    if (c_hull->parsed()) return cmd_hull(matfile, eps, max_gen, seed, tol, sink);
    if (c_scan->parsed()) return cmd_scan_lemmas(fnspec, iv, grid, seed, sink, pretty);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace rank1lab::cli
