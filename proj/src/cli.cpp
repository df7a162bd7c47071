#include "conemin/cli.h"

#include "conemin/fixtures.h"
#include "conemin/minimal.h"
#include "conemin/radial.h"
#include "conemin/teich.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>

namespace conemin {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

void fail(const std::string& invariant, const std::string& message) {
  throw Error("cli", "run", invariant, message);
}

// Artifacts are recorded relative to the run directory.
class Output {
public:
  explicit Output(const std::string& dir) : dir_(dir) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) fail("writable output directory", "cannot create " + dir + ": " + ec.message());
  }
  std::string path(const std::string& name, const std::string& kind) {
    const fs::path p = dir_ / name;
    fs::create_directories(p.parent_path());
    artifacts_.push_back({{"path", name}, {"kind", kind}});
    return p.string();
  }
  void writeJson(const std::string& name, const std::string& kind, const json& j) {
    std::ofstream out(path(name, kind));
    out << j.dump(2) << '\n';
  }
  void writeManifest(const json& config, bool passed) {
    json m{{"config", config}, {"status", passed ? "pass" : "fail"}, {"artifacts", artifacts_}};
    std::ofstream out(dir_ / "manifest.json");
    out << m.dump(2) << '\n';
  }

private:
  fs::path dir_;
  json artifacts_ = json::array();
};

json check(const std::string& name, bool passed, double value, double bound, const std::string& relation) {
  return {{"name", name}, {"passed", passed}, {"value", value}, {"bound", bound}, {"relation", relation}};
}

bool allPassed(const json& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const json& c) { return c["passed"].get<bool>(); });
}

std::string levelName(const std::string& stem, int k, const std::string& ext) {
  return stem + "_L" + std::to_string(k) + ext;
}

json poleFitJson(const PoleFit& f) {
  return {{"slope", f.slope}, {"residual", f.residual}, {"zero_field", f.zeroField}, {"rings", f.rings}};
}

json complexJson(Complex z) { return json::array({z.real(), z.imag()}); }

// --- torus -----------------------------------------------------------------

struct TorusLevel {
  int n = 0;
  double h = 0.0;
  double spacing = 0.0; // side / n
  double maxHopfSum = 0.0;
  double gapRatio = 0.0;
  double angleSum = 0.0;
  Complex tau;
};

TorusLevel runTorusLevel(const RunConfig& cfg, int k, Complex start, Output& out, json& levelReport,
                         json& checks) {
  TorusLevel L;
  L.h = cfg.resolution() / std::pow(2.0, k);
  L.n = torusCellsForResolution(cfg.alpha, L.h);
  L.spacing = torusSideLength(cfg.alpha) / L.n;
  const ConeSurface g1 = buildConeTorusGrid(cfg.alpha, L.n), g2 = buildConeTorusGrid(cfg.alphaPrime, L.n, 0.75);
  const std::string t1 = levelName("surfaces/target1", k, ".json"), t2 = levelName("surfaces/target2", k, ".json");
  writeSurface(g1, out.path(t1, "surface"));
  writeSurface(g2, out.path(t2, "surface"));

  HarmonicOptions inner;
  inner.tolerance = cfg.innerTol;
  const double beta = std::min(cfg.alpha, cfg.alphaPrime);
  TeichProblem tp(TorusChart::forGrid(g1, beta), g1, g2, inner);
  DescentOptions opts;
  opts.tolerance = cfg.outerTol;
  const DescentResult r = tp.descend({start}, opts);
  L.tau = r.state.tau;
  writeDescentCsv(r.trace, out.path(levelName("descent", k, ".csv"), "descent_trace"));
  writeSurface(tp.chart().surface(L.tau), out.path(levelName("surfaces/domain", k, ".json"), "surface"));
  out.writeJson(levelName("state", k, ".json"), "checkpoint", r.state.toJson(t1));

  const HarmonicProblem& p1 = tp.problem1();
  const HarmonicProblem& p2 = tp.problem2();
  writeFieldDump(p1, r.energy.u1, out.path(levelName("fields/u1", k, ".csv"), "field_dump"),
                 out.path(levelName("fields/u1_frames", k, ".json"), "field_frames"));
  writeFieldDump(p2, r.energy.u2, out.path(levelName("fields/u2", k, ".csv"), "field_dump"),
                 out.path(levelName("fields/u2_frames", k, ".json"), "field_frames"));

  const ProductGraph g = assemble(p1, r.energy.u1, p2, r.energy.u2);
  const Certificate cert = conformalityCertificate(g);
  const double composition = compositionError(g);
  L.maxHopfSum = cert.maxHopfSum;
  L.gapRatio = cert.gapRatio();
  L.angleSum = graphAngleSum(g, 0);

  const double epsH = 5.0 * L.spacing;
  StabilityOptions so;
  so.epsH = epsH;
  so.samples = cfg.samples;
  so.seed = cfg.seed + static_cast<std::uint64_t>(k);
  const StabilityReport st = stabilitySuite(g, so);
  writeMarkedProfileCsv(g, st, 0.3, out.path(levelName("marked_profile", k, ".csv"), "marked_profile"));
  {
    std::ofstream s(out.path(levelName("stability", k, ".csv"), "stability_samples"));
    s << "sample,second_variation,energy_term,hopf_term,direct_area\n" << std::setprecision(17);
    for (std::size_t i = 0; i < st.samples.size(); ++i) {
      const auto& x = st.samples[i];
      s << i << ',' << x.secondVariation << ',' << x.energyTerm << ',' << x.hopfTerm << ',' << x.directArea << '\n';
    }
  }
  const SlopeFit slope = wDifferenceSlope(g, 0);
  const double derivedSlope = 2.0 * (cfg.alphaPrime - cfg.alpha);

  const double tol = 10.0 * cfg.outerTol;
  const std::string tag = "L" + std::to_string(k) + ".";
  checks.push_back(check(tag + "max_hopf_sum", cert.maxHopfSum <= tol, cert.maxHopfSum, tol, "<="));
  checks.push_back(check(tag + "area_energy_gap_ratio", cert.gapRatio() <= tol, cert.gapRatio(), tol, "<="));
  checks.push_back(check(tag + "composition_error", composition <= 1e-10, composition, 1e-10, "<="));
  if (st.hypothesis) {
    checks.push_back(check(tag + "w_pass_rate", st.wPassRate >= 0.99, st.wPassRate, 0.99, ">="));
    checks.push_back(check(tag + "e_pass_rate", st.ePassRate >= 0.99, st.ePassRate, 0.99, ">="));
    checks.push_back(check(tag + "w_slope", std::abs(slope.slope - derivedSlope) <= 0.25 * std::abs(derivedSlope),
                           slope.slope, derivedSlope, "within 25% of"));
  }
  checks.push_back(check(tag + "min_second_variation", st.minSecondVariation >= -epsH, st.minSecondVariation,
                         -epsH, ">="));

  json samples = json::array();
  for (const auto& x : st.samples)
    samples.push_back({{"second_variation", x.secondVariation}, {"energy_term", x.energyTerm},
                       {"hopf_term", x.hopfTerm}, {"direct_area", x.directArea}});
  levelReport = {
      {"level", k},
      {"h", L.h},
      {"n", L.n},
      {"spacing", L.spacing},
      {"eps_h", epsH},
      {"tau", complexJson(L.tau)},
      {"descent",
       {{"iterations", r.trace.size()},
        {"E", r.energy.E},
        {"E1", r.energy.E1},
        {"E2", r.energy.E2},
        {"wp_grad_norm", r.trace.back().wpGradNorm},
        {"hopf_sum_residual", r.trace.back().hopfSumResidual}}},
      {"conformality",
       {{"max_hopf_sum", cert.maxHopfSum},
        {"area", cert.areaEnergy.area},
        {"energy", cert.areaEnergy.energy},
        {"gap", cert.areaEnergy.gap},
        {"gap_ratio", cert.gapRatio()},
        {"composition_error", composition},
        {"psi_flipped_faces", g.psiFlipped.size()},
        {"psi_image_area_ratio", g.psiImageAreaRatio}}},
      {"graph_angle_sum", L.angleSum},
      {"pole_fits",
       {{"u1", poleFitJson(poleOrderEstimate(p1, hopfField(p1, r.energy.u1), 0))},
        {"u2", poleFitJson(poleOrderEstimate(p2, hopfField(p2, r.energy.u2), 0))}}},
      {"inequalities",
       {{"hypothesis", st.hypothesis},
        {"w_compared", st.wCompared},
        {"w_pass_rate", st.wPassRate},
        {"e_pass_rate", st.ePassRate},
        {"hopf_norm_mismatch", st.hopfNormMismatch},
        {"hopf_norm_mismatch_rel", st.hopfNormMismatchRel},
        {"w_slope", slope.slope},
        {"w_slope_points", slope.points},
        {"w_slope_expected", derivedSlope}}},
      {"stability",
       {{"seed", so.seed},
        {"samples", samples},
        {"min_second_variation", st.minSecondVariation},
        {"passes", st.secondVariationPasses}}},
  };
  return L;
}

RunOutcome runTorus(const RunConfig& cfg, Output& out) {
  json levels = json::array(), checks = json::array();
  std::vector<TorusLevel> L;
  Complex start(0.0, 1.0);
  for (int k = 0; k < cfg.levelCount(); ++k) {
    json lr;
    L.push_back(runTorusLevel(cfg, k, start, out, lr, checks));
    start = L.back().tau;
    levels.push_back(std::move(lr));
  }
  for (std::size_t k = 1; k < L.size(); ++k) {
    const std::string tag = "L" + std::to_string(k) + ".";
    checks.push_back(check(tag + "max_hopf_sum_decreases", L[k].maxHopfSum < L[k - 1].maxHopfSum, L[k].maxHopfSum,
                           L[k - 1].maxHopfSum, "<"));
    checks.push_back(
        check(tag + "gap_ratio_decreases", L[k].gapRatio < L[k - 1].gapRatio, L[k].gapRatio, L[k - 1].gapRatio, "<"));
  }
  const double beta = 2.0 * kPi * std::min(cfg.alpha, cfg.alphaPrime);
  json angle{{"target", beta}};
  if (L.size() >= 3) {
    const std::size_t m = L.size();
    const PowerLawLimit lim =
        extrapolatePowerLaw({L[m - 3].spacing, L[m - 2].spacing, L[m - 1].spacing}, {L[m - 3].angleSum, L[m - 2].angleSum, L[m - 1].angleSum});
    angle["limit"] = lim.limit;
    angle["exponent"] = lim.exponent;
    angle["coefficient"] = lim.coefficient;
    checks.push_back(check("graph_angle_limit", std::abs(lim.limit - beta) <= 0.05 * beta, lim.limit, beta,
                           "within 5% of"));
  }
  const bool passed = allPassed(checks);
  json report{{"fixture", "torus"},   {"config", cfg.toJson()},        {"levels", levels},
              {"graph_angle", angle}, {"checks", checks},              {"passed", passed}};
  out.writeJson("certification.json", "certification", report);
  return {passed, report};
}

// --- annulus ---------------------------------------------------------------

double annulusBochnerMax(double alpha, double alphaPrime, double h, double innerTol) {
  AnnulusGrid g = annulusGridForResolution(alpha, 1.0, h), gt = g;
  gt.alpha = alphaPrime;
  const ConeSurface D = buildConeAnnulus(g), T = buildConeAnnulus(gt);
  const HarmonicProblem p(D, T);
  HarmonicOptions o;
  o.tolerance = innerTol;
  const BochnerResidual b = bochnerResidual(p, solveHarmonic(p, VertexMap::identity(D), o).map);
  double worst = 0.0;
  for (int v = 1; v < D.numVertices(); ++v) {
    const double rho = g.rho(g.ringOf(v));
    if (rho < 0.25 || rho > 0.75 || std::isnan(b.plus[v])) continue;
    worst = std::max(worst, std::abs(b.plus[v]));
  }
  return worst;
}

RunOutcome runAnnulus(const RunConfig& cfg, Output& out) {
  const RadialProfile p = solveRadial(cfg.alpha, cfg.alphaPrime, 1.0, 1.0);
  writeProfileCsv(p, out.path("profile.csv", "radial_profile"));
  const RadialProfile id = solveRadial(cfg.alpha, cfg.alpha, 1.0, 1.0);

  HarmonicOptions inner;
  inner.tolerance = cfg.innerTol;
  json rows = json::array(), checks = json::array();
  std::ofstream table(out.path("oracle.csv", "oracle_table"));
  table << "level,h,vertices,linf,l2,linf_ratio,bochner_plus_max,bochner_ratio,identity_linf\n"
        << std::setprecision(17);
  double prevLinf = 0.0, prevBochner = 0.0;
  for (int k = 0; k < cfg.levelCount(); ++k) {
    const double h = cfg.resolution() / std::pow(2.0, k);
    const MeshComparison m = compareWithMesh(p, h, WeightModel::Cotangent, inner);
    const double identity = compareWithMesh(id, h, WeightModel::HyperbolicArea, inner).linf;
    const double bochner = annulusBochnerMax(cfg.alpha, cfg.alphaPrime, h, cfg.innerTol);
    const double ratio = prevLinf > 0.0 ? prevLinf / m.linf : NAN;
    const double bratio = prevBochner > 0.0 ? prevBochner / bochner : NAN;
    table << k << ',' << h << ',' << m.vertices << ',' << m.linf << ',' << m.l2 << ',' << ratio << ',' << bochner
          << ',' << bratio << ',' << identity << '\n';
    rows.push_back({{"level", k}, {"h", h}, {"vertices", m.vertices}, {"linf", m.linf}, {"l2", m.l2},
                    {"bochner_plus_max", bochner}, {"identity_linf", identity}});
    const std::string tag = "L" + std::to_string(k) + ".";
    checks.push_back(check(tag + "identity_exact", identity <= 1e-8, identity, 1e-8, "<="));
    if (k > 0) {
      checks.push_back(check(tag + "linf_decay", ratio >= 1.7, ratio, 1.7, ">="));
      checks.push_back(check(tag + "bochner_decay", bratio >= 1.5, bratio, 1.5, ">="));
    }
    prevLinf = m.linf;
    prevBochner = bochner;
  }
  const bool passed = allPassed(checks);
  json report{{"fixture", "annulus"},
              {"config", cfg.toJson()},
              {"profile",
               {{"c", p.c}, {"k", p.k()}, {"residual_bound", p.residualBound}, {"hopf_at_half", p.hopf(0.5)}}},
              {"levels", rows},
              {"checks", checks},
              {"passed", passed}};
  out.writeJson("certification.json", "certification", report);
  return {passed, report};
}

} // namespace

double RunConfig::resolution() const { return h ? *h : (fixture == "annulus" ? 0.2 : 0.1); }
int RunConfig::levelCount() const { return levels ? *levels : (fixture == "annulus" ? 3 : 2); }

void RunConfig::validate() const {
  if (fixture != "torus" && fixture != "annulus") fail("known fixture", "unknown fixture '" + fixture + "'");
  for (double a : {alpha, alphaPrime})
    if (!(a > 0.0 && a < 0.5)) fail("alpha in (0, 1/2)", "cone angle fraction out of range");
  // genus 1 with one cone point: chi + (alpha - 1) < 0 holds for every alpha < 1
  if (!(resolution() > 0.0 && resolution() <= 0.5)) fail("h in (0, 0.5]", "resolution out of range");
  if (levelCount() < 1 || levelCount() > 6) fail("levels in [1, 6]", "level count out of range");
  if (!(innerTol > 0.0) || !(outerTol > 0.0)) fail("positive tolerances", "tolerances must be positive");
  if (threads < 1) fail("threads >= 1", "CONE_MINIMAL_THREADS must be a positive integer");
  if (samples < 1 || directions < 1) fail("positive sample counts", "sample counts must be positive");
}

json RunConfig::toJson() const {
  return {{"fixture", fixture}, {"alpha", alpha},       {"alpha_prime", alphaPrime}, {"h", resolution()},
          {"levels", levelCount()},   {"inner_tol", innerTol}, {"outer_tol", outerTol},     {"seed", seed},
          {"samples", samples}, {"directions", directions}};
}

RunOutcome runPipeline(const RunConfig& cfg) {
  cfg.validate();
  Output out(cfg.out);
  const RunOutcome r = cfg.fixture == "torus" ? runTorus(cfg, out) : runAnnulus(cfg, out);
  out.writeManifest(cfg.toJson(), r.passed);
  return r;
}

RunOutcome runGradcheck(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.fixture != "torus") fail("torus fixture", "gradcheck runs on the torus fixture");
  Output out(cfg.out);
  const int n = torusCellsForResolution(cfg.alpha, cfg.resolution());
  const ConeSurface g1 = buildConeTorusGrid(cfg.alpha, n), g2 = buildConeTorusGrid(cfg.alphaPrime, n, 0.75);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  std::vector<std::vector<double>> dirs(cfg.directions, std::vector<double>(g1.numEdges()));
  for (auto& d : dirs)
    for (double& x : d) x = normal(rng);

  const ConformalState state{Complex(0.0, 1.0)};
  auto audit = [&](double innerTol) {
    HarmonicOptions inner;
    inner.tolerance = innerTol;
    TeichProblem tp(TorusChart::forGrid(g1, std::min(cfg.alpha, cfg.alphaPrime)), g1, g2, inner);
    return tp.gradientAudit(state, dirs);
  };
  const auto rows = audit(cfg.innerTol), tight = audit(cfg.innerTol / 10.0);

  std::ofstream csv(out.path("gradcheck.csv", "gradcheck"));
  csv << "direction,fd,predicted,rel_error,rel_error_tight_inner,pass\n" << std::setprecision(17);
  int pass = 0;
  double worst = 0.0, worstTight = 0.0;
  json dirsJson = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool ok = rows[i].relError <= 1e-3;
    pass += ok;
    worst = std::max(worst, rows[i].relError);
    worstTight = std::max(worstTight, tight[i].relError);
    csv << i << ',' << rows[i].fd << ',' << rows[i].predicted << ',' << rows[i].relError << ',' << tight[i].relError
        << ',' << ok << '\n';
    dirsJson.push_back({{"fd", rows[i].fd}, {"predicted", rows[i].predicted}, {"rel_error", rows[i].relError},
                        {"passed", ok}});
  }
  const int need = (19 * cfg.directions + 19) / 20;
  json checks = json::array();
  checks.push_back(check("directions_within_1e-3", pass >= need, pass, need, ">="));
  // FD error is O(eps^2); the tighter solve may not improve it, only must not spoil it
  checks.push_back(check("tight_inner_not_worse", worstTight <= 2.0 * worst + 1e-9, worstTight, 2.0 * worst + 1e-9,
                         "<="));
  const bool passed = allPassed(checks);
  json report{{"config", cfg.toJson()}, {"n", n},         {"tau", complexJson(state.tau)},
              {"eps", 1e-5},            {"directions", dirsJson}, {"checks", checks},
              {"passed", passed}};
  out.writeJson("gradcheck.json", "gradcheck_report", report);
  out.writeManifest(cfg.toJson(), passed);
  return {passed, report};
}

RunOutcome runValidate(const std::string& surfacePath, const std::string& outDir) {
  const ConeSurface s = readSurface(surfacePath);
  InvariantTolerances tol;
  tol.separationSlack = 2.0 * s.maxEdgeLength();
  const InvariantReport r = checkInvariants(s, tol);
  json report{{"surface", surfacePath}, {"report", r.toJson()}, {"passed", r.ok()}};
  if (!outDir.empty()) {
    Output out(outDir);
    out.writeJson("invariants.json", "invariant_report", report);
    out.writeManifest({{"validate", surfacePath}}, r.ok());
  }
  return {r.ok(), report};
}

json errorJson(const Error& e) {
  return {{"module", e.module()}, {"operation", e.operation()}, {"invariant", e.invariant()}, {"message", e.what()}};
}

void writeErrorJson(const std::string& dir, const json& error) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(fs::path(dir) / "error.json");
  out << error.dump(2) << '\n';
}

} // namespace conemin
