// conemin [run] --fixture torus|annulus [options]
// conemin [run] --validate-only surface.json
// conemin [run] --gradcheck [options]
//
// Exit status: 0 when every certification passes, 1 when a check fails,
// 2 on an error (error.json in the output directory and on stderr).

#include "conemin/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && args.front() == "run") args.erase(args.begin());
  std::reverse(args.begin(), args.end()); // CLI11 consumes a reversed vector

  conemin::RunConfig cfg;
  std::string validatePath;
  bool gradcheck = false;
  CLI::App app{"Minimal Lagrangian maps between hyperbolic cone surfaces"};
  app.set_help_flag("--help", "print this help");
  app.add_option("--fixture", cfg.fixture, "torus or annulus")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "cone angle fraction of the first target")->capture_default_str();
  app.add_option("--alpha-prime", cfg.alphaPrime, "cone angle fraction of the second target")->capture_default_str();
  app.add_option("--h", cfg.h, "mesh resolution at level 0 (default 0.1 torus, 0.2 annulus)");
  app.add_option("--levels", cfg.levels, "refinement levels, level k at h / 2^k (default 2 torus, 3 annulus)");
  app.add_option("--inner-tol", cfg.innerTol, "harmonic map gradient tolerance")->capture_default_str();
  app.add_option("--outer-tol", cfg.outerTol, "Weil-Petersson gradient tolerance")->capture_default_str();
  app.add_option("--seed", cfg.seed, "seed for randomized checks")->capture_default_str();
  app.add_option("--samples", cfg.samples, "stability samples per level")->capture_default_str();
  app.add_option("--out", cfg.out, "output directory")->capture_default_str();
  app.add_option("--validate-only", validatePath, "check the invariants of a surface file and exit");
  app.add_flag("--gradcheck", gradcheck, "run the finite-difference gradient audit");
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (const char* env = std::getenv("CONE_MINIMAL_THREADS")) {
    try {
      cfg.threads = std::stoi(env);
    } catch (const std::exception&) {
      cfg.threads = 0;
    }
  }

  try {
    conemin::RunOutcome r;
    if (!validatePath.empty()) {
      r = conemin::runValidate(validatePath, app.count("--out") ? cfg.out : "");
      std::cout << r.report.dump(2) << '\n';
    } else if (gradcheck) {
      r = conemin::runGradcheck(cfg);
      std::cout << r.report["checks"].dump(2) << '\n';
    } else {
      r = conemin::runPipeline(cfg);
      std::cout << r.report["checks"].dump(2) << '\n';
    }
    return r.passed ? 0 : 1;
  } catch (const conemin::Error& e) {
    const auto j = conemin::errorJson(e);
    conemin::writeErrorJson(cfg.out, j);
    std::cerr << j.dump(2) << '\n';
    return 2;
  } catch (const std::exception& e) {
    const nlohmann::json j{{"module", "cli"}, {"operation", "run"}, {"invariant", "no unexpected exception"},
                           {"message", e.what()}};
    conemin::writeErrorJson(cfg.out, j);
    std::cerr << j.dump(2) << '\n';
    return 2;
  }
}
