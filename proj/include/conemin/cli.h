#pragma once

// Batch driver behind the conemin tool: builds the fixtures, runs the
// pipeline and writes the reports into one output directory indexed by
// manifest.json.

#include "conemin/errors.h"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace conemin {

struct RunConfig {
  std::string fixture = "torus"; // torus | annulus
  double alpha = 0.25;
  double alphaPrime = 0.40;
  std::optional<double> h; // 0.1 on the torus, 0.2 on the annulus
  std::optional<int> levels; // level k uses h / 2^k; 2 on the torus, 3 on the annulus
  double innerTol = 1e-10;
  double outerTol = 1e-8;
  std::uint64_t seed = 1;
  std::string out = "conemin_out";
  int threads = 1;     // cap from CONE_MINIMAL_THREADS; all work is serial
  int samples = 50;    // stability samples per level
  int directions = 20; // gradcheck directions

  double resolution() const;
  int levelCount() const;
  // Throws Error("cli", "run", ...) on invalid values.
  void validate() const;
  nlohmann::json toJson() const;
};

struct RunOutcome {
  bool passed = false;
  nlohmann::json report;
};

// Full pipeline for the configured fixture; writes certification.json.
RunOutcome runPipeline(const RunConfig& config);
// Finite-difference gradient audit on the torus fixture at the coarsest level.
RunOutcome runGradcheck(const RunConfig& config);
// Invariant report of a surface file; writes invariants.json when out is nonempty.
RunOutcome runValidate(const std::string& surfacePath, const std::string& out);

nlohmann::json errorJson(const Error& e);
// Writes error.json into dir (created if needed).
void writeErrorJson(const std::string& dir, const nlohmann::json& error);

} // namespace conemin
