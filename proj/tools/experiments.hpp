#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace spheremaps::experiments {

/// One experiment per invocation; batching happens in the shell.
struct Manifest {
  std::string experiment;  // partition | modulus | separation | theorem11 |
                           // theorem12 | concentration | roundtrip | lemma32 |
                           // divergence
  std::string oracle = "l1";
  std::string map = "normalize";
  int d = 1;
  double eps = 0.5;
  std::int64_t k_budget = 0;  // 0 -> experiment default
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string output;  // path prefix for .report.json / .summary.csv / .meta.json
  std::string route = "direct";          // theorem11: direct | abs-sym
  std::vector<std::int64_t> k_grid;      // divergence; default 1e2..1e6
  std::vector<double> deltas;            // divergence; default {0.1, 0.01}
  double t = 0.0;                        // modulus probe distance; 0 -> 1/d
  double gamma = 0.0;                    // >0 switches concentration to the
                                         // local-property-q threshold gamma*eps
  int trials = 1000;                     // lemma32 / roundtrip sample count
  int random_pairs = 200;                // modulus / concentration random pairs
  int workers = 0;                       // 0 -> SPHEREMAPS_WORKERS or hardware
};

/// Strict parser: unknown keys are errors. Throws ManifestError.
Manifest manifest_from_json(const nlohmann::json& j);

nlohmann::json manifest_to_json(const Manifest& m);

/// Runs the experiment and writes <output>.report.json, <output>.summary.csv
/// and <output>.meta.json. Returns 0 when every verdict is pass (or an
/// expected hypothesis_not_met such as a concentration branch-A refutation)
/// and 1 on verdict failures. Manifest problems throw ManifestError; the CLI
/// turns those into exit code 2.
int run_experiment(const Manifest& manifest);

}  // namespace spheremaps::experiments
