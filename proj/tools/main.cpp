#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "experiments.hpp"
#include "spheremaps/errors.hpp"
#include "spheremaps/version.hpp"

using spheremaps::experiments::Manifest;

int main(int argc, char** argv) {
  CLI::App app{"spheremaps: sphere-map separation and concentration experiments"};
  app.set_version_flag("--version", spheremaps::kVersion);

  std::string manifest_path;
  Manifest inline_manifest;
  bool seed_given = false;

  app.add_option("--manifest", manifest_path, "JSON experiment manifest (overrides inline flags)");
  app.add_option("--experiment", inline_manifest.experiment,
                 "partition|modulus|separation|theorem11|theorem12|concentration|roundtrip|"
                 "lemma32|divergence");
  app.add_option("--oracle", inline_manifest.oracle, "l1 | l2 | lr:<r> | linf");
  app.add_option("--map", inline_manifest.map,
                 "normalize | integral | phi:<f> | mazur:<p> | const-uniform, with optional "
                 "abs+ / sym(exact)+ / sym(n,seed)+ prefixes");
  app.add_option("--d", inline_manifest.d, "number of staircase steps");
  app.add_option("--eps", inline_manifest.eps, "separation / concentration epsilon");
  app.add_option("--k-budget", inline_manifest.k_budget, "dimension budget (0 = minimal)");
  app.add_option("--seed", inline_manifest.seed, "seed for sampled experiments")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_option("--out", inline_manifest.output, "output path prefix");
  app.add_option("--route", inline_manifest.route, "theorem11 route: direct | abs-sym");
  app.add_option("--t", inline_manifest.t, "modulus probe distance (default 1/d)");
  app.add_option("--gamma", inline_manifest.gamma, "local property-q threshold factor");
  app.add_option("--trials", inline_manifest.trials, "lemma32/roundtrip trials per configuration");
  app.add_option("--random-pairs", inline_manifest.random_pairs,
                 "random probe pairs for modulus/concentration");
  app.add_option("--workers", inline_manifest.workers,
                 "worker threads (or set SPHEREMAPS_WORKERS)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    Manifest manifest;
    if (!manifest_path.empty()) {
      std::ifstream in(manifest_path);
      if (!in) {
        std::cerr << "error: cannot open manifest " << manifest_path << '\n';
        return 2;
      }
      nlohmann::json j;
      in >> j;
      manifest = spheremaps::experiments::manifest_from_json(j);
    } else {
      manifest = inline_manifest;
      manifest.seed_set = seed_given;
    }
    return spheremaps::experiments::run_experiment(manifest);
  } catch (const spheremaps::ManifestError& e) {
    std::cerr << "manifest error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "manifest error: " << e.what() << '\n';
    return 2;
  } catch (const spheremaps::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
