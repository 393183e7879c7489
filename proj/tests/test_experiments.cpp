#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "experiments.hpp"
#include "spheremaps/errors.hpp"

using namespace spheremaps;
using spheremaps::experiments::Manifest;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path temp_prefix(const char* name) {
  const fs::path dir = fs::temp_directory_path() / "spheremaps_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("theorem11 manifest runs and writes artifacts") {
  Manifest m;
  m.experiment = "theorem11";
  m.oracle = "l1";
  m.map = "normalize";
  m.d = 1;
  m.output = temp_prefix("t11").string();
  CHECK(run_experiment(m) == 0);
  CHECK(fs::exists(m.output + ".report.json"));
  CHECK(fs::exists(m.output + ".summary.csv"));
  CHECK(fs::exists(m.output + ".meta.json"));

  const std::string csv = slurp(m.output + ".summary.csv");
  CHECK(csv.find("checker,d,k,map,margin,verdict,value,threshold,note") == 0);
  CHECK(csv.find("theorem_1_1,1,20,normalize") != std::string::npos);
  CHECK(csv.find("pass") != std::string::npos);
}

TEST_CASE("identical manifests with a fixed seed give byte-identical CSVs") {
  for (const char* experiment : {"lemma32", "concentration"}) {
    Manifest m;
    m.experiment = experiment;
    m.oracle = "l1";
    m.map = experiment == std::string("concentration") ? "abs+normalize" : "normalize";
    m.d = 1;
    m.seed = 31337;
    m.seed_set = true;
    m.trials = 50;
    m.random_pairs = 8;
    m.output = temp_prefix("det_a").string();
    const int first = run_experiment(m);
    const std::string csv_a = slurp(m.output + ".summary.csv");
    m.output = temp_prefix("det_b").string();
    CHECK(run_experiment(m) == first);
    CHECK(csv_a == slurp(m.output + ".summary.csv"));
  }
}

TEST_CASE("divergence rows dominate the certified bound") {
  Manifest m;
  m.experiment = "divergence";
  m.k_grid = {100, 1000};
  m.deltas = {0.1};
  m.output = temp_prefix("div").string();
  CHECK(run_experiment(m) == 0);
  const std::string csv = slurp(m.output + ".summary.csv");
  CHECK(csv.find("divergence,1,100,normalize") != std::string::npos);
  CHECK(csv.find("delta=0.1") != std::string::npos);
}

TEST_CASE("manifest validation") {
  Manifest missing_output;
  missing_output.experiment = "partition";
  CHECK_THROWS_AS(run_experiment(missing_output), ManifestError);

  Manifest bad_map;
  bad_map.experiment = "theorem11";
  bad_map.map = "not-a-map";
  bad_map.output = temp_prefix("bad").string();
  CHECK_THROWS_AS(run_experiment(bad_map), ManifestError);

  Manifest needs_seed;
  needs_seed.experiment = "lemma32";
  needs_seed.output = temp_prefix("seedless").string();
  CHECK_THROWS_AS(run_experiment(needs_seed), ManifestError);

  CHECK_THROWS_AS(experiments::manifest_from_json({{"experiment", "partition"}, {"typo", 1}}),
                  ManifestError);
}

TEST_CASE("cli binary exit codes") {
  const fs::path out = temp_prefix("cli");
  const std::string base = std::string(SPHEREMAPS_CLI_PATH);

  const std::string good = base + " --experiment theorem11 --oracle l1 --map normalize --d 1 --out " +
                           out.string() + " >/dev/null 2>&1";
  CHECK(std::system(good.c_str()) == 0);

  const std::string bad_map = base + " --experiment theorem11 --map nope --out " + out.string() +
                              " >/dev/null 2>&1";
  const int code = std::system(bad_map.c_str());
  CHECK(WEXITSTATUS(code) == 2);

  const std::string manifest_file = (out.string() + ".manifest.json");
  {
    std::ofstream f(manifest_file);
    f << R"({"experiment":"divergence","k_grid":[100],"deltas":[0.01],"output":")"
      << out.string() << R"(.m"})";
  }
  const std::string via_manifest = base + " --manifest " + manifest_file + " >/dev/null 2>&1";
  CHECK(std::system(via_manifest.c_str()) == 0);
}

TEST_CASE("worker count does not change the summary bytes") {
  Manifest m;
  m.experiment = "lemma32";
  m.oracle = "l2";
  m.d = 2;
  m.seed = 5150;
  m.seed_set = true;
  m.trials = 120;
  m.workers = 1;
  m.output = temp_prefix("w1").string();
  REQUIRE(run_experiment(m) == 0);
  m.workers = 4;
  m.output = temp_prefix("w4").string();
  REQUIRE(run_experiment(m) == 0);
  CHECK(slurp(temp_prefix("w1").string() + ".summary.csv") ==
        slurp(temp_prefix("w4").string() + ".summary.csv"));
}
