#include "experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>

#include "spheremaps/analysis.hpp"
#include "spheremaps/json_io.hpp"
#include "spheremaps/parallel.hpp"
#include "spheremaps/rng.hpp"
#include "spheremaps/version.hpp"

namespace spheremaps::experiments {

namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string format_short(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%g", v);
  return buffer;
}

struct SummaryRow {
  std::string checker;
  int d = 0;
  std::int64_t k = 0;
  std::string map;
  double margin = 0.0;
  std::string verdict;
  double value = 0.0;
  double threshold = 0.0;
  std::string note;
};

// Column order is part of the CLI contract; see the README.
constexpr const char* kCsvHeader = "checker,d,k,map,margin,verdict,value,threshold,note";

struct RunState {
  const Manifest& manifest;
  std::vector<SummaryRow> rows;
  std::vector<json> reports;
  std::vector<json> modulus_estimates;
  json meta_extra = json::object();
  bool failed = false;

  void add_report(const InequalityReport& report, int d, std::int64_t k, const std::string& map,
                  const std::string& note = "", bool hypothesis_not_met_expected = false) {
    reports.push_back(json_io::report(report));
    rows.push_back({report.checker, d, k, map, report.margin, to_string(report.verdict),
                    report.conclusion_value, report.threshold, note});
    if (report.verdict == Verdict::Fail) failed = true;
    if (report.verdict == Verdict::HypothesisNotMet && !hypothesis_not_met_expected) failed = true;
  }
};

void require(bool ok, const std::string& message) {
  if (!ok) throw ManifestError(message);
}

void require_seed(const Manifest& m) {
  require(m.seed_set, "experiment '" + m.experiment + "' samples; a seed is mandatory");
}

// --- individual experiments ----------------------------------------------

void run_partition(RunState& state) {
  const Manifest& m = state.manifest;
  const auto oracle = make_oracle(m.oracle);
  require(!oracle->is_c0_like(), "partition experiment needs an unbounded fundamental function");
  const std::int64_t k_max = m.k_budget > 0 ? m.k_budget : 10'000;

  const Partition partition = greedy_partition(oracle, k_max);
  const std::vector<double> balance = partition_balance(*oracle, partition, k_max);
  double worst_balance = 0.0;
  for (double b : balance) worst_balance = std::max(worst_balance, b);

  double worst_bound = std::numeric_limits<double>::infinity();
  if (oracle->indicator_norm(1).has_value()) {
    std::int64_t count_p = 0;
    for (std::int64_t k = 1; k <= k_max; ++k) {
      if (partition.contains(k)) ++count_p;
      const double psi_p =
          std::min(*oracle->indicator_norm(count_p), *oracle->indicator_norm(k - count_p));
      worst_bound = std::min(worst_bound, psi_p - 0.5 * (oracle->psi(k) - 1.0));
    }
  } else {
    for (std::int64_t k = 1; k <= k_max; ++k) {
      worst_bound = std::min(worst_bound,
                             psi_partition(*oracle, partition, k) - 0.5 * (oracle->psi(k) - 1.0));
    }
  }

  InequalityReport balance_report;
  balance_report.checker = "partition_balance";
  balance_report.inputs["oracle"] = oracle->name();
  balance_report.inputs["k_max"] = std::to_string(k_max);
  balance_report.conclusion_value = worst_balance;
  balance_report.threshold = 1.0;
  balance_report.margin = 1.0 - worst_balance;
  balance_report.verdict = worst_balance <= 1.0 + 1e-9 ? Verdict::Pass : Verdict::Fail;
  state.add_report(balance_report, 0, k_max, "");

  InequalityReport bound_report;
  bound_report.checker = "partition_halving_bound";
  bound_report.inputs["oracle"] = oracle->name();
  bound_report.conclusion_value = worst_bound;
  bound_report.threshold = 0.0;
  bound_report.margin = worst_bound;
  bound_report.verdict = worst_bound >= -1e-9 ? Verdict::Pass : Verdict::Fail;
  state.add_report(bound_report, 0, k_max, "");

  state.meta_extra["partition"] = partition.label();
}

void run_modulus(RunState& state) {
  const Manifest& m = state.manifest;
  require_seed(m);
  const auto oracle = make_oracle(m.oracle);

  std::optional<GrowthSet> growth;
  std::int64_t k = m.k_budget;
  if (!oracle->is_c0_like()) {
    growth = build_growth_set(oracle, Partition::evens(), m.d, m.eps, 2 * m.d);
    if (k <= 0) k = growth->elements.back() + 1;
  }
  require(k > 0, "modulus: k_budget required for this oracle");

  const SphereMapPtr map = parse_map(m.map, k, oracle);
  const double t = m.t > 0.0 ? m.t : 1.0 / m.d;

  PairGrid grid;
  const bool linf_domain = map->domain_oracle()->is_c0_like();
  if (growth && linf_domain) {
    grid = staircase_pairs(*growth, m.d, k);
    state.meta_extra["growth_elements"] = growth->elements;
    if (growth->base_a) state.meta_extra["a"] = *growth->base_a;
  }
  if (k <= kDenseCap) {
    PairGrid random = random_sphere_pairs(*map->domain_oracle(), k, t, m.random_pairs, m.seed,
                                          /*positive_part=*/false);
    for (auto& p : random.dense) grid.dense.push_back(std::move(p));
  }

  const ModulusEstimate estimate = modulus_lower_bound(*map, t, grid);
  state.modulus_estimates.push_back(json_io::modulus(estimate));
  state.rows.push_back({"modulus_lower_bound", m.d, k, map->name(), estimate.lower_bound, "pass",
                        estimate.lower_bound, 0.0, "pairs=" + std::to_string(estimate.pairs_tried)});
}

void run_separation(RunState& state) {
  const Manifest& m = state.manifest;
  const auto oracle = make_oracle(m.oracle);
  const Partition partition = Partition::evens();
  const GrowthSet growth = build_growth_set(oracle, partition, m.d, m.eps, 2 * m.d);
  const std::int64_t k = m.k_budget > 0 ? m.k_budget : growth.elements.back() + 1;
  const SphereMapPtr map = parse_map(m.map, k, oracle);
  state.meta_extra["growth_elements"] = growth.elements;
  if (growth.base_a) state.meta_extra["a"] = *growth.base_a;

  const Profile u = staircase_profile(m.d);
  const auto pairs = enumerate_interlaced(growth, m.d, k, InterlaceMode::Exhaustive);
  state.meta_extra["growth"] = json_io::growth_with_pairs(growth, pairs);
  for (const InterlacedPair& pair : pairs) {
    const InequalityReport report = check_separation(*map, pair, u, partition, m.eps);
    state.add_report(report, m.d, k, map->name());
  }
}

void run_theorem(RunState& state, int which) {
  const Manifest& m = state.manifest;
  const auto oracle = make_oracle(m.oracle);
  TheoremOptions options;
  options.eps = m.eps;
  if (m.k_budget > 0) options.k_override = m.k_budget;
  options.seed = m.seed;
  if (m.route == "abs-sym") {
    require(which == 1, "the abs-sym route applies to theorem11 only");
    require_seed(m);
    options.route = ProofRoute::AbsSymmetrize;
  } else {
    require(m.route == "direct", "unknown route: " + m.route);
  }

  const GrowthSet growth =
      build_growth_set(oracle, Partition::evens(), m.d, m.eps, 2 * m.d);
  state.meta_extra["growth_elements"] = growth.elements;
  if (growth.base_a) state.meta_extra["a"] = *growth.base_a;

  const MapFactory factory = map_factory(m.map, oracle);
  const InequalityReport report = which == 1 ? run_theorem_1_1(factory, oracle, m.d, options)
                                             : run_theorem_1_2(factory, oracle, m.d, options);
  std::int64_t k = 0;
  if (auto it = report.inputs.find("k"); it != report.inputs.end()) k = std::stoll(it->second);
  state.add_report(report, m.d, k, m.map);
}

void run_concentration(RunState& state) {
  const Manifest& m = state.manifest;
  require_seed(m);
  const auto oracle = make_oracle(m.oracle);
  const Partition partition = Partition::evens();
  const GrowthSet growth =
      build_concentration_growth_set(oracle, partition, m.d, m.eps, 2 * m.d + 2);
  state.meta_extra["growth_elements"] = growth.elements;
  if (growth.base_a) state.meta_extra["a"] = *growth.base_a;

  // m from the even-indexed elements, k the next even-indexed one after n_d.
  std::vector<std::int64_t> tuple(static_cast<std::size_t>(m.d));
  for (int s = 0; s < m.d; ++s) {
    tuple[static_cast<std::size_t>(s)] = growth.elements[static_cast<std::size_t>(2 * s + 1)];
  }
  const std::int64_t k = growth.elements[static_cast<std::size_t>(2 * m.d + 1)];
  const SphereMapPtr map = parse_map(m.map, k, oracle);

  ConcentrationOptions options;
  options.seed = m.seed;
  options.random_pairs = m.random_pairs;
  const InequalityReport report =
      m.gamma > 0.0 ? check_local_property_q(*map, tuple, k, m.d, m.eps, m.gamma, growth, options)
                    : check_concentration(*map, tuple, k, m.d, m.eps, growth, options);
  const bool branch_a = report.inputs.count("branch") != 0 && report.inputs.at("branch") == "A";
  state.add_report(report, m.d, k, map->name(), branch_a ? "branch=A" : "branch=B",
                   /*hypothesis_not_met_expected=*/branch_a);
}

void run_roundtrip(RunState& state) {
  const Manifest& m = state.manifest;
  require_seed(m);
  std::vector<std::int64_t> grid = m.k_grid;
  if (grid.empty()) grid = {2, 8, 64, 128};

  for (const std::int64_t k : grid) {
    const auto F = integral_homeo(k);
    const auto G = integral_homeo_inverse(k);
    SplitMix64 rng{m.seed ^ (0xabcd1234u + static_cast<std::uint64_t>(k))};

    double worst_forward = 0.0, worst_backward = 0.0, worst_closed = 0.0;
    for (int trial = 0; trial < m.trials; ++trial) {
      std::vector<double> y(static_cast<std::size_t>(k));
      double total = 0.0;
      for (double& c : y) {
        c = rng.uniform01() + 1e-6;
        total += c;
      }
      for (double& c : y) c /= total;
      const DenseVector y_vec{y};
      worst_forward = std::max(worst_forward, l1_oracle()->norm(subtract(F->eval(G->eval(y_vec)), y_vec)));

      std::vector<double> x(static_cast<std::size_t>(k));
      for (double& c : x) c = rng.uniform01();
      x[rng.bounded(static_cast<std::uint64_t>(k))] = 1.0;
      const DenseVector x_vec{x};
      worst_backward = std::max(worst_backward, sup_distance(G->eval(F->eval(x_vec)), x_vec));

      std::sort(x.begin(), x.end(), std::greater<>());
      const DenseVector sorted{x};
      const DenseVector via_map = F->eval(sorted);
      double acc = 0.0;
      for (std::size_t i = x.size(); i-- > 0;) {
        const double next = (i + 1 < x.size()) ? x[i + 1] : 0.0;
        acc += (x[i] - next) / static_cast<double>(i + 1);
        worst_closed = std::max(worst_closed,
                                std::fabs(via_map.at(static_cast<std::int64_t>(i) + 1) - acc));
      }
    }

    auto emit = [&](const char* checker, double value, double threshold) {
      InequalityReport report;
      report.checker = checker;
      report.inputs["k"] = std::to_string(k);
      report.conclusion_value = value;
      report.threshold = threshold;
      report.margin = threshold - value;
      report.verdict = value <= threshold ? Verdict::Pass : Verdict::Fail;
      state.add_report(report, 0, k, "integral", "trials=" + std::to_string(m.trials));
    };
    emit("roundtrip_forward", worst_forward, 1e-10);
    emit("roundtrip_backward", worst_backward, 1e-10);
    emit("roundtrip_closed_form", worst_closed, 1e-12);
  }
}

void run_lemma32(RunState& state) {
  const Manifest& m = state.manifest;
  require_seed(m);
  const auto oracle = make_oracle(m.oracle);
  const Partition partition = Partition::evens();

  for (int d = 1; d <= m.d; ++d) {
    const GrowthSet growth = build_growth_set(oracle, partition, d, m.eps, 2 * d);
    const InterlacedPair pair =
        enumerate_interlaced(growth, d, growth.elements.back() + 1).front();

    std::vector<double> margins(static_cast<std::size_t>(m.trials), 0.0);
    std::vector<char> ok(static_cast<std::size_t>(m.trials), 1);
    parallel_for(m.trials, m.workers > 0 ? m.workers : default_worker_count(),
                 [&](std::int64_t trial) {
      SplitMix64 rng{m.seed + 0x51ed2701u * static_cast<std::uint64_t>(trial + 1)};
      std::vector<double> lambdas(static_cast<std::size_t>(d));
      for (double& v : lambdas) v = rng.uniform(-1.0, 1.0);
      const QChoice q = trial % 2 == 0 ? QChoice::P : QChoice::Pc;
      const int implication = (trial / 2) % 2 == 0 ? 1 : 2;

      InequalityReport probe =
          check_lemma32(*oracle, partition, growth, pair.m, pair.n, lambdas, q, implication, m.eps);
      double premise = 0.0;
      for (const auto& [name, value] : probe.hypothesis_values) {
        if (name == "premise_norm") premise = value;
      }
      if (premise > 0.0) {
        for (double& v : lambdas) v /= premise;
      }
      const InequalityReport report =
          check_lemma32(*oracle, partition, growth, pair.m, pair.n, lambdas, q, implication, m.eps);
      margins[static_cast<std::size_t>(trial)] = report.margin;
      ok[static_cast<std::size_t>(trial)] = report.verdict == Verdict::Pass ? 1 : 0;
    });

    double min_margin = std::numeric_limits<double>::infinity();
    std::int64_t violations = 0;
    for (int trial = 0; trial < m.trials; ++trial) {
      min_margin = std::min(min_margin, margins[static_cast<std::size_t>(trial)]);
      if (!ok[static_cast<std::size_t>(trial)]) ++violations;
    }

    InequalityReport report;
    report.checker = "lemma32_sweep";
    report.inputs["oracle"] = oracle->name();
    report.inputs["d"] = std::to_string(d);
    report.inputs["eps"] = std::to_string(m.eps);
    report.inputs["trials"] = std::to_string(m.trials);
    report.add("violations", static_cast<double>(violations));
    report.conclusion_value = min_margin;
    report.threshold = 0.0;
    report.margin = min_margin;
    report.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
    state.add_report(report, d, pair.k, "", "trials=" + std::to_string(m.trials));
  }
}

void run_divergence(RunState& state) {
  const Manifest& m = state.manifest;
  require(m.map == "normalize" && m.oracle == "l1",
          "divergence: the certified bound is for the normalize map into l1");
  std::vector<std::int64_t> k_grid = m.k_grid;
  if (k_grid.empty()) k_grid = {100, 1'000, 10'000, 100'000, 1'000'000};
  std::vector<double> deltas = m.deltas;
  if (deltas.empty()) deltas = {0.1, 0.01};

  for (const double delta : deltas) {
    for (const std::int64_t k : k_grid) {
      const auto F = normalize_map(k, l1_oracle());
      const PcpVector e1(k, {{1, 1, 1.0, 1.0}, {2, k, 0.0, 0.0}});
      const PcpVector spike = spike_vector(k, delta);
      const double value = l1_oracle()->norm(subtract(F->eval(e1), F->eval(spike)));
      const double bound = 1.0 - 1.0 / (1.0 + (static_cast<double>(k) - 1.0) * delta);

      InequalityReport report;
      report.checker = "divergence";
      report.inputs["k"] = std::to_string(k);
      report.inputs["delta"] = format_short(delta);
      report.conclusion_value = value;
      report.threshold = bound;
      report.margin = value - bound;
      report.verdict = value >= bound - 1e-12 ? Verdict::Pass : Verdict::Fail;
      state.add_report(report, m.d, k, "normalize", "delta=" + format_short(delta));
    }
  }
}

// --- output ----------------------------------------------------------------

void write_outputs(RunState& state, double wall_seconds) {
  const Manifest& m = state.manifest;
  const std::filesystem::path prefix(m.output);
  if (prefix.has_parent_path()) std::filesystem::create_directories(prefix.parent_path());

  {
    json report_doc{{"experiment", m.experiment},
                    {"manifest", manifest_to_json(m)},
                    {"reports", state.reports}};
    if (!state.modulus_estimates.empty()) report_doc["modulus_estimates"] = state.modulus_estimates;
    std::ofstream out(m.output + ".report.json");
    out << report_doc.dump(2) << '\n';
  }

  {
    std::ofstream out(m.output + ".summary.csv");
    out << kCsvHeader << '\n';
    for (const SummaryRow& row : state.rows) {
      out << row.checker << ',' << row.d << ',' << row.k << ',' << row.map << ','
          << format_double(row.margin) << ',' << row.verdict << ',' << format_double(row.value)
          << ',' << format_double(row.threshold) << ',' << row.note << '\n';
    }
  }

  {
    json meta{{"tool", "spheremaps"},
              {"version", kVersion},
              {"experiment", m.experiment},
              {"oracle", m.oracle},
              {"map", m.map},
              {"seed", m.seed},
              {"wall_time_s", wall_seconds},
              {"workers", m.workers > 0 ? m.workers : default_worker_count()},
              {"tolerances",
               {{"strict_margin", 1e-9},
                {"tail_tol", 1e-9},
                {"tie_tol", 1e-12},
                {"verdict_slack", 1e-9}}}};
    if (!state.meta_extra.contains("partition")) meta["partition"] = "evens";
    for (auto& [key, value] : state.meta_extra.items()) meta[key] = value;
    std::ofstream out(m.output + ".meta.json");
    out << meta.dump(2) << '\n';
  }
}

}  // namespace

Manifest manifest_from_json(const json& j) {
  Manifest m;
  require(j.is_object(), "manifest must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") {
      m.experiment = value.get<std::string>();
    } else if (key == "oracle") {
      m.oracle = value.get<std::string>();
    } else if (key == "map") {
      m.map = value.get<std::string>();
    } else if (key == "d") {
      m.d = value.get<int>();
    } else if (key == "eps") {
      m.eps = value.get<double>();
    } else if (key == "k_budget") {
      m.k_budget = value.get<std::int64_t>();
    } else if (key == "seed") {
      m.seed = value.get<std::uint64_t>();
      m.seed_set = true;
    } else if (key == "output") {
      m.output = value.get<std::string>();
    } else if (key == "route") {
      m.route = value.get<std::string>();
    } else if (key == "k_grid") {
      m.k_grid = value.get<std::vector<std::int64_t>>();
    } else if (key == "deltas") {
      m.deltas = value.get<std::vector<double>>();
    } else if (key == "t") {
      m.t = value.get<double>();
    } else if (key == "gamma") {
      m.gamma = value.get<double>();
    } else if (key == "trials") {
      m.trials = value.get<int>();
    } else if (key == "random_pairs") {
      m.random_pairs = value.get<int>();
    } else if (key == "workers") {
      m.workers = value.get<int>();
    } else {
      throw ManifestError("unknown manifest key: " + key);
    }
  }
  return m;
}

json manifest_to_json(const Manifest& m) {
  json j{{"experiment", m.experiment}, {"oracle", m.oracle},   {"map", m.map},
         {"d", m.d},                   {"eps", m.eps},         {"k_budget", m.k_budget},
         {"output", m.output},         {"route", m.route},     {"t", m.t},
         {"gamma", m.gamma},           {"trials", m.trials},   {"random_pairs", m.random_pairs},
         {"workers", m.workers}};
  if (m.seed_set) j["seed"] = m.seed;
  if (!m.k_grid.empty()) j["k_grid"] = m.k_grid;
  if (!m.deltas.empty()) j["deltas"] = m.deltas;
  return j;
}

int run_experiment(const Manifest& manifest) {
  require(!manifest.experiment.empty(), "manifest needs an experiment");
  require(!manifest.output.empty(), "manifest needs an output prefix");
  require(manifest.d >= 1, "d must be positive");
  require(manifest.eps > 0.0 && manifest.eps <= 1.0, "eps must lie in (0,1]");

  RunState state{manifest, {}, {}, {}, json::object(), false};
  const auto start = std::chrono::steady_clock::now();

  if (manifest.experiment == "partition") {
    run_partition(state);
  } else if (manifest.experiment == "modulus") {
    run_modulus(state);
  } else if (manifest.experiment == "separation") {
    run_separation(state);
  } else if (manifest.experiment == "theorem11") {
    run_theorem(state, 1);
  } else if (manifest.experiment == "theorem12") {
    run_theorem(state, 2);
  } else if (manifest.experiment == "concentration") {
    run_concentration(state);
  } else if (manifest.experiment == "roundtrip") {
    run_roundtrip(state);
  } else if (manifest.experiment == "lemma32") {
    run_lemma32(state);
  } else if (manifest.experiment == "divergence") {
    run_divergence(state);
  } else {
    throw ManifestError("unknown experiment: " + manifest.experiment);
  }

  const double wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_outputs(state, wall_seconds);
  return state.failed ? 1 : 0;
}

}  // namespace spheremaps::experiments
