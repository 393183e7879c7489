#include "spheremaps/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "spheremaps/rng.hpp"

namespace spheremaps {

namespace {

PcpVector eval_as_pcp(const SphereMap& map, const PcpVector& x) {
  if (map.pcp_capable()) return map.eval(x);
  return PcpVector::encode(map.eval(x.materialize()));
}

double image_distance(const SphereMap& map, const PcpVector& a, const PcpVector& b) {
  return map.target_oracle()->norm(subtract(eval_as_pcp(map, a), eval_as_pcp(map, b)));
}

double min_coordinate(const PcpVector& v) {
  double best = std::numeric_limits<double>::infinity();
  for (const PcpSegment& s : v.segments()) {
    if (PcpVector::even_count(s.lo, s.hi) > 0) best = std::min(best, s.val_even);
    if (PcpVector::odd_count(s.lo, s.hi) > 0) best = std::min(best, s.val_odd);
  }
  return best;
}

std::string tuple_string(std::span<const std::int64_t> t) {
  std::ostringstream out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out << ',';
    out << t[i];
  }
  return out.str();
}

// First index of the partition class inside (lo, hi], or 0 if none.
std::int64_t first_in_class(const Partition& partition, std::int64_t lo, std::int64_t hi,
                            bool in_p) {
  if (partition.is_evens()) {
    std::int64_t i = lo + 1;
    const bool want_even = in_p;
    if ((i % 2 == 0) != want_even) ++i;
    return i <= hi ? i : 0;
  }
  for (std::int64_t i = lo + 1; i <= hi; ++i) {
    if (partition.contains(i) == in_p) return i;
  }
  return 0;
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// sum_s coefs[s] 1_{(blocks[s].first, blocks[s].second] cap Q} as a PcpVector
// (parity partitions only), zero elsewhere. Empty blocks are skipped.
PcpVector block_sum_evens(std::int64_t dim,
                          std::span<const std::pair<std::int64_t, std::int64_t>> blocks,
                          std::span<const double> coefs, std::optional<QChoice> q) {
  std::vector<PcpSegment> segments;
  std::int64_t pos = 1;
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    const auto [lo, hi] = blocks[s];
    if (hi <= lo) continue;
    if (lo + 1 > pos) segments.push_back({pos, lo, 0.0, 0.0});
    const double ve = (!q || *q == QChoice::P) ? coefs[s] : 0.0;
    const double vo = (!q || *q == QChoice::Pc) ? coefs[s] : 0.0;
    segments.push_back({lo + 1, hi, ve, vo});
    pos = hi + 1;
  }
  if (pos <= dim) segments.push_back({pos, dim, 0.0, 0.0});
  return PcpVector(dim, std::move(segments));
}

DenseVector block_sum_dense(std::int64_t dim,
                            std::span<const std::pair<std::int64_t, std::int64_t>> blocks,
                            std::span<const double> coefs, std::optional<QChoice> q,
                            const Partition& partition) {
  if (dim > kDenseCap) {
    throw DimensionTooLarge("block sum with an explicit partition beyond the dense cap");
  }
  std::vector<double> coords(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    const auto [lo, hi] = blocks[s];
    for (std::int64_t i = lo + 1; i <= hi; ++i) {
      const bool in_p = partition.contains(i);
      if (!q || (*q == QChoice::P ? in_p : !in_p)) {
        coords[static_cast<std::size_t>(i - 1)] = coefs[s];
      }
    }
  }
  return DenseVector(std::move(coords));
}

double block_sum_norm(const NormOracle& oracle, const Partition& partition, std::int64_t dim,
                      std::span<const std::pair<std::int64_t, std::int64_t>> blocks,
                      std::span<const double> coefs, std::optional<QChoice> q) {
  if (partition.is_evens()) {
    return oracle.norm(block_sum_evens(dim, blocks, coefs, q));
  }
  return oracle.norm(block_sum_dense(dim, blocks, coefs, q, partition));
}

void require_interlacing(std::span<const std::int64_t> m, std::span<const std::int64_t> n) {
  if (m.size() != n.size() || m.empty()) throw BadTuple("tuples must have equal positive length");
  std::int64_t prev = 0;
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (m[s] <= prev || n[s] <= m[s]) throw BadTuple("tuples do not interlace");
    prev = n[s];
  }
}

// Hypothesis checks shared by the separation-flavoured checkers. Returns an
// empty string when Assumption A holds at the points used.
std::string verify_assumption_a(const NormOracle& oracle, const Partition& partition,
                                const GrowthSet& growth, int d, double eps,
                                std::span<const std::int64_t> probe_points,
                                InequalityReport& report) {
  GrowthSet at_eps = growth;
  at_eps.d = d;
  at_eps.eps = eps;
  const double margin = growth_condition_margin(at_eps);
  report.add("growth_condition_margin", margin);
  if (margin < -1e-9) return "growth_condition";

  for (std::int64_t kappa : probe_points) {
    const double balance = psi_partition(oracle, partition, kappa) -
                           0.5 * (oracle.psi(kappa) - 1.0);
    if (balance < -1e-9) {
      report.add("partition_balance_defect_at_" + std::to_string(kappa), balance);
      return "partition_balance";
    }
  }

  for (std::size_t j = 0; j + 1 < growth.elements.size(); ++j) {
    if (!partition.hits_range(growth.elements[j], growth.elements[j + 1], true) ||
        !partition.hits_range(growth.elements[j], growth.elements[j + 1], false)) {
      return "gap_intersections";
    }
  }
  return {};
}

InequalityReport hypothesis_not_met(InequalityReport report, std::string which) {
  report.verdict = Verdict::HypothesisNotMet;
  report.failed_hypothesis = std::move(which);
  return report;
}

}  // namespace

MapFactory map_factory(const std::string& spec, std::shared_ptr<const NormOracle> target) {
  return MapFactory{spec, [spec, target](std::int64_t k) { return parse_map(spec, k, target); }};
}

PairGrid staircase_pairs(const GrowthSet& growth, int d, std::int64_t k_budget) {
  PairGrid grid;
  for (const InterlacedPair& pair : enumerate_interlaced(growth, d, k_budget, InterlaceMode::Exhaustive)) {
    grid.pcp.emplace_back(staircase_z(pair.m, pair.k), staircase_z(pair.n, pair.k));
  }
  return grid;
}

PairGrid spike_pair(std::int64_t k, double delta) {
  PairGrid grid;
  PcpVector e1(k, {{1, 1, 1.0, 1.0}, {2, k, 0.0, 0.0}});
  grid.pcp.emplace_back(std::move(e1), spike_vector(k, delta));
  return grid;
}

PairGrid random_sphere_pairs(const NormOracle& domain, std::int64_t k, double t, int count,
                             std::uint64_t seed, bool positive_part) {
  if (k > kDenseCap) {
    throw DimensionTooLarge("random_sphere_pairs: dense sampling beyond the cap");
  }
  PairGrid grid;
  SplitMix64 rng{seed ^ 0x9fb21c651e98df25ull};
  const double lo = positive_part ? 0.0 : -1.0;
  for (int c = 0; c < count; ++c) {
    std::vector<double> a(static_cast<std::size_t>(k));
    for (double& v : a) v = rng.uniform(lo, 1.0);
    const std::size_t pin = static_cast<std::size_t>(rng.bounded(static_cast<std::uint64_t>(k)));
    a[pin] = positive_part || rng.next() % 2 == 0 ? 1.0 : -1.0;

    std::vector<double> b = a;
    for (double& v : b) v = std::clamp(v + rng.uniform(-t, t), lo, 1.0);
    b[pin] = a[pin];

    if (domain.is_c0_like()) {
      grid.dense.emplace_back(DenseVector(std::move(a)), DenseVector(std::move(b)));
    } else {
      DenseVector da{a}, db{b};
      const double na = domain.norm(da), nb = domain.norm(db);
      for (double& v : a) v /= na;
      for (double& v : b) v /= nb;
      grid.dense.emplace_back(DenseVector(std::move(a)), DenseVector(std::move(b)));
    }
  }
  return grid;
}

ModulusEstimate modulus_lower_bound(const SphereMap& map, double t, const PairGrid& pairs) {
  ModulusEstimate estimate;
  estimate.map_name = map.name();
  estimate.t = t;
  for (const auto& [a, b] : pairs.pcp) {
    if (sup_distance(a, b) > t + 1e-12) continue;
    ++estimate.pairs_tried;
    const double dist = image_distance(map, a, b);
    if (dist > estimate.lower_bound) {
      estimate.lower_bound = dist;
      estimate.witness_pair = {a, b};
    }
  }
  for (const auto& [a, b] : pairs.dense) {
    if (sup_distance(a, b) > t + 1e-12) continue;
    ++estimate.pairs_tried;
    const double dist = map.target_oracle()->norm(subtract(map.eval(a), map.eval(b)));
    if (dist > estimate.lower_bound) {
      estimate.lower_bound = dist;
      estimate.witness_pair = {PcpVector::encode(a), PcpVector::encode(b)};
    }
  }
  return estimate;
}

InequalityReport check_lemma32(const NormOracle& oracle, const Partition& partition,
                               const GrowthSet& growth, std::span<const std::int64_t> m,
                               std::span<const std::int64_t> n, std::span<const double> lambdas,
                               QChoice q, int implication, double eps) {
  require_interlacing(m, n);
  if (lambdas.size() != m.size()) throw BadTuple("lemma32: one lambda per block");
  if (implication != 1 && implication != 2) {
    throw std::invalid_argument("lemma32: implication must be 1 or 2");
  }
  for (std::size_t s = 0; s < m.size(); ++s) {
    const auto& e = growth.elements;
    if (std::find(e.begin(), e.end(), m[s]) == e.end() ||
        std::find(e.begin(), e.end(), n[s]) == e.end()) {
      throw BadTuple("lemma32: tuple entry not drawn from the growth set");
    }
  }

  InequalityReport report;
  report.checker = "lemma32";
  report.inputs["oracle"] = oracle.name();
  report.inputs["partition"] = partition.label();
  report.inputs["m"] = tuple_string(m);
  report.inputs["n"] = tuple_string(n);
  report.inputs["Q"] = q == QChoice::P ? "P" : "Pc";
  report.inputs["implication"] = std::to_string(implication);

  const std::size_t d = m.size();
  const std::int64_t dim = n.back();
  std::vector<std::pair<std::int64_t, std::int64_t>> premise_blocks(d), conclusion_blocks(d);
  for (std::size_t s = 0; s < d; ++s) {
    const std::int64_t m_prev = s == 0 ? 0 : m[s - 1];
    const std::int64_t n_prev = s == 0 ? 0 : n[s - 1];
    if (implication == 1) {
      premise_blocks[s] = {n_prev, n[s]};
      conclusion_blocks[s] = {n_prev, m[s]};
    } else {
      premise_blocks[s] = {m_prev, m[s]};
      conclusion_blocks[s] = {m_prev, n_prev};
    }
  }

  const double premise = block_sum_norm(oracle, partition, dim, premise_blocks, lambdas, q);
  report.add("premise_norm", premise);
  if (premise > 1.0 + 1e-12) {
    return hypothesis_not_met(std::move(report), "premise_norm_at_most_one");
  }

  const double conclusion =
      block_sum_norm(oracle, partition, dim, conclusion_blocks, lambdas, std::nullopt);
  report.conclusion_value = conclusion;
  report.threshold = eps / 4.0;
  report.margin = report.threshold - conclusion;
  report.verdict = conclusion <= report.threshold + 1e-9 ? Verdict::Pass : Verdict::Fail;
  return report;
}

InequalityReport check_separation(const SphereMap& map, const InterlacedPair& pair,
                                  const Profile& u, const Partition& partition, double eps,
                                  const SeparationOptions& options) {
  pair.validate();
  u.validate();
  const int d = pair.d();
  if (u.d() != d) throw BadTuple("separation: profile dimension mismatch");
  if (map.dim() != pair.k) throw DimMismatch("separation: map dimension differs from k");

  InequalityReport report;
  report.checker = "separation";
  report.inputs["map"] = map.name();
  report.inputs["oracle"] = map.target_oracle()->name();
  report.inputs["partition"] = partition.label();
  report.inputs["m"] = tuple_string(pair.m);
  report.inputs["n"] = tuple_string(pair.n);
  report.inputs["k"] = std::to_string(pair.k);
  report.inputs["eps"] = std::to_string(eps);

  std::vector<std::int64_t> probes(pair.m.begin(), pair.m.end());
  probes.insert(probes.end(), pair.n.begin(), pair.n.end());
  probes.push_back(pair.k);
  if (std::string failed = verify_assumption_a(*map.target_oracle(), partition, pair.growth, d,
                                               eps, probes, report);
      !failed.empty()) {
    return hypothesis_not_met(std::move(report), failed);
  }

  const PcpVector x_m = witness_x(pair.m, u, pair.k, partition);
  const PcpVector x_n = witness_x(pair.n, u, pair.k, partition);

  for (const PcpVector* x : {&x_m, &x_n}) {
    if (check_step_preserving(map, *x, options.step_tol).verdict != Verdict::Pass) {
      return hypothesis_not_met(std::move(report), "step_preserving_on_witnesses");
    }
  }

  const PcpVector y_m = eval_as_pcp(map, x_m);
  const PcpVector y_n = eval_as_pcp(map, x_n);

  BlockReadouts readouts;
  auto read = [&](const PcpVector& y, std::span<const std::int64_t> tuple, bool in_p,
                  std::vector<double>& out) {
    std::int64_t prev = 0;
    for (std::int64_t hi : tuple) {
      const std::int64_t idx = first_in_class(partition, prev, hi, in_p);
      out.push_back(idx == 0 ? kNaN : y.at(idx));
      prev = hi;
    }
  };
  read(y_m, pair.m, true, readouts.alpha_m);
  read(y_m, pair.m, false, readouts.beta_m);
  read(y_n, pair.n, true, readouts.alpha_n);
  read(y_n, pair.n, false, readouts.beta_n);
  readouts.gamma_m = y_m.at(pair.k);
  readouts.gamma_n = y_n.at(pair.k);
  report.block_readouts = readouts;
  report.add("gamma_m", readouts.gamma_m);

  if (std::fabs(readouts.gamma_m) > options.tail_tol) {
    return hypothesis_not_met(std::move(report), "tail_zero");
  }

  const double dist = map.target_oracle()->norm(subtract(y_m, y_n));
  report.conclusion_value = dist;
  report.threshold = 1.0 - eps;
  report.margin = dist - report.threshold;
  report.verdict = report.margin >= options.strict_margin ? Verdict::Pass : Verdict::Fail;
  return report;
}

InequalityReport run_theorem_1_1(const MapFactory& factory,
                                 std::shared_ptr<const NormOracle> oracle, int d,
                                 const TheoremOptions& options) {
  const Partition partition = Partition::evens();
  const GrowthSet growth = build_growth_set(oracle, partition, d, options.eps, 2 * d);
  const std::int64_t k = options.k_override.value_or(growth.elements.back() + 1);

  InequalityReport report;
  report.checker = "theorem_1_1";
  report.inputs["map"] = factory.name;
  report.inputs["oracle"] = oracle->name();
  report.inputs["d"] = std::to_string(d);
  report.inputs["eps"] = std::to_string(options.eps);
  report.inputs["k"] = std::to_string(k);
  report.inputs["route"] = options.route == ProofRoute::Direct ? "direct" : "abs+symmetrize";
  if (growth.base_a) report.add("a", static_cast<double>(*growth.base_a));
  report.add("k", static_cast<double>(k));
  report.add("psi_k", oracle->psi(k));

  SphereMapPtr map = factory.make(k);
  if (options.route == ProofRoute::AbsSymmetrize) {
    map = symmetrize(abs_wrapper(map), SymmetrizeMode::sampled(options.symmetrize_samples,
                                                               options.seed));
  }

  const auto pairs = enumerate_interlaced(growth, d, k, InterlaceMode::Exhaustive);
  report.add("pairs", static_cast<double>(pairs.size()));

  const double expected_gap = 1.0 / d;
  double min_dist = std::numeric_limits<double>::infinity();
  double min_margin = std::numeric_limits<double>::infinity();
  SeparationOptions sep_options;
  for (const InterlacedPair& pair : pairs) {
    const PcpVector z_m = staircase_z(pair.m, pair.k);
    const PcpVector z_n = staircase_z(pair.n, pair.k);

    for (const PcpVector* z : {&z_m, &z_n}) {
      if (check_support_preserving(*map, *z, 0.0).verdict != Verdict::Pass) {
        return hypothesis_not_met(std::move(report), "support_preserving_on_witnesses");
      }
      if (check_step_preserving(*map, *z, sep_options.step_tol).verdict != Verdict::Pass) {
        return hypothesis_not_met(std::move(report), "step_preserving_on_witnesses");
      }
    }

    const PcpVector y_m = eval_as_pcp(*map, z_m);
    if (std::fabs(y_m.at(pair.k)) > sep_options.tail_tol) {
      report.add("gamma_m", y_m.at(pair.k));
      return hypothesis_not_met(std::move(report), "tail_zero");
    }

    const double gap = sup_distance(z_m, z_n);
    if (std::fabs(gap - expected_gap) > 1e-12) {
      report.add("domain_distance", gap);
      report.verdict = Verdict::Fail;
      report.failed_hypothesis = "domain_distance";
      return report;
    }

    const double dist = map->target_oracle()->norm(subtract(y_m, eval_as_pcp(*map, z_n)));
    min_dist = std::min(min_dist, dist);
    min_margin = std::min(min_margin, dist - (1.0 - options.eps));
  }

  report.add("domain_distance", expected_gap);
  report.conclusion_value = min_dist;
  report.threshold = 1.0 - options.eps;
  report.margin = min_margin;
  report.verdict = min_margin >= sep_options.strict_margin ? Verdict::Pass : Verdict::Fail;
  return report;
}

InequalityReport run_theorem_1_2(const MapFactory& factory,
                                 std::shared_ptr<const NormOracle> oracle, int d,
                                 const TheoremOptions& options) {
  const Partition partition = Partition::evens();
  const GrowthSet growth = build_growth_set(oracle, partition, d, options.eps, 2 * d);
  const std::int64_t k = options.k_override.value_or(growth.elements.back() + 1);

  InequalityReport report;
  report.checker = "theorem_1_2";
  report.inputs["map"] = factory.name;
  report.inputs["oracle"] = oracle->name();
  report.inputs["d"] = std::to_string(d);
  report.inputs["eps"] = std::to_string(options.eps);
  report.inputs["k"] = std::to_string(k);
  if (growth.base_a) report.add("a", static_cast<double>(*growth.base_a));

  const SphereMapPtr map = factory.make(k);
  if (!map->declared().continuous) {
    return hypothesis_not_met(std::move(report), "continuity_declared");
  }

  const PcpVector ones = PcpVector::constant(k, 1.0);
  const PcpVector minus_ones = PcpVector::constant(k, -1.0);
  double endpoint_gap = 0.0;
  try {
    endpoint_gap = map->target_oracle()->norm(
        subtract(eval_as_pcp(*map, ones), eval_as_pcp(*map, minus_ones)));
  } catch (const NotInPositivePart&) {
    // Maps defined only on the positive part cannot follow the path.
    return hypothesis_not_met(std::move(report), "domain_covers_path");
  }
  report.add("endpoint_image_distance", endpoint_gap);
  if (endpoint_gap <= 1e-9) {
    return hypothesis_not_met(std::move(report), "distinct_endpoint_images");
  }

  std::vector<std::int64_t> m(static_cast<std::size_t>(d)), n(static_cast<std::size_t>(d));
  for (int s = 0; s < d; ++s) {
    m[static_cast<std::size_t>(s)] = growth.elements[static_cast<std::size_t>(2 * s)];
    n[static_cast<std::size_t>(s)] = growth.elements[static_cast<std::size_t>(2 * s + 1)];
  }

  const PathPhi path = path_phi(m, k, partition);
  std::optional<TailZeroResult> root;
  try {
    root.emplace(find_tail_zero(*map, path, m.back(), k));
  } catch (const NoSignChange&) {
    return hypothesis_not_met(std::move(report), "tail_sign_change");
  } catch (const HypothesisViolated&) {
    return hypothesis_not_met(std::move(report), "step_preserving_on_path");
  } catch (const RootNotFound&) {
    return hypothesis_not_met(std::move(report), "tail_root_convergence");
  }
  report.add("t_root", root->t_root);
  report.add("tail_value_at_root", root->tail_value);
  report.add("sign_flipped", root->sign_flipped ? 1.0 : 0.0);

  InterlacedPair pair{m, n, k, growth};
  InequalityReport sep = check_separation(*map, pair, root->u, partition, options.eps);

  const double witness_gap = sup_distance(witness_x(m, root->u, k, partition),
                                          witness_x(n, root->u, k, partition));
  sep.add("witness_distance", witness_gap);
  if (witness_gap > 1.0 / d + 1e-12) {
    sep.verdict = Verdict::Fail;
    sep.failed_hypothesis = "witness_distance_bound";
  }

  sep.checker = report.checker;
  for (auto& [key, value] : report.inputs) sep.inputs.emplace(key, value);
  sep.hypothesis_values.insert(sep.hypothesis_values.begin(), report.hypothesis_values.begin(),
                               report.hypothesis_values.end());
  return sep;
}

InequalityReport check_concentration(const SphereMap& map, std::span<const std::int64_t> m,
                                     std::int64_t k, int d, double eps, const GrowthSet& growth,
                                     const ConcentrationOptions& options) {
  if (static_cast<int>(m.size()) != d) throw BadTuple("concentration: |m| must equal d");
  const NormOracle& oracle = *map.target_oracle();
  const double modulus_threshold = options.modulus_threshold.value_or(eps / 8.0);

  InequalityReport report;
  report.checker = "concentration";
  report.inputs["map"] = map.name();
  report.inputs["oracle"] = oracle.name();
  report.inputs["m"] = tuple_string(m);
  report.inputs["k"] = std::to_string(k);
  report.inputs["d"] = std::to_string(d);
  report.inputs["eps"] = std::to_string(eps);
  report.add("modulus_threshold", modulus_threshold);
  if (growth.base_a) report.add("a", static_cast<double>(*growth.base_a));

  if (oracle.is_c0_like()) {
    return hypothesis_not_met(std::move(report), "oracle_admissible");
  }

  // Q = even-indexed (1-based) growth elements; m and k must come from it.
  const auto& elements = growth.elements;
  auto q_index = [&](std::int64_t value) -> std::optional<std::size_t> {
    for (std::size_t j = 1; j < elements.size(); j += 2) {
      if (elements[j] == value) return j;
    }
    return std::nullopt;
  };
  for (std::int64_t m_s : m) {
    if (!q_index(m_s)) return hypothesis_not_met(std::move(report), "q_membership");
  }
  if (!q_index(k) || k <= m.back()) {
    return hypothesis_not_met(std::move(report), "q_membership");
  }

  // The tail estimate needs psi to multiply by at least 32/eps along M.
  for (std::size_t j = 0; j + 1 < elements.size() && elements[j + 1] <= k; ++j) {
    const double ratio = oracle.psi(elements[j + 1]) / oracle.psi(elements[j]);
    if (ratio < 32.0 / eps - 1e-9) {
      report.add("growth_ratio", ratio);
      return hypothesis_not_met(std::move(report), "growth_ratio");
    }
  }

  const PcpVector z_m = staircase_z(m, k);
  if (check_step_preserving(map, z_m, 1e-9).verdict != Verdict::Pass) {
    return hypothesis_not_met(std::move(report), "step_preserving");
  }
  const PcpVector y_m = eval_as_pcp(map, z_m);
  if (min_coordinate(y_m) < -1e-9) {
    return hypothesis_not_met(std::move(report), "positive_image");
  }

  // Branch A: hunt for a pair at distance 1/d whose images are farther apart
  // than the modulus hypothesis allows. Witness staircases first.
  std::int64_t pairs_tried = 0;
  auto refutes = [&](double dist_domain, double dist_image) {
    return dist_domain <= 1.0 / d + 1e-12 && dist_image > modulus_threshold + 1e-9;
  };

  std::vector<std::int64_t> n(m.begin(), m.end());
  bool have_n = true;
  for (std::size_t s = 0; s < n.size(); ++s) {
    const auto it = std::find(elements.begin(), elements.end(), n[s]);
    if (it == elements.end() || it + 1 == elements.end()) {
      have_n = false;
      break;
    }
    n[s] = *(it + 1);
  }
  if (have_n && n.back() < k) {
    ++pairs_tried;
    const PcpVector z_n = staircase_z(n, k);
    const double dist_domain = sup_distance(z_m, z_n);
    const double dist_image = oracle.norm(subtract(y_m, eval_as_pcp(map, z_n)));
    if (refutes(dist_domain, dist_image)) {
      report.inputs["branch"] = "A";
      report.inputs["witness_n"] = tuple_string(n);
      report.add("refuting_domain_distance", dist_domain);
      report.add("pairs_tried", static_cast<double>(pairs_tried));
      report.conclusion_value = dist_image;
      report.threshold = modulus_threshold;
      report.margin = dist_image - modulus_threshold;
      return hypothesis_not_met(std::move(report), "modulus_bound");
    }
  }

  if (k <= kDenseCap && options.random_pairs > 0) {
    const PairGrid random =
        random_sphere_pairs(*linf_oracle(), k, 1.0 / d, options.random_pairs, options.seed, true);
    for (const auto& [a, b] : random.dense) {
      ++pairs_tried;
      const double dist_domain = sup_distance(a, b);
      const double dist_image = oracle.norm(subtract(map.eval(a), map.eval(b)));
      if (refutes(dist_domain, dist_image)) {
        report.inputs["branch"] = "A";
        report.add("refuting_domain_distance", dist_domain);
        report.add("pairs_tried", static_cast<double>(pairs_tried));
        report.conclusion_value = dist_image;
        report.threshold = modulus_threshold;
        report.margin = dist_image - modulus_threshold;
        return hypothesis_not_met(std::move(report), "modulus_bound");
      }
    }
  }

  // Branch B: no refutation among the tried pairs; the image of the staircase
  // must concentrate on the normalized ones vector.
  report.inputs["branch"] = "B";
  report.add("pairs_tried", static_cast<double>(pairs_tried));
  const PcpVector uniform = PcpVector::constant(k, 1.0 / oracle.psi(k));
  const double dist = oracle.norm(subtract(y_m, uniform));
  report.conclusion_value = dist;
  report.threshold = eps;
  report.margin = eps - dist;
  report.verdict = dist <= eps + 1e-9 ? Verdict::Pass : Verdict::Fail;
  return report;
}

InequalityReport check_local_property_q(const SphereMap& map, std::span<const std::int64_t> m,
                                        std::int64_t k, int d, double eps, double gamma,
                                        const GrowthSet& growth,
                                        const ConcentrationOptions& options) {
  ConcentrationOptions local = options;
  local.modulus_threshold = gamma * eps;
  InequalityReport report = check_concentration(map, m, k, d, eps, growth, local);
  report.checker = "local_property_q";
  report.inputs["gamma"] = std::to_string(gamma);
  return report;
}

}  // namespace spheremaps
