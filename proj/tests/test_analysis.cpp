#include <cmath>
#include <vector>

#include "doctest.h"
#include "spheremaps/analysis.hpp"
#include "test_util.hpp"

using namespace spheremaps;
using test_util::Rng;

namespace {

const Partition kEvens = Partition::evens();

InterlacedPair canonical_pair(const GrowthSet& growth, int d, std::int64_t k) {
  return enumerate_interlaced(growth, d, k).front();
}

}  // namespace

TEST_CASE("modulus lower bound") {
  SUBCASE("constant maps have modulus zero") {
    const auto F = const_uniform_map(32, l1_oracle());
    PairGrid grid = random_sphere_pairs(*linf_oracle(), 32, 0.3, 50, 7, false);
    const ModulusEstimate estimate = modulus_lower_bound(*F, 0.3, grid);
    CHECK(estimate.lower_bound == 0.0);
    CHECK(estimate.pairs_tried == 50);
  }

  SUBCASE("the spike pair certifies non-equicontinuity of normalize") {
    const std::int64_t k = 101;
    const auto F = normalize_map(k, l1_oracle());
    const ModulusEstimate estimate = modulus_lower_bound(*F, 0.1, spike_pair(k, 0.1));
    // 1 - 1/(1+(k-1)delta) = 10/11 is the certified floor; the exact value is
    // twice that.
    CHECK(estimate.lower_bound >= 10.0 / 11 - 1e-12);
    CHECK(estimate.lower_bound == doctest::Approx(20.0 / 11).epsilon(1e-12));
    CHECK(estimate.witness_pair.has_value());
    CHECK(sup_distance(estimate.witness_pair->first, estimate.witness_pair->second) <=
          0.1 + 1e-12);
  }

  SUBCASE("staircase pairs witness the 1/d lower bound") {
    const GrowthSet growth = build_growth_set(l1_oracle(), kEvens, 2, 0.5, 4);
    const std::int64_t k = growth.elements.back() + 1;
    const auto F = normalize_map(k, l1_oracle());
    const ModulusEstimate estimate =
        modulus_lower_bound(*F, 0.5, staircase_pairs(growth, 2, k));
    CHECK(estimate.lower_bound >= 0.5);
  }
}

TEST_CASE("lemma32 implications") {
  const GrowthSet growth = build_growth_set(l1_oracle(), kEvens, 1, 0.5, 3);
  const std::vector<std::int64_t> m{1}, n{19};

  SUBCASE("zero coefficients pass trivially") {
    const std::vector<double> lambdas{0.0};
    const InequalityReport report =
        check_lemma32(*l1_oracle(), kEvens, growth, m, n, lambdas, QChoice::P, 1, 0.5);
    CHECK(report.verdict == Verdict::Pass);
    CHECK(report.conclusion_value == 0.0);
  }

  SUBCASE("frozen d=1 example") {
    // ||1_{(0,19] cap evens}||_1 = 9, so lambda = 1/9 saturates the premise.
    const std::vector<double> lambdas{1.0 / 9.0};
    const InequalityReport report =
        check_lemma32(*l1_oracle(), kEvens, growth, m, n, lambdas, QChoice::P, 1, 0.5);
    CHECK(report.verdict == Verdict::Pass);
    CHECK(report.conclusion_value == doctest::Approx(1.0 / 9).epsilon(1e-12));
    CHECK(report.threshold == 0.125);
  }

  SUBCASE("premise violations are flagged, not passed") {
    const std::vector<double> lambdas{10.0};
    const InequalityReport report =
        check_lemma32(*l1_oracle(), kEvens, growth, m, n, lambdas, QChoice::P, 1, 0.5);
    CHECK(report.verdict == Verdict::HypothesisNotMet);
    CHECK(report.failed_hypothesis == "premise_norm_at_most_one");
  }

  SUBCASE("random admissible coefficients never break the conclusion") {
    Rng rng(88);
    for (double eps : {0.25, 0.5}) {
      for (double r : {1.0, 2.0}) {
        const auto oracle = lr_oracle(r);
        for (int d = 1; d <= 3; ++d) {
          const GrowthSet g = build_growth_set(oracle, kEvens, d, eps, 2 * d);
          const auto pair = canonical_pair(g, d, g.elements.back() + 1);
          for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> lambdas(static_cast<std::size_t>(d));
            for (double& v : lambdas) v = rng.uniform(-1.0, 1.0);
            const QChoice q = rng.next() % 2 == 0 ? QChoice::P : QChoice::Pc;
            const int implication = 1 + static_cast<int>(rng.bounded(2));

            // Scale so the premise is admissible (norm exactly one).
            std::vector<std::pair<std::int64_t, std::int64_t>> blocks;
            InequalityReport probe = check_lemma32(*oracle, kEvens, g, pair.m, pair.n, lambdas,
                                                    q, implication, eps);
            double premise = 0.0;
            for (const auto& [name, value] : probe.hypothesis_values) {
              if (name == "premise_norm") premise = value;
            }
            if (premise > 0.0) {
              for (double& v : lambdas) v /= premise;
            }
            const InequalityReport report = check_lemma32(*oracle, kEvens, g, pair.m, pair.n,
                                                          lambdas, q, implication, eps);
            CHECK(report.verdict == Verdict::Pass);
          }
        }
      }
    }
  }
}

TEST_CASE("separation checker") {
  const GrowthSet growth = build_growth_set(l1_oracle(), kEvens, 1, 0.5, 3);
  const InterlacedPair pair = canonical_pair(growth, 1, 362);

  SUBCASE("normalize separates the staircases by 36/19") {
    const auto F = normalize_map(362, l1_oracle());
    const InequalityReport report =
        check_separation(*F, pair, staircase_profile(1), kEvens, 0.5);
    CHECK(report.verdict == Verdict::Pass);
    CHECK(report.conclusion_value == doctest::Approx(36.0 / 19).epsilon(1e-12));
    CHECK(report.margin == doctest::Approx(36.0 / 19 - 0.5).epsilon(1e-11));
    REQUIRE(report.block_readouts.has_value());
    const BlockReadouts& b = *report.block_readouts;
    CHECK(std::isnan(b.alpha_m[0]));  // (0,1] holds no even index
    CHECK(b.beta_m[0] == 1.0);
    CHECK(b.alpha_n[0] == doctest::Approx(1.0 / 19).epsilon(1e-12));
    CHECK(b.gamma_n == 0.0);
    CHECK(b.gamma_m == 0.0);
  }

  SUBCASE("integral map separates as well") {
    const auto F = integral_homeo(362);
    const InequalityReport report =
        check_separation(*F, pair, staircase_profile(1), kEvens, 0.5);
    CHECK(report.verdict == Verdict::Pass);
    CHECK(report.conclusion_value > 0.5);
  }

  SUBCASE("constant maps fail the tail hypothesis with gamma = 1/psi(k)") {
    const auto F = const_uniform_map(362, l1_oracle());
    const InequalityReport report =
        check_separation(*F, pair, staircase_profile(1), kEvens, 0.5);
    CHECK(report.verdict == Verdict::HypothesisNotMet);
    CHECK(report.failed_hypothesis == "tail_zero");
    REQUIRE(report.block_readouts.has_value());
    CHECK(report.block_readouts->gamma_m == doctest::Approx(1.0 / 362).epsilon(1e-12));
  }

  SUBCASE("verdict is invariant under the abs wrapper on nonnegative readouts") {
    const auto F = normalize_map(362, l1_oracle());
    const InequalityReport plain =
        check_separation(*F, pair, staircase_profile(1), kEvens, 0.5);
    const InequalityReport wrapped =
        check_separation(*abs_wrapper(F), pair, staircase_profile(1), kEvens, 0.5);
    CHECK(plain.verdict == wrapped.verdict);
    CHECK(plain.conclusion_value == doctest::Approx(wrapped.conclusion_value).epsilon(1e-9));
  }

  SUBCASE("verdict is invariant under sampled symmetrization of equivariant maps") {
    const InterlacedPair small = canonical_pair(growth, 1, 20);
    const auto F = abs_wrapper(normalize_map(20, l1_oracle()));
    const auto G = symmetrize(F, SymmetrizeMode::sampled(50, 4242));
    const InequalityReport plain =
        check_separation(*F, small, staircase_profile(1), kEvens, 0.5);
    const InequalityReport averaged =
        check_separation(*G, small, staircase_profile(1), kEvens, 0.5);
    CHECK(plain.verdict == Verdict::Pass);
    CHECK(averaged.verdict == Verdict::Pass);
    CHECK(plain.conclusion_value == doctest::Approx(averaged.conclusion_value).epsilon(1e-9));
  }
}

TEST_CASE("theorem 1.1 driver") {
  SUBCASE("d=1 at the minimal dimension") {
    const InequalityReport report =
        run_theorem_1_1(map_factory("normalize", l1_oracle()), l1_oracle(), 1);
    CHECK(report.verdict == Verdict::Pass);
    CHECK(report.inputs.at("k") == "20");
    CHECK(report.conclusion_value == doctest::Approx(36.0 / 19).epsilon(1e-12));
  }

  SUBCASE("d=2 on run-length vectors") {
    for (const char* map_name : {"normalize", "integral"}) {
      const InequalityReport report =
          run_theorem_1_1(map_factory(map_name, l1_oracle()), l1_oracle(), 2);
      CHECK(report.verdict == Verdict::Pass);
      CHECK(report.inputs.at("k") == "6860");
      CHECK(report.conclusion_value >= 0.5);
    }
  }

  SUBCASE("the abs+symmetrize proof route agrees for equivariant maps") {
    TheoremOptions options;
    options.route = ProofRoute::AbsSymmetrize;
    options.seed = 11;
    const InequalityReport report =
        run_theorem_1_1(map_factory("normalize", l1_oracle()), l1_oracle(), 1, options);
    CHECK(report.verdict == Verdict::Pass);
    CHECK(report.conclusion_value == doctest::Approx(36.0 / 19).epsilon(1e-9));
  }

  SUBCASE("maps that break support preservation are rejected") {
    const InequalityReport report =
        run_theorem_1_1(map_factory("const-uniform", l1_oracle()), l1_oracle(), 1);
    CHECK(report.verdict == Verdict::HypothesisNotMet);
    CHECK(report.failed_hypothesis == "support_preserving_on_witnesses");
  }
}

TEST_CASE("theorem 1.2 driver") {
  SUBCASE("normalize on l1 at k=362") {
    TheoremOptions options;
    options.k_override = 362;
    const InequalityReport report =
        run_theorem_1_2(map_factory("normalize", l1_oracle()), l1_oracle(), 1, options);
    CHECK(report.verdict == Verdict::Pass);
    double t_root = -1.0;
    for (const auto& [name, value] : report.hypothesis_values) {
      if (name == "t_root") t_root = value;
    }
    CHECK(t_root == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(report.conclusion_value == doctest::Approx(36.0 / 19).epsilon(1e-12));
  }

  SUBCASE("normalize on l2 at the minimal dimension") {
    const InequalityReport report =
        run_theorem_1_2(map_factory("normalize", l2_oracle()), l2_oracle(), 1);
    CHECK(report.verdict == Verdict::Pass);
    CHECK(report.inputs.at("k") == "362");  // a = ceil(19^2) = 361
    CHECK(report.conclusion_value > 0.5);
  }

  SUBCASE("maps with equal endpoint images are rejected by name") {
    const InequalityReport report =
        run_theorem_1_2(map_factory("const-uniform", l1_oracle()), l1_oracle(), 1);
    CHECK(report.verdict == Verdict::HypothesisNotMet);
    CHECK(report.failed_hypothesis == "distinct_endpoint_images");
  }
}

TEST_CASE("concentration checker") {
  const GrowthSet growth = build_concentration_growth_set(l1_oracle(), kEvens, 1, 0.5, 4);
  REQUIRE(growth.base_a == 66);
  const std::vector<std::int64_t> m{66};
  const std::int64_t k = 66 * 66 * 66;

  SUBCASE("constant uniform map lands in branch B with zero defect") {
    const auto F = const_uniform_map(k, l1_oracle());
    const InequalityReport report = check_concentration(*F, m, k, 1, 0.5, growth);
    CHECK(report.inputs.at("branch") == "B");
    CHECK(report.verdict == Verdict::Pass);
    CHECK(report.conclusion_value <= 1e-12);
  }

  SUBCASE("abs+normalize is refuted in branch A with the 2(1 - m1/n1) witness") {
    const auto F = abs_wrapper(normalize_map(k, l1_oracle()));
    const InequalityReport report = check_concentration(*F, m, k, 1, 0.5, growth);
    CHECK(report.inputs.at("branch") == "A");
    CHECK(report.verdict == Verdict::HypothesisNotMet);
    CHECK(report.failed_hypothesis == "modulus_bound");
    CHECK(report.conclusion_value ==
          doctest::Approx(2.0 * (1.0 - 66.0 / 4356.0)).epsilon(1e-9));
    CHECK(report.threshold == doctest::Approx(0.5 / 8).epsilon(1e-15));
  }

  SUBCASE("a genuinely flat map is measured, branch recorded either way") {
    const auto F = phi_map(k, "phi:affine3", [](double t) { return 3.0 + t; });
    ConcentrationOptions options;
    options.seed = 5;
    options.random_pairs = 16;
    const InequalityReport report = check_concentration(*F, m, k, 1, 0.5, growth, options);
    const std::string branch = report.inputs.at("branch");
    CHECK((branch == "A" || branch == "B"));
    if (branch == "A") {
      CHECK(report.verdict == Verdict::HypothesisNotMet);
    } else {
      CHECK(report.verdict == Verdict::Pass);
    }
  }

  SUBCASE("q membership is enforced") {
    const auto F = const_uniform_map(k, l1_oracle());
    const std::vector<std::int64_t> off_q{19};
    const InequalityReport report = check_concentration(*F, off_q, k, 1, 0.5, growth);
    CHECK(report.verdict == Verdict::HypothesisNotMet);
    CHECK(report.failed_hypothesis == "q_membership");
  }

  SUBCASE("local property q reuses the same code path") {
    const auto F = const_uniform_map(k, l1_oracle());
    const InequalityReport report = check_local_property_q(*F, m, k, 1, 0.5, 0.125, growth);
    CHECK(report.checker == "local_property_q");
    CHECK(report.inputs.at("branch") == "B");
    CHECK(report.verdict == Verdict::Pass);
  }
}

TEST_CASE("map factories forward the grammar") {
  const MapFactory factory = map_factory("abs+normalize", l1_oracle());
  CHECK(factory.name == "abs+normalize");
  CHECK(factory.make(8)->dim() == 8);
  CHECK(factory.make(16)->name() == "abs+normalize");
}

TEST_CASE("separation through an explicit greedy partition") {
  // Exercises the dense witness construction and the per-index class scans.
  const auto oracle = l1_oracle();
  const Partition greedy = greedy_partition(oracle, 200);
  const GrowthSet growth = build_growth_set(oracle, greedy, 1, 1.0, 3);
  REQUIRE(growth.elements == std::vector<std::int64_t>{1, 11, 111});

  InterlacedPair pair{{1}, {11}, 112, growth};
  Profile u;
  u.a = {1.0};
  u.b = {-1.0};
  u.c = 0.0;

  const auto F = normalize_map(112, l1_oracle());
  const InequalityReport report = check_separation(*F, pair, u, greedy, 1.0);
  CHECK(report.verdict == Verdict::Pass);
  // x_m = +-e_1 patterns: F(x_m) = x_m, F(x_n) = x_n / 11, distance 2(1 - 1/11).
  CHECK(report.conclusion_value == doctest::Approx(20.0 / 11).epsilon(1e-12));
}

TEST_CASE("separation rejects a map of the wrong dimension") {
  const GrowthSet growth = build_growth_set(l1_oracle(), kEvens, 1, 0.5, 3);
  const InterlacedPair pair = canonical_pair(growth, 1, 362);
  const auto F = normalize_map(20, l1_oracle());
  CHECK_THROWS_AS(check_separation(*F, pair, staircase_profile(1), kEvens, 0.5), DimMismatch);
}

TEST_CASE("theorem 1.1 holds on lr targets") {
  const InequalityReport report =
      run_theorem_1_1(map_factory("normalize", l2_oracle()), l2_oracle(), 1);
  CHECK(report.verdict == Verdict::Pass);
  CHECK(report.inputs.at("k") == "362");  // a = 19^2
  // e_1 against 1_[1,361]/19 in l2: sqrt(684)/19.
  CHECK(report.conclusion_value == doctest::Approx(std::sqrt(684.0) / 19).epsilon(1e-12));
}

TEST_CASE("concentration at d=2 beyond the dense cap") {
  const GrowthSet growth = build_concentration_growth_set(l1_oracle(), kEvens, 2, 0.5, 6);
  const std::vector<std::int64_t> m{66, 66LL * 66 * 66};
  const std::int64_t k = growth.elements.back();  // 66^5, far beyond dense reach
  REQUIRE(k > kDenseCap);

  ConcentrationOptions options;
  options.seed = 17;
  const auto flat = const_uniform_map(k, l1_oracle());
  const InequalityReport report = check_concentration(*flat, m, k, 2, 0.5, growth, options);
  CHECK(report.inputs.at("branch") == "B");
  CHECK(report.verdict == Verdict::Pass);
  CHECK(report.conclusion_value <= 1e-12);

  const auto sharp = abs_wrapper(normalize_map(k, l1_oracle()));
  const InequalityReport refuted = check_concentration(*sharp, m, k, 2, 0.5, growth, options);
  CHECK(refuted.inputs.at("branch") == "A");
  CHECK(refuted.verdict == Verdict::HypothesisNotMet);
}

TEST_CASE("step preserving catalog maps send the ones vector to the normalized ones") {
  for (std::int64_t k : {4, 25, 1000}) {
    const PcpVector ones = PcpVector::constant(k, 1.0);
    for (const auto& [map, psi_k] :
         {std::pair{normalize_map(k, l1_oracle()), static_cast<double>(k)},
          std::pair{normalize_map(k, l2_oracle()), std::sqrt(static_cast<double>(k))},
          std::pair{integral_homeo(k), static_cast<double>(k)}}) {
      const PcpVector image = map->eval(ones);
      CHECK(sup_distance(image, PcpVector::constant(k, 1.0 / psi_k)) <= 1e-15);
    }
  }
}

TEST_CASE("run-length arithmetic is exact at k = 1e8") {
  const std::int64_t k = 100'000'000;
  const auto F = normalize_map(k, l1_oracle());
  const PcpVector e1(k, {{1, 1, 1.0, 1.0}, {2, k, 0.0, 0.0}});
  const double delta = 0.01;
  const double value = l1_oracle()->norm(subtract(F->eval(e1), F->eval(spike_vector(k, delta))));
  const double scale = 1.0 + (static_cast<double>(k) - 1.0) * delta;
  CHECK(value == doctest::Approx(2.0 * (1.0 - 1.0 / scale)).epsilon(1e-12));
  CHECK(value >= 1.0 - 1.0 / scale);
}

TEST_CASE("separation readouts satisfy the four block-shift bounds") {
  // The conclusion rests on the four shifted block sums staying below eps/4;
  // rebuild them from the reported readouts and check each one.
  const double eps = 0.5;
  for (int d : {2, 3}) {
    for (const char* map_name : {"normalize", "integral"}) {
      const GrowthSet growth = build_growth_set(l1_oracle(), kEvens, d, eps, 2 * d);
      const std::int64_t k = growth.elements.back() + 1;
      const InterlacedPair pair = canonical_pair(growth, d, k);
      const auto F = parse_map(map_name, k, l1_oracle());
      const InequalityReport report =
          check_separation(*F, pair, staircase_profile(d), kEvens, eps);
      REQUIRE(report.verdict == Verdict::Pass);
      REQUIRE(report.block_readouts.has_value());
      const BlockReadouts& b = *report.block_readouts;

      auto block_norm = [&](const std::vector<double>& coefs, bool in_p, bool m_to_n) {
        // m_to_n: blocks (m_{s-1}, n_{s-1}]; otherwise (n_{s-1}, m_s].
        std::vector<PcpSegment> segments;
        std::int64_t pos = 1;
        for (int s = 0; s < d; ++s) {
          const std::int64_t lo = m_to_n ? (s == 0 ? 0 : pair.m[static_cast<std::size_t>(s - 1)])
                                         : (s == 0 ? 0 : pair.n[static_cast<std::size_t>(s - 1)]);
          const std::int64_t hi = m_to_n ? (s == 0 ? 0 : pair.n[static_cast<std::size_t>(s - 1)])
                                         : pair.m[static_cast<std::size_t>(s)];
          if (hi <= lo) continue;
          const double coef = coefs[static_cast<std::size_t>(s)];
          if (std::isnan(coef)) continue;  // empty read slice implies empty block
          if (lo + 1 > pos) segments.push_back({pos, lo, 0.0, 0.0});
          segments.push_back({lo + 1, hi, in_p ? coef : 0.0, in_p ? 0.0 : coef});
          pos = hi + 1;
        }
        if (pos <= k) segments.push_back({pos, k, 0.0, 0.0});
        return l1_oracle()->norm(PcpVector(k, std::move(segments)));
      };

      CHECK(block_norm(b.alpha_m, true, true) <= eps / 4 + 1e-9);
      CHECK(block_norm(b.beta_m, false, true) <= eps / 4 + 1e-9);
      CHECK(block_norm(b.alpha_n, true, false) <= eps / 4 + 1e-9);
      CHECK(block_norm(b.beta_n, false, false) <= eps / 4 + 1e-9);
    }
  }
}

TEST_CASE("theorem 1.2 names the failure for positive-part-only maps") {
  const InequalityReport report =
      run_theorem_1_2(map_factory("integral", l1_oracle()), l1_oracle(), 1);
  CHECK(report.verdict == Verdict::HypothesisNotMet);
  CHECK(report.failed_hypothesis == "domain_covers_path");
}
