#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spheremaps/maps.hpp"
#include "spheremaps/norms.hpp"
#include "spheremaps/report.hpp"
#include "spheremaps/witnesses.hpp"

namespace spheremaps {

/// Builds the same family of maps at any dimension, so theorem drivers can
/// pick k from the growth set they construct.
struct MapFactory {
  std::string name;
  std::function<SphereMapPtr(std::int64_t k)> make;
};

/// Factory from the CLI map grammar.
MapFactory map_factory(const std::string& spec, std::shared_ptr<const NormOracle> target);

struct PairGrid {
  std::vector<std::pair<PcpVector, PcpVector>> pcp;
  std::vector<std::pair<DenseVector, DenseVector>> dense;

  std::int64_t size() const {
    return static_cast<std::int64_t>(pcp.size()) + static_cast<std::int64_t>(dense.size());
  }
};

/// All exhaustive interlaced staircase pairs below the budget.
PairGrid staircase_pairs(const GrowthSet& growth, int d, std::int64_t k_budget);

/// The single pair (e_1, e_1 + delta 1_{[2,k]}).
PairGrid spike_pair(std::int64_t k, double delta);

/// Seeded random pairs on the domain sphere at sup distance <= t. For the
/// linf domain the pinned coordinate keeps both points on the sphere exactly;
/// other domains renormalize and keep whatever distance results.
PairGrid random_sphere_pairs(const NormOracle& domain, std::int64_t k, double t, int count,
                             std::uint64_t seed, bool positive_part);

/// Best image distance over all pairs at domain distance <= t: a certified
/// lower bound on the modulus of uniform continuity at t, never the value.
ModulusEstimate modulus_lower_bound(const SphereMap& map, double t, const PairGrid& pairs);

enum class QChoice { P, Pc };

/// The two block-shift implications: a premise of norm at most 1 on the
/// Q-slices forces the shifted interval sums below eps/4.
InequalityReport check_lemma32(const NormOracle& oracle, const Partition& partition,
                               const GrowthSet& growth, std::span<const std::int64_t> m,
                               std::span<const std::int64_t> n, std::span<const double> lambdas,
                               QChoice q, int implication, double eps);

struct SeparationOptions {
  double strict_margin = 1e-9;  // required slack for strict ">" conclusions
  double tail_tol = 1e-9;       // |F_i| on the tail block must stay below this
  double step_tol = 1e-9;
};

/// The separation inequality: a step preserving map vanishing on the tail of
/// x(m,u,k) sends the interlaced witnesses at least 1-eps apart.
InequalityReport check_separation(const SphereMap& map, const InterlacedPair& pair,
                                  const Profile& u, const Partition& partition, double eps,
                                  const SeparationOptions& options = {});

enum class ProofRoute { Direct, AbsSymmetrize };

struct TheoremOptions {
  double eps = 0.5;
  std::optional<std::int64_t> k_override;  // default: minimal a^{2d-1}+1
  ProofRoute route = ProofRoute::Direct;
  int symmetrize_samples = 64;
  std::uint64_t seed = 0;
};

/// Support preserving maps move interlaced staircases at least 1-eps apart
/// while the staircases sit only 1/d apart; checked on every exhaustive pair
/// below k.
InequalityReport run_theorem_1_1(const MapFactory& factory,
                                 std::shared_ptr<const NormOracle> oracle, int d,
                                 const TheoremOptions& options = {});

/// The path pipeline for continuous step preserving maps separating the two
/// constant vectors: root-find the tail zero along the path at m, recover the
/// profile, and run the separation check against n with the same profile.
InequalityReport run_theorem_1_2(const MapFactory& factory,
                                 std::shared_ptr<const NormOracle> oracle, int d,
                                 const TheoremOptions& options = {});

struct ConcentrationOptions {
  std::uint64_t seed = 0;
  int random_pairs = 64;
  /// Modulus hypothesis threshold; defaults to eps/8, the local-Property-Q
  /// certificate passes gamma*eps instead.
  std::optional<double> modulus_threshold;
};

/// Two-branch concentration verdict: either a witness pair refutes the
/// modulus hypothesis (branch A, hypothesis_not_met), or no refutation is
/// found and the image of the staircase must sit within eps of the
/// normalized ones vector (branch B).
InequalityReport check_concentration(const SphereMap& map, std::span<const std::int64_t> m,
                                     std::int64_t k, int d, double eps, const GrowthSet& growth,
                                     const ConcentrationOptions& options = {});

/// Definition-style per-instance certificate: check_concentration with the
/// modulus threshold gamma * eps.
InequalityReport check_local_property_q(const SphereMap& map, std::span<const std::int64_t> m,
                                        std::int64_t k, int d, double eps, double gamma,
                                        const GrowthSet& growth,
                                        const ConcentrationOptions& options = {});

}  // namespace spheremaps
