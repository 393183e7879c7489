#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spheremaps/norms.hpp"
#include "spheremaps/report.hpp"
#include "spheremaps/vectors.hpp"

namespace spheremaps {

/// Structural properties a map declares about itself. Declarations are never
/// trusted by the analysis checkers, which re-verify what they need on the
/// vectors they actually use.
struct MapProps {
  bool step_preserving = false;
  bool support_preserving = false;
  bool non_increasing_support = false;
  bool permutation_equivariant = false;
  bool continuous = false;
};

/// A map between unit spheres with a uniform evaluation contract. The domain
/// is the sphere of domain_oracle (linf for everything except the Mazur maps
/// and the inverse integral homeomorphism) and the image lies on the sphere of
/// target_oracle.
class SphereMap {
 public:
  virtual ~SphereMap() = default;

  const std::string& name() const { return name_; }
  std::int64_t dim() const { return dim_; }
  const std::shared_ptr<const NormOracle>& domain_oracle() const { return domain_; }
  const std::shared_ptr<const NormOracle>& target_oracle() const { return target_; }
  const MapProps& declared() const { return props_; }
  bool pcp_capable() const { return pcp_capable_; }
  /// True when the map is defined only on the positive part of its domain
  /// sphere (the integral homeomorphism and its inverse).
  bool positive_domain() const { return positive_domain_; }

  virtual DenseVector eval(const DenseVector& x) const = 0;
  virtual PcpVector eval(const PcpVector& x) const;

 protected:
  SphereMap(std::string name, std::int64_t dim, std::shared_ptr<const NormOracle> domain,
            std::shared_ptr<const NormOracle> target, MapProps props, bool pcp_capable,
            bool positive_domain = false);

 private:
  std::string name_;
  std::int64_t dim_;
  std::shared_ptr<const NormOracle> domain_;
  std::shared_ptr<const NormOracle> target_;
  MapProps props_;
  bool pcp_capable_;
  bool positive_domain_;
};

using SphereMapPtr = std::shared_ptr<const SphereMap>;

/// x -> x / |x|_X. Step and support preserving, equivariant, continuous.
SphereMapPtr normalize_map(std::int64_t k, std::shared_ptr<const NormOracle> oracle);

/// x -> (phi(x_i) / sum_j |phi(x_j)|)_i into the l1 sphere, one shared scalar
/// function: step preserving, and support non-increasing iff phi(0) == 0.
SphereMapPtr phi_map(std::int64_t k, std::string label, std::function<double(double)> phi,
                     bool continuous = true);

/// Same with per-coordinate functions; not declared step preserving.
SphereMapPtr phi_map(std::int64_t k, std::string label,
                     std::vector<std::function<double(double)>> phis, bool continuous = true);

/// The level-set averaging homeomorphism from the positive part of the linf
/// sphere onto the positive part of the l1 sphere, evaluated exactly as a
/// finite sum over the distinct coordinate values.
SphereMapPtr integral_homeo(std::int64_t k);

/// Its inverse, from the positive l1 sphere back to the positive linf sphere.
SphereMapPtr integral_homeo_inverse(std::int64_t k);

/// Mazur map S_{lp} -> S_{l2}, coordinate-wise sign(x)|x|^{p/2}.
SphereMapPtr mazur_map(double p, std::int64_t k);

/// Its inverse S_{l2} -> S_{lp}, coordinate-wise sign(y)|y|^{2/p}.
SphereMapPtr mazur_map_inverse(double p, std::int64_t k);

/// x -> 1_{[1,k]} / psi(k). Step preserving, never support preserving.
SphereMapPtr const_uniform_map(std::int64_t k, std::shared_ptr<const NormOracle> oracle);

/// x -> (|F_1(x)|, ..., |F_k(x)|); image in the positive part. Requires a
/// 1-unconditional target, preserves step/support flags.
SphereMapPtr abs_wrapper(SphereMapPtr inner);

struct SymmetrizeMode {
  static SymmetrizeMode exact() { return {true, 0, 0}; }
  static SymmetrizeMode sampled(int samples, std::uint64_t seed) { return {false, samples, seed}; }

  bool exact_mode = true;
  int samples = 0;
  std::uint64_t seed = 0;
};

/// Permutation average G = (1/|S|) sum_pi P_{pi^-1} F P_pi over all of Per_k
/// (exact mode, k <= 8) or a seeded sample of it. Requires the image of F in
/// the positive l1 facet.
SphereMapPtr symmetrize(SphereMapPtr inner, SymmetrizeMode mode);

/// Parses the CLI map grammar: optional "abs+", "sym(exact)+", "sym(n,seed)+"
/// prefixes on a base of "normalize", "integral", "integral-inverse",
/// "phi:<t|t2|t3|one>", "mazur:<p>", "const-uniform".
SphereMapPtr parse_map(const std::string& spec, std::int64_t k,
                       std::shared_ptr<const NormOracle> target);

// --- structural property checkers ---------------------------------------

/// Equal input coordinates (within 1e-12) must map to equal output
/// coordinates (within tol).
InequalityReport check_step_preserving(const SphereMap& map, std::span<const DenseVector> samples,
                                       double tol);
InequalityReport check_step_preserving(const SphereMap& map, const PcpVector& sample, double tol);

InequalityReport check_support_preserving(const SphereMap& map, std::span<const DenseVector> samples,
                                          double tol);
InequalityReport check_support_preserving(const SphereMap& map, const PcpVector& sample, double tol);

InequalityReport check_non_increasing_support(const SphereMap& map,
                                              std::span<const DenseVector> samples, double tol);
InequalityReport check_non_increasing_support(const SphereMap& map, const PcpVector& sample,
                                              double tol);

/// Samples random sphere points and permutations; confirms equivariance and
/// step preservation together. An equivariance-pass/step-fail outcome is
/// reported as a Fail with failed_hypothesis "equivariant_but_not_step", a
/// contradiction signalling a bug in the harness itself.
InequalityReport check_equivariance_implies_step(const SphereMap& map, int trials,
                                                 std::uint64_t seed);

/// Applies a coordinate permutation, (P_pi x)_j = x_{pi(j)} with pi given
/// 0-based. Shared by checkers and tests.
DenseVector apply_permutation(const DenseVector& x, std::span<const std::int64_t> pi);

}  // namespace spheremaps
