#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spheremaps/maps.hpp"
#include "spheremaps/norms.hpp"
#include "spheremaps/vectors.hpp"

namespace spheremaps {

/// A two-class balanced partition of {1..k}: the fixed parity rule P = 2N, or
/// the greedy prefix-balanced partition computed for a concrete oracle.
class Partition {
 public:
  enum class Kind { Evens, Greedy };

  static Partition evens();

  Kind kind() const { return kind_; }
  bool is_evens() const { return kind_ == Kind::Evens; }
  /// Largest index with decided membership (unbounded for the parity rule).
  std::int64_t k_max() const;

  /// True iff i belongs to P.
  bool contains(std::int64_t i) const;

  /// True iff (lo, hi] meets P (in_p) or its complement (in_p = false).
  bool hits_range(std::int64_t lo, std::int64_t hi, bool in_p) const;

  /// Members of P inside [1, k] as an explicit set.
  SupportSet members(std::int64_t k) const;

  const std::string& label() const { return label_; }

 private:
  friend Partition greedy_partition(std::shared_ptr<const NormOracle>, std::int64_t);

  Partition(Kind kind, std::string label, std::vector<bool> greedy_members);

  Kind kind_;
  std::string label_;
  std::vector<bool> greedy_members_;  // 1-based membership, Greedy kind only
};

/// Runs the greedy admission rule: k joins P iff adding it to P's prefix does
/// not make P's indicator norm exceed the complement's (ties go to P; 1 is
/// forced into P and 2 into the complement).
Partition greedy_partition(std::shared_ptr<const NormOracle> oracle, std::int64_t k_max);

/// | norm(1_{[1,k] cap P}) - norm(1_{[1,k] cap Pc}) | for k = 1..k_max.
std::vector<double> partition_balance(const NormOracle& oracle, const Partition& partition,
                                      std::int64_t k_max);

/// psi_P(k) for the given partition (closed form for parity, dense otherwise).
double psi_partition(const NormOracle& oracle, const Partition& partition, std::int64_t k);

/// Integer sequence along which psi multiplies by at least 8 d^{1/q-1/p}/eps + 2
/// at each step, with both partition classes meeting every gap.
struct GrowthSet {
  std::shared_ptr<const NormOracle> oracle;
  int d = 0;
  double eps = 0.0;
  std::vector<std::int64_t> elements;            // strictly increasing
  std::optional<std::int64_t> base_a;            // set when elements = a^{j-1}
};

/// Growth set for the separation checkers: closed form a = ceil((8/eps + 3)^r)
/// for lr oracles with the parity partition, otherwise a minimal upward scan.
/// Validates the growth condition and gap intersections.
GrowthSet build_growth_set(std::shared_ptr<const NormOracle> oracle, const Partition& partition,
                           int d, double eps, int count);

/// Concentration-flavoured growth set with a = ceil((32/eps + 2)^r); the
/// concentration checker validates the ratio conditions it actually uses.
GrowthSet build_concentration_growth_set(std::shared_ptr<const NormOracle> oracle,
                                         const Partition& partition, int d, double eps, int count);

/// Smallest margin of the growth condition over consecutive elements
/// (nonnegative means the condition holds).
double growth_condition_margin(const GrowthSet& growth);

/// Coefficient profile u = ((a_s), (b_s), c) on the sup sphere of dimension 2d+1.
struct Profile {
  std::vector<double> a;
  std::vector<double> b;
  double c = 0.0;

  int d() const { return static_cast<int>(a.size()); }
  void validate() const;
};

/// a_s = b_s = 1 - (s-1)/d, c = 0: the profile whose witness is the staircase.
Profile staircase_profile(int d);
/// a_s = 1 - (s-1)/d, b_s = -1 + (s-1)/d, c = 0: descending on P, ascending on Pc.
Profile y_profile(int d);

/// Tuples m, n interlacing as m_1 < n_1 < ... < m_d < n_d < k, both drawn from
/// the declared growth set.
struct InterlacedPair {
  std::vector<std::int64_t> m;
  std::vector<std::int64_t> n;
  std::int64_t k = 0;
  GrowthSet growth;

  int d() const { return static_cast<int>(m.size()); }
  void validate() const;
};

/// The staircase descending from 1 to 0 in d equal steps over the blocks cut
/// by m, zero on (m_d, k].
PcpVector staircase_z(std::span<const std::int64_t> m, std::int64_t k);

/// sum_s a_s 1_{(m_{s-1},m_s] cap P} + sum_s b_s 1_{(m_{s-1},m_s] cap Pc} + c 1_{(m_d,k]}.
PcpVector witness_x(std::span<const std::int64_t> m, const Profile& u, std::int64_t k,
                    const Partition& partition);

/// witness_x at the y-profile: a staircase descending on P, ascending on Pc.
PcpVector witness_y(std::span<const std::int64_t> m, std::int64_t k, const Partition& partition);

/// The non-equicontinuity probe e_1 + delta * 1_{[2,k]}.
PcpVector spike_vector(std::int64_t k, double delta);

enum class InterlaceMode { Consecutive, Exhaustive };

/// Interlaced pairs drawn from growth elements strictly below k_budget, with
/// k = k_budget. Consecutive: the single alternating assignment of the first
/// 2d elements. Exhaustive: one pair per 2d-subset.
std::vector<InterlacedPair> enumerate_interlaced(const GrowthSet& growth, int d,
                                                 std::int64_t k_budget,
                                                 InterlaceMode mode = InterlaceMode::Consecutive);

/// The two-segment path (1,...,1) -> y(m) -> (-1,...,-1), affine on [0,1/2]
/// and [1/2,1]; every point is block constant and stays on the sup sphere.
class PathPhi {
 public:
  PathPhi(std::vector<std::int64_t> m, std::int64_t k, const Partition& partition);

  PcpVector operator()(double t) const;
  /// The coefficient profile of the point at parameter t.
  Profile profile_at(double t) const;

  const PcpVector& y_vector() const { return y_; }
  std::int64_t k() const { return k_; }
  std::span<const std::int64_t> m() const { return m_; }

 private:
  std::vector<std::int64_t> m_;
  std::int64_t k_;
  PcpVector y_;
  Profile y_profile_;
};

PathPhi path_phi(std::span<const std::int64_t> m, std::int64_t k, const Partition& partition);

struct TailZeroResult {
  double t_root = 0.0;
  double tail_value = 0.0;  // F's common tail coordinate at the root
  Profile u;                // recovered coefficient profile at the root
  PcpVector x_root;
  int iterations = 0;
  bool sign_flipped = false;  // true when F was replaced by -F for the search
};

/// Bisection for the parameter where the common tail coordinate of F along
/// the path vanishes. Requires a continuous step preserving F whose tail
/// values at the endpoints straddle zero.
TailZeroResult find_tail_zero(const SphereMap& map, const PathPhi& path, std::int64_t m_d,
                              std::int64_t k, double tol = 1e-12, int max_iterations = 200);

}  // namespace spheremaps
