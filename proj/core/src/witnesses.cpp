#include "spheremaps/witnesses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace spheremaps {

namespace {

bool mul_overflows(std::int64_t a, std::int64_t b) {
  return a != 0 && b > std::numeric_limits<std::int64_t>::max() / a;
}

// 8 d^{1/q-1/p} / eps + 2, the psi multiplier of the growth condition.
double growth_factor(const NormOracle& oracle, int d, double eps) {
  const double exponent_gap =
      1.0 / oracle.block_q() - (std::isfinite(oracle.block_p()) ? 1.0 / oracle.block_p() : 0.0);
  return 8.0 * std::pow(static_cast<double>(d), exponent_gap) / eps + 2.0;
}

std::int64_t ceil_to_int(double x) {
  const double c = std::ceil(x - 1e-9);  // absorb rounding of pow just below an integer
  if (c >= 9.2e18) throw Error("growth base does not fit in 64 bits");
  return static_cast<std::int64_t>(c);
}

void require_strictly_increasing(std::span<const std::int64_t> m) {
  if (m.empty()) throw BadTuple("empty tuple");
  if (m.front() < 1) throw BadTuple("tuple entries must be >= 1");
  for (std::size_t i = 1; i < m.size(); ++i) {
    if (m[i] <= m[i - 1]) throw BadTuple("tuple is not strictly increasing");
  }
}

}  // namespace

Partition::Partition(Kind kind, std::string label, std::vector<bool> greedy_members)
    : kind_(kind), label_(std::move(label)), greedy_members_(std::move(greedy_members)) {}

Partition Partition::evens() { return Partition(Kind::Evens, "evens", {}); }

std::int64_t Partition::k_max() const {
  if (kind_ == Kind::Evens) return std::numeric_limits<std::int64_t>::max();
  return static_cast<std::int64_t>(greedy_members_.size()) - 1;
}

bool Partition::contains(std::int64_t i) const {
  if (kind_ == Kind::Evens) return i % 2 == 0;
  if (i < 1 || i > k_max()) {
    throw std::out_of_range("Partition::contains: index beyond the computed prefix");
  }
  return greedy_members_[static_cast<std::size_t>(i)];
}

bool Partition::hits_range(std::int64_t lo, std::int64_t hi, bool in_p) const {
  if (hi <= lo) return false;
  if (kind_ == Kind::Evens) {
    const std::int64_t count =
        in_p ? PcpVector::even_count(lo + 1, hi) : PcpVector::odd_count(lo + 1, hi);
    return count > 0;
  }
  for (std::int64_t i = lo + 1; i <= hi; ++i) {
    if (contains(i) == in_p) return true;
  }
  return false;
}

SupportSet Partition::members(std::int64_t k) const {
  SupportSet out{k, {}};
  for (std::int64_t i = 1; i <= k; ++i) {
    if (contains(i)) out.members.push_back(i);
  }
  return out;
}

Partition greedy_partition(std::shared_ptr<const NormOracle> oracle, std::int64_t k_max) {
  if (k_max < 2) throw std::invalid_argument("greedy_partition: k_max must be at least 2");
  std::vector<bool> members(static_cast<std::size_t>(k_max) + 1, false);
  members[1] = true;  // 1 -> P, 2 -> Pc by initialization

  const bool by_count = oracle->indicator_norm(1).has_value();
  if (by_count) {
    std::int64_t count_p = 1, count_pc = 1;
    for (std::int64_t k = 3; k <= k_max; ++k) {
      const bool to_p = *oracle->indicator_norm(count_p + 1) <= *oracle->indicator_norm(count_pc + 1);
      members[static_cast<std::size_t>(k)] = to_p;
      (to_p ? count_p : count_pc) += 1;
    }
    return Partition(Partition::Kind::Greedy, "greedy:" + oracle->name(), std::move(members));
  }

  if (k_max > kDenseCap) {
    throw DimensionTooLarge("greedy_partition: dense evaluation beyond the cap");
  }
  std::vector<double> in_p(static_cast<std::size_t>(k_max), 0.0);
  std::vector<double> in_pc(static_cast<std::size_t>(k_max), 0.0);
  in_p[0] = 1.0;
  in_pc[1] = 1.0;
  for (std::int64_t k = 3; k <= k_max; ++k) {
    in_p[static_cast<std::size_t>(k - 1)] = 1.0;
    const double with_p = oracle->norm(DenseVector(in_p));
    in_p[static_cast<std::size_t>(k - 1)] = 0.0;
    in_pc[static_cast<std::size_t>(k - 1)] = 1.0;
    const double with_pc = oracle->norm(DenseVector(in_pc));
    in_pc[static_cast<std::size_t>(k - 1)] = 0.0;
    const bool to_p = with_p <= with_pc;
    members[static_cast<std::size_t>(k)] = to_p;
    (to_p ? in_p : in_pc)[static_cast<std::size_t>(k - 1)] = 1.0;
  }
  return Partition(Partition::Kind::Greedy, "greedy:" + oracle->name(), std::move(members));
}

std::vector<double> partition_balance(const NormOracle& oracle, const Partition& partition,
                                      std::int64_t k_max) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(k_max));
  if (oracle.indicator_norm(1).has_value()) {
    std::int64_t count_p = 0, count_pc = 0;
    for (std::int64_t k = 1; k <= k_max; ++k) {
      (partition.contains(k) ? count_p : count_pc) += 1;
      out.push_back(std::fabs(*oracle.indicator_norm(count_p) - *oracle.indicator_norm(count_pc)));
    }
    return out;
  }
  if (k_max > kDenseCap) {
    throw DimensionTooLarge("partition_balance: dense evaluation beyond the cap");
  }
  std::vector<double> in_p(static_cast<std::size_t>(k_max), 0.0);
  std::vector<double> in_pc(static_cast<std::size_t>(k_max), 0.0);
  for (std::int64_t k = 1; k <= k_max; ++k) {
    (partition.contains(k) ? in_p : in_pc)[static_cast<std::size_t>(k - 1)] = 1.0;
    out.push_back(std::fabs(oracle.norm(DenseVector(in_p)) - oracle.norm(DenseVector(in_pc))));
  }
  return out;
}

double psi_partition(const NormOracle& oracle, const Partition& partition, std::int64_t k) {
  if (partition.is_evens()) return psi_partition_evens(oracle, k);
  if (oracle.indicator_norm(1).has_value()) {
    std::int64_t count_p = 0;
    for (std::int64_t i = 1; i <= k; ++i) {
      if (partition.contains(i)) ++count_p;
    }
    return std::min(*oracle.indicator_norm(count_p), *oracle.indicator_norm(k - count_p));
  }
  return spheremaps::psi_partition(oracle, partition.members(k), k);
}

namespace {

GrowthSet scan_growth_set(std::shared_ptr<const NormOracle> oracle, const Partition& partition,
                          int d, double eps, int count, double factor) {
  // Minimal admissible next element by doubling then bisecting on monotone psi.
  FundamentalFunction psi_fn(oracle);
  GrowthSet growth{oracle, d, eps, {1}, std::nullopt};
  const std::int64_t scan_cap = std::min<std::int64_t>(kDenseCap, partition.k_max());
  for (int j = 1; j < count; ++j) {
    const std::int64_t prev = growth.elements.back();
    const double target = factor * psi_fn(prev) + 1.0;
    auto admissible = [&](std::int64_t k) {
      return psi_fn(k) >= target - 1e-12 && partition.hits_range(prev, k, true) &&
             partition.hits_range(prev, k, false);
    };
    std::int64_t hi = prev + 1;
    while (hi <= scan_cap && !admissible(hi)) {
      if (mul_overflows(hi, 2)) throw OracleIsC0Like("growth scan overflow");
      hi = std::min<std::int64_t>(hi * 2, scan_cap + 1);
    }
    if (hi > scan_cap) {
      throw OracleIsC0Like("psi did not reach the growth target within the scan budget");
    }
    std::int64_t lo = prev + 1;
    while (lo < hi) {
      const std::int64_t mid = lo + (hi - lo) / 2;
      if (admissible(mid)) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    growth.elements.push_back(hi);
  }
  return growth;
}

GrowthSet power_growth_set(std::shared_ptr<const NormOracle> oracle, int d, double eps,
                           int count, std::int64_t a) {
  GrowthSet growth{std::move(oracle), d, eps, {}, a};
  std::int64_t element = 1;
  for (int j = 0; j < count; ++j) {
    growth.elements.push_back(element);
    if (j + 1 < count) {
      if (mul_overflows(element, a)) {
        throw NotEnoughElements("growth element overflows 64 bits at index " + std::to_string(j + 1));
      }
      element *= a;
    }
  }
  return growth;
}

}  // namespace

GrowthSet build_growth_set(std::shared_ptr<const NormOracle> oracle, const Partition& partition,
                           int d, double eps, int count) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("growth set: eps must be in (0,1]");
  if (d < 1 || count < 1) throw std::invalid_argument("growth set: d and count must be positive");
  if (oracle->is_c0_like()) {
    throw OracleIsC0Like("growth set: the oracle's fundamental function is bounded");
  }

  GrowthSet growth;
  if (oracle->r_exponent() && partition.is_evens()) {
    const double r = *oracle->r_exponent();
    growth = power_growth_set(oracle, d, eps, count, ceil_to_int(std::pow(8.0 / eps + 3.0, r)));
  } else {
    growth = scan_growth_set(oracle, partition, d, eps, count, growth_factor(*oracle, d, eps));
  }

  const double margin = growth_condition_margin(growth);
  if (margin < -1e-9) {
    throw Error("growth set construction violated its own growth condition (margin " +
                std::to_string(margin) + ")");
  }
  for (std::size_t j = 0; j + 1 < growth.elements.size(); ++j) {
    if (!partition.hits_range(growth.elements[j], growth.elements[j + 1], true) ||
        !partition.hits_range(growth.elements[j], growth.elements[j + 1], false)) {
      throw Error("growth gap misses a partition class");
    }
  }
  return growth;
}

GrowthSet build_concentration_growth_set(std::shared_ptr<const NormOracle> oracle,
                                         const Partition& partition, int d, double eps, int count) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("growth set: eps must be in (0,1]");
  if (oracle->is_c0_like()) {
    throw OracleIsC0Like("growth set: the oracle's fundamental function is bounded");
  }
  if (oracle->r_exponent() && partition.is_evens()) {
    const double r = *oracle->r_exponent();
    return power_growth_set(oracle, d, eps, count, ceil_to_int(std::pow(32.0 / eps + 2.0, r)));
  }
  // General oracles: scan at the level the concentration argument consumes,
  // which is the growth condition at eps/4.
  return scan_growth_set(oracle, partition, d, eps, count,
                         growth_factor(*oracle, d, eps / 4.0));
}

double growth_condition_margin(const GrowthSet& growth) {
  const NormOracle& oracle = *growth.oracle;
  const double factor = growth_factor(oracle, growth.d, growth.eps);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < growth.elements.size(); ++j) {
    const double lhs = oracle.psi(growth.elements[j + 1]);
    const double rhs = factor * oracle.psi(growth.elements[j]) + 1.0;
    margin = std::min(margin, lhs - rhs);
  }
  return margin;
}

void Profile::validate() const {
  if (a.size() != b.size() || a.empty()) {
    throw std::invalid_argument("Profile: a and b must have equal positive length");
  }
  double sup = std::fabs(c);
  for (double v : a) sup = std::max(sup, std::fabs(v));
  for (double v : b) sup = std::max(sup, std::fabs(v));
  if (std::fabs(sup - 1.0) > 1e-12) {
    throw std::invalid_argument("Profile: sup norm must be 1, got " + std::to_string(sup));
  }
}

Profile staircase_profile(int d) {
  Profile u;
  u.a.resize(static_cast<std::size_t>(d));
  for (int s = 1; s <= d; ++s) {
    u.a[static_cast<std::size_t>(s - 1)] = 1.0 - static_cast<double>(s - 1) / d;
  }
  u.b = u.a;
  u.c = 0.0;
  return u;
}

Profile y_profile(int d) {
  Profile u = staircase_profile(d);
  for (double& v : u.b) v = -v;
  return u;
}

void InterlacedPair::validate() const {
  if (m.size() != n.size() || m.empty()) throw BadTuple("interlaced pair: size mismatch");
  std::int64_t prev = 0;
  for (std::size_t s = 0; s < m.size(); ++s) {
    if (m[s] <= prev || n[s] <= m[s]) throw BadTuple("interlaced pair: not interlacing");
    prev = n[s];
  }
  if (k <= n.back()) throw BadTuple("interlaced pair: k must exceed n_d");
  for (std::size_t s = 0; s < m.size(); ++s) {
    const auto& e = growth.elements;
    if (std::find(e.begin(), e.end(), m[s]) == e.end() ||
        std::find(e.begin(), e.end(), n[s]) == e.end()) {
      throw BadTuple("interlaced pair: tuple entry not drawn from the growth set");
    }
  }
}

PcpVector staircase_z(std::span<const std::int64_t> m, std::int64_t k) {
  require_strictly_increasing(m);
  if (k < m.back()) throw BadTuple("staircase_z: k must be at least m_d");
  const int d = static_cast<int>(m.size());
  std::vector<PcpSegment> segments;
  segments.reserve(m.size() + 1);
  std::int64_t prev = 0;
  for (int s = 1; s <= d; ++s) {
    const double value = 1.0 - static_cast<double>(s - 1) / d;
    segments.push_back({prev + 1, m[static_cast<std::size_t>(s - 1)], value, value});
    prev = m[static_cast<std::size_t>(s - 1)];
  }
  if (prev < k) segments.push_back({prev + 1, k, 0.0, 0.0});
  return PcpVector(k, std::move(segments));
}

PcpVector witness_x(std::span<const std::int64_t> m, const Profile& u, std::int64_t k,
                    const Partition& partition) {
  require_strictly_increasing(m);
  u.validate();
  if (static_cast<int>(m.size()) != u.d()) throw BadTuple("witness_x: tuple/profile size mismatch");
  if (k <= m.back()) throw BadTuple("witness_x: k must exceed m_d");

  if (partition.is_evens()) {
    std::vector<PcpSegment> segments;
    segments.reserve(m.size() + 1);
    std::int64_t prev = 0;
    for (std::size_t s = 0; s < m.size(); ++s) {
      segments.push_back({prev + 1, m[s], u.a[s], u.b[s]});
      prev = m[s];
    }
    segments.push_back({prev + 1, k, u.c, u.c});
    return PcpVector(k, std::move(segments));
  }

  if (k > kDenseCap) {
    throw DimensionTooLarge("witness_x: explicit partition beyond the dense cap");
  }
  std::vector<double> coords(static_cast<std::size_t>(k), u.c);
  std::int64_t prev = 0;
  for (std::size_t s = 0; s < m.size(); ++s) {
    for (std::int64_t i = prev + 1; i <= m[s]; ++i) {
      coords[static_cast<std::size_t>(i - 1)] = partition.contains(i) ? u.a[s] : u.b[s];
    }
    prev = m[s];
  }
  return PcpVector::encode(DenseVector(std::move(coords)));
}

PcpVector witness_y(std::span<const std::int64_t> m, std::int64_t k, const Partition& partition) {
  return witness_x(m, y_profile(static_cast<int>(m.size())), k, partition);
}

PcpVector spike_vector(std::int64_t k, double delta) {
  if (k < 2) throw std::invalid_argument("spike_vector: k must be at least 2");
  return PcpVector(k, {{1, 1, delta, 1.0}, {2, k, delta, delta}});
}

std::vector<InterlacedPair> enumerate_interlaced(const GrowthSet& growth, int d,
                                                 std::int64_t k_budget, InterlaceMode mode) {
  std::vector<std::int64_t> below;
  for (std::int64_t e : growth.elements) {
    if (e < k_budget) below.push_back(e);
  }
  const int need = 2 * d;
  if (static_cast<int>(below.size()) < need) {
    throw NotEnoughElements("enumerate_interlaced: need " + std::to_string(need) +
                            " growth elements below the budget, have " +
                            std::to_string(below.size()));
  }

  auto make_pair = [&](std::span<const std::int64_t> chosen) {
    InterlacedPair pair;
    pair.growth = growth;
    pair.k = k_budget;
    for (int s = 0; s < d; ++s) {
      pair.m.push_back(chosen[static_cast<std::size_t>(2 * s)]);
      pair.n.push_back(chosen[static_cast<std::size_t>(2 * s + 1)]);
    }
    pair.validate();
    return pair;
  };

  std::vector<InterlacedPair> pairs;
  if (mode == InterlaceMode::Consecutive) {
    pairs.push_back(make_pair(std::span(below).first(static_cast<std::size_t>(need))));
    return pairs;
  }

  // One interlaced pair per 2d-subset of the admissible elements.
  std::vector<int> idx(static_cast<std::size_t>(need));
  for (int i = 0; i < need; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::vector<std::int64_t> chosen(static_cast<std::size_t>(need));
  while (true) {
    for (int i = 0; i < need; ++i) {
      chosen[static_cast<std::size_t>(i)] = below[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    }
    pairs.push_back(make_pair(chosen));
    int pos = need - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] ==
                           static_cast<int>(below.size()) - need + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < need; ++i) {
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return pairs;
}

PathPhi::PathPhi(std::vector<std::int64_t> m, std::int64_t k, const Partition& partition)
    : m_(std::move(m)),
      k_(k),
      y_(witness_y(m_, k, partition)),
      y_profile_(y_profile(static_cast<int>(m_.size()))) {}

PcpVector PathPhi::operator()(double t) const {
  if (t < -1e-12 || t > 1.0 + 1e-12) throw std::domain_error("PathPhi: t must lie in [0,1]");
  if (t <= 0.5) {
    const double w = 2.0 * t;  // (1-w) * ones + w * y
    return map_segments(y_, [w](double v) { return (1.0 - w) + w * v; });
  }
  const double w = 2.0 * t - 1.0;  // (1-w) * y + w * (-ones)
  return map_segments(y_, [w](double v) { return (1.0 - w) * v - w; });
}

Profile PathPhi::profile_at(double t) const {
  Profile u = y_profile_;
  auto blend = [t](double v) {
    if (t <= 0.5) {
      const double w = 2.0 * t;
      return (1.0 - w) + w * v;
    }
    const double w = 2.0 * t - 1.0;
    return (1.0 - w) * v - w;
  };
  for (double& v : u.a) v = blend(v);
  for (double& v : u.b) v = blend(v);
  u.c = blend(u.c);
  return u;
}

PathPhi path_phi(std::span<const std::int64_t> m, std::int64_t k, const Partition& partition) {
  require_strictly_increasing(m);
  if (k <= m.back()) throw BadTuple("path_phi: k must exceed m_d");
  return PathPhi(std::vector<std::int64_t>(m.begin(), m.end()), k, partition);
}

namespace {

// Common value of F on the tail block (m_d, dim]; throws if the image is not
// constant there (F failed step preservation on a block-constant input).
double tail_value(const SphereMap& map, const PcpVector& x, std::int64_t m_d) {
  const PcpVector y =
      map.pcp_capable() ? map.eval(x) : PcpVector::encode(map.eval(x.materialize()));
  double value = 0.0;
  bool seen = false;
  auto take = [&](double v) {
    if (seen && std::fabs(v - value) > 1e-9) {
      throw HypothesisViolated("tail block image is not constant; map is not step preserving");
    }
    value = v;
    seen = true;
  };
  for (const PcpSegment& s : y.segments()) {
    if (s.hi <= m_d) continue;
    const std::int64_t lo = std::max(s.lo, m_d + 1);
    if (PcpVector::even_count(lo, s.hi) > 0) take(s.val_even);
    if (PcpVector::odd_count(lo, s.hi) > 0) take(s.val_odd);
  }
  if (!seen) throw HypothesisViolated("empty tail block");
  return value;
}

}  // namespace

TailZeroResult find_tail_zero(const SphereMap& map, const PathPhi& path, std::int64_t m_d,
                              std::int64_t k, double tol, int max_iterations) {
  if (k != path.k()) throw DimMismatch("find_tail_zero: k differs from the path's dimension");
  auto g = [&](double t) { return tail_value(map, path(t), m_d); };

  bool sign_flipped = false;
  auto finish = [&](double t, double value, int iterations) {
    return TailZeroResult{t, value, path.profile_at(t), path(t), iterations, sign_flipped};
  };

  const double g0 = g(0.0);
  const double g1 = g(1.0);
  if (std::fabs(g0) <= tol) return finish(0.0, g0, 0);
  if (std::fabs(g1) <= tol) return finish(1.0, g1, 0);
  if ((g0 > 0.0) == (g1 > 0.0)) {
    throw NoSignChange("tail values at the path endpoints have the same sign (" +
                       std::to_string(g0) + ", " + std::to_string(g1) + ")");
  }
  sign_flipped = g0 < 0.0;
  const double flip = sign_flipped ? -1.0 : 1.0;

  double lo = 0.0, hi = 1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if (std::fabs(gm) <= tol) return finish(mid, gm, it);
    if (flip * gm > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw RootNotFound("bisection did not reach the tail tolerance within " +
                     std::to_string(max_iterations) + " iterations");
}

}  // namespace spheremaps
