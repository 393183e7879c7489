#include "spheremaps/maps.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <unordered_map>
#include <utility>

#include "spheremaps/rng.hpp"

namespace spheremaps {

namespace {

double signed_power(double x, double e) {
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::fabs(x), e), x);
}

// Distinct positive coordinate values with multiplicities, descending.
// Coordinates in [-neg_tol, 0) are treated as zero; anything lower throws.
std::vector<std::pair<double, std::int64_t>> positive_levels(
    std::vector<std::pair<double, std::int64_t>> slots, double neg_tol) {
  std::vector<std::pair<double, std::int64_t>> levels;
  levels.reserve(slots.size());
  for (auto& [value, count] : slots) {
    if (count <= 0) continue;
    if (value < -neg_tol) {
      throw NotInPositivePart("coordinate " + std::to_string(value) +
                              " is negative beyond tolerance");
    }
    if (value > 0.0) levels.emplace_back(value, count);
  }
  std::sort(levels.begin(), levels.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (out > 0 && levels[out - 1].first == levels[i].first) {
      levels[out - 1].second += levels[i].second;
    } else {
      levels[out++] = levels[i];
    }
  }
  levels.resize(out);
  return levels;
}

using ValueMap = std::unordered_map<double, double>;

double lookup(const ValueMap& m, double value) {
  if (value <= 0.0) return 0.0;
  return m.at(value);
}

}  // namespace

SphereMap::SphereMap(std::string name, std::int64_t dim, std::shared_ptr<const NormOracle> domain,
                     std::shared_ptr<const NormOracle> target, MapProps props, bool pcp_capable,
                     bool positive_domain)
    : name_(std::move(name)),
      dim_(dim),
      domain_(std::move(domain)),
      target_(std::move(target)),
      props_(props),
      pcp_capable_(pcp_capable),
      positive_domain_(positive_domain) {
  if (dim_ < 1) throw std::invalid_argument("SphereMap: dim must be positive");
}

PcpVector SphereMap::eval(const PcpVector&) const {
  throw NotPcpCapable(name_ + ": exact PcpVector evaluation is not available");
}

namespace {

class NormalizeMap final : public SphereMap {
 public:
  NormalizeMap(std::int64_t k, std::shared_ptr<const NormOracle> oracle)
      : SphereMap("normalize", k, linf_oracle(), oracle,
                  MapProps{.step_preserving = true,
                           .support_preserving = true,
                           .non_increasing_support = true,
                           .permutation_equivariant = oracle->symmetric(),
                           .continuous = true},
                  /*pcp_capable=*/true) {}

  DenseVector eval(const DenseVector& x) const override {
    const double n = target_norm_or_throw(target_oracle()->norm(x));
    std::vector<double> out(x.values().begin(), x.values().end());
    for (double& v : out) v /= n;
    return DenseVector(std::move(out));
  }

  PcpVector eval(const PcpVector& x) const override {
    const double n = target_norm_or_throw(target_oracle()->norm(x));
    return map_segments(x, [n](double v) { return v / n; });
  }

 private:
  static double target_norm_or_throw(double n) {
    if (n < 1e-300) throw std::invalid_argument("normalize: zero vector");
    return n;
  }
};

class PhiMap final : public SphereMap {
 public:
  // Shared scalar function: step preserving and equivariant.
  PhiMap(std::int64_t k, std::string label, std::function<double(double)> phi, bool continuous)
      : SphereMap(std::move(label), k, linf_oracle(), l1_oracle(),
                  MapProps{.step_preserving = true,
                           .support_preserving = false,
                           .non_increasing_support = phi(0.0) == 0.0,
                           .permutation_equivariant = true,
                           .continuous = continuous},
                  /*pcp_capable=*/true),
        shared_(std::move(phi)) {}

  // Per-coordinate functions: no step preservation declared.
  PhiMap(std::int64_t k, std::string label, std::vector<std::function<double(double)>> phis,
         bool continuous)
      : SphereMap(std::move(label), k, linf_oracle(), l1_oracle(),
                  MapProps{.step_preserving = false,
                           .support_preserving = false,
                           .non_increasing_support = all_zero_at_zero(phis),
                           .permutation_equivariant = false,
                           .continuous = continuous},
                  /*pcp_capable=*/false),
        per_coord_(std::move(phis)) {
    if (static_cast<std::int64_t>(per_coord_.size()) != k) {
      throw std::invalid_argument("phi_map: need one function per coordinate");
    }
  }

  DenseVector eval(const DenseVector& x) const override {
    std::vector<double> out(static_cast<std::size_t>(x.dim()));
    long double denom = 0.0L;
    for (std::int64_t i = 1; i <= x.dim(); ++i) {
      const double v = shared_ ? shared_(x.at(i)) : per_coord_[static_cast<std::size_t>(i - 1)](x.at(i));
      out[static_cast<std::size_t>(i - 1)] = v;
      denom += std::fabs(v);
    }
    if (denom < 1e-12) throw DegenerateDenominator("phi map denominator vanished");
    const double d = static_cast<double>(denom);
    for (double& v : out) v /= d;
    return DenseVector(std::move(out));
  }

  PcpVector eval(const PcpVector& x) const override {
    if (!shared_) return SphereMap::eval(x);
    PcpVector mapped = map_segments(x, [this](double v) { return shared_(v); });
    const double denom = l1_oracle()->norm(mapped);
    if (denom < 1e-12) throw DegenerateDenominator("phi map denominator vanished");
    return map_segments(mapped, [denom](double v) { return v / denom; });
  }

 private:
  static bool all_zero_at_zero(const std::vector<std::function<double(double)>>& phis) {
    return std::all_of(phis.begin(), phis.end(), [](const auto& f) { return f(0.0) == 0.0; });
  }

  std::function<double(double)> shared_;
  std::vector<std::function<double(double)>> per_coord_;
};

// The integrand of the level-set map is piecewise constant in the level r
// with breakpoints at the distinct coordinate values, so the integral is the
// finite sum f(w_t) = sum_{tau >= t} (w_tau - w_{tau+1}) / c_tau over levels
// w_1 > ... > w_L > 0 with cumulative counts c_tau, w_{L+1} = 0.
ValueMap integral_value_map(std::vector<std::pair<double, std::int64_t>> slots) {
  auto levels = positive_levels(std::move(slots), 1e-12);
  const std::size_t L = levels.size();
  std::vector<std::int64_t> cumulative(L);
  std::int64_t c = 0;
  for (std::size_t t = 0; t < L; ++t) {
    c += levels[t].second;
    cumulative[t] = c;
  }
  ValueMap f;
  f.reserve(L);
  double acc = 0.0;
  for (std::size_t t = L; t-- > 0;) {
    const double next = (t + 1 < L) ? levels[t + 1].first : 0.0;
    acc += (levels[t].first - next) / static_cast<double>(cumulative[t]);
    f.emplace(levels[t].first, acc);
  }
  return f;
}

class IntegralHomeo final : public SphereMap {
 public:
  explicit IntegralHomeo(std::int64_t k)
      : SphereMap("integral", k, linf_oracle(), l1_oracle(),
                  MapProps{.step_preserving = true,
                           .support_preserving = true,
                           .non_increasing_support = true,
                           .permutation_equivariant = true,
                           .continuous = true},
                  /*pcp_capable=*/true, /*positive_domain=*/true) {}

  DenseVector eval(const DenseVector& x) const override {
    std::vector<std::pair<double, std::int64_t>> slots;
    slots.reserve(static_cast<std::size_t>(x.dim()));
    for (double v : x.values()) slots.emplace_back(v, 1);
    const ValueMap f = integral_value_map(std::move(slots));
    std::vector<double> out(static_cast<std::size_t>(x.dim()));
    for (std::int64_t i = 1; i <= x.dim(); ++i) {
      out[static_cast<std::size_t>(i - 1)] = lookup(f, x.at(i));
    }
    return DenseVector(std::move(out));
  }

  PcpVector eval(const PcpVector& x) const override {
    std::vector<std::pair<double, std::int64_t>> slots;
    slots.reserve(2 * x.segments().size());
    for (const PcpSegment& s : x.segments()) {
      slots.emplace_back(s.val_even, PcpVector::even_count(s.lo, s.hi));
      slots.emplace_back(s.val_odd, PcpVector::odd_count(s.lo, s.hi));
    }
    const ValueMap f = integral_value_map(std::move(slots));
    return map_segments(x, [&f](double v) { return lookup(f, v); });
  }
};

// Inverse closed form on levels: a coordinate at level t (value w_t, c_t
// coordinates at levels above or equal) maps to c_t w_t + sum_{tau>t} n_tau w_tau.
ValueMap integral_inverse_value_map(std::vector<std::pair<double, std::int64_t>> slots) {
  auto levels = positive_levels(std::move(slots), 1e-12);
  const std::size_t L = levels.size();
  std::vector<std::int64_t> cumulative(L);
  std::int64_t c = 0;
  for (std::size_t t = 0; t < L; ++t) {
    c += levels[t].second;
    cumulative[t] = c;
  }
  ValueMap g;
  g.reserve(L);
  double tail = 0.0;
  for (std::size_t t = L; t-- > 0;) {
    const double w = levels[t].first;
    g.emplace(w, static_cast<double>(cumulative[t]) * w + tail);
    tail += static_cast<double>(levels[t].second) * w;
  }
  return g;
}

class IntegralHomeoInverse final : public SphereMap {
 public:
  explicit IntegralHomeoInverse(std::int64_t k)
      : SphereMap("integral-inverse", k, l1_oracle(), linf_oracle(),
                  MapProps{.step_preserving = true,
                           .support_preserving = true,
                           .non_increasing_support = true,
                           .permutation_equivariant = true,
                           .continuous = true},
                  /*pcp_capable=*/true, /*positive_domain=*/true) {}

  DenseVector eval(const DenseVector& y) const override {
    std::vector<std::pair<double, std::int64_t>> slots;
    slots.reserve(static_cast<std::size_t>(y.dim()));
    for (double v : y.values()) slots.emplace_back(v, 1);
    const ValueMap g = integral_inverse_value_map(std::move(slots));
    std::vector<double> out(static_cast<std::size_t>(y.dim()));
    for (std::int64_t i = 1; i <= y.dim(); ++i) {
      out[static_cast<std::size_t>(i - 1)] = lookup(g, y.at(i));
    }
    return DenseVector(std::move(out));
  }

  PcpVector eval(const PcpVector& y) const override {
    std::vector<std::pair<double, std::int64_t>> slots;
    slots.reserve(2 * y.segments().size());
    for (const PcpSegment& s : y.segments()) {
      slots.emplace_back(s.val_even, PcpVector::even_count(s.lo, s.hi));
      slots.emplace_back(s.val_odd, PcpVector::odd_count(s.lo, s.hi));
    }
    const ValueMap g = integral_inverse_value_map(std::move(slots));
    return map_segments(y, [&g](double v) { return lookup(g, v); });
  }
};

class PowerMap final : public SphereMap {
 public:
  PowerMap(std::string name, std::int64_t k, std::shared_ptr<const NormOracle> domain,
           std::shared_ptr<const NormOracle> target, double exponent)
      : SphereMap(std::move(name), k, std::move(domain), std::move(target),
                  MapProps{.step_preserving = true,
                           .support_preserving = true,
                           .non_increasing_support = true,
                           .permutation_equivariant = true,
                           .continuous = true},
                  /*pcp_capable=*/true),
        exponent_(exponent) {}

  DenseVector eval(const DenseVector& x) const override {
    require_on_sphere(domain_oracle()->norm(x));
    std::vector<double> out(static_cast<std::size_t>(x.dim()));
    for (std::int64_t i = 1; i <= x.dim(); ++i) {
      out[static_cast<std::size_t>(i - 1)] = signed_power(x.at(i), exponent_);
    }
    return DenseVector(std::move(out));
  }

  PcpVector eval(const PcpVector& x) const override {
    require_on_sphere(domain_oracle()->norm(x));
    return map_segments(x, [e = exponent_](double v) { return signed_power(v, e); });
  }

 private:
  void require_on_sphere(double n) const {
    if (std::fabs(n - 1.0) > 1e-12) {
      throw NotOnSphere(name() + ": input has " + domain_oracle()->name() + " norm " +
                        std::to_string(n));
    }
  }

  double exponent_;
};

class ConstUniformMap final : public SphereMap {
 public:
  ConstUniformMap(std::int64_t k, std::shared_ptr<const NormOracle> oracle)
      : SphereMap("const-uniform", k, linf_oracle(), oracle,
                  MapProps{.step_preserving = true,
                           .support_preserving = false,
                           .non_increasing_support = false,
                           .permutation_equivariant = oracle->symmetric(),
                           .continuous = true},
                  /*pcp_capable=*/true),
        value_(1.0 / oracle->psi(k)) {}

  DenseVector eval(const DenseVector& x) const override {
    return DenseVector(std::vector<double>(static_cast<std::size_t>(x.dim()), value_));
  }

  PcpVector eval(const PcpVector& x) const override { return PcpVector::constant(x.dim(), value_); }

 private:
  double value_;
};

class AbsWrapper final : public SphereMap {
 public:
  explicit AbsWrapper(SphereMapPtr inner)
      : SphereMap("abs+" + inner->name(), inner->dim(), inner->domain_oracle(),
                  inner->target_oracle(), inner->declared(), inner->pcp_capable(),
                  inner->positive_domain()),
        inner_(std::move(inner)) {}

  DenseVector eval(const DenseVector& x) const override {
    DenseVector y = inner_->eval(x);
    std::vector<double> out(y.values().begin(), y.values().end());
    for (double& v : out) v = std::fabs(v);
    return DenseVector(std::move(out));
  }

  PcpVector eval(const PcpVector& x) const override {
    return map_segments(inner_->eval(x), [](double v) { return std::fabs(v); });
  }

 private:
  SphereMapPtr inner_;
};

class SymmetrizeMap final : public SphereMap {
 public:
  SymmetrizeMap(SphereMapPtr inner, SymmetrizeMode mode)
      : SphereMap(mode_name(mode) + inner->name(), inner->dim(), inner->domain_oracle(),
                  inner->target_oracle(), make_props(*inner, mode), /*pcp_capable=*/false,
                  inner->positive_domain()),
        inner_(std::move(inner)),
        mode_(mode) {
    if (inner_->target_oracle()->r_exponent() != 1.0) {
      throw TargetNotPositiveFacet("symmetrize: requires an l1 target");
    }
    if (mode_.exact_mode && dim() > 8) {
      throw KTooLargeForExact("symmetrize: exact mode requires k <= 8, got k = " +
                              std::to_string(dim()));
    }
    if (!mode_.exact_mode && mode_.samples < 1) {
      throw std::invalid_argument("symmetrize: sampled mode needs at least one permutation");
    }
  }

  DenseVector eval(const DenseVector& x) const override {
    const std::size_t k = static_cast<std::size_t>(dim());
    std::vector<double> acc(k, 0.0);
    std::vector<std::int64_t> pi(k);
    std::iota(pi.begin(), pi.end(), 0);
    std::int64_t terms = 0;

    auto accumulate_term = [&] {
      const DenseVector y = inner_->eval(apply_permutation(x, pi));
      for (std::size_t j = 0; j < k; ++j) {
        const double v = y.at(static_cast<std::int64_t>(j) + 1);
        if (v < -1e-9) {
          throw TargetNotPositiveFacet("symmetrize: wrapped map left the positive facet");
        }
        acc[static_cast<std::size_t>(pi[j])] += v;
      }
      ++terms;
    };

    if (mode_.exact_mode) {
      do {
        accumulate_term();
      } while (std::next_permutation(pi.begin(), pi.end()));
    } else {
      SplitMix64 rng{mode_.seed ^ hash_coords(mode_.seed, x.values())};
      for (int s = 0; s < mode_.samples; ++s) {
        for (std::size_t j = k - 1; j > 0; --j) {
          std::swap(pi[j], pi[rng.bounded(j + 1)]);
        }
        accumulate_term();
      }
    }

    long double total = 0.0L;
    for (double& v : acc) {
      v /= static_cast<double>(terms);
      v = std::max(v, 0.0);
      total += v;
    }
    // Average of nonnegative l1-unit vectors; renormalization fixes rounding.
    for (double& v : acc) v /= static_cast<double>(total);
    return DenseVector(std::move(acc));
  }

 private:
  static std::string mode_name(const SymmetrizeMode& mode) {
    if (mode.exact_mode) return "sym(exact)+";
    return "sym(" + std::to_string(mode.samples) + "," + std::to_string(mode.seed) + ")+";
  }

  static MapProps make_props(const SphereMap& inner, const SymmetrizeMode& mode) {
    MapProps props = inner.declared();
    props.permutation_equivariant = mode.exact_mode;
    // Equivariance forces step preservation in exact mode; a finite sample
    // average carries neither.
    props.step_preserving = mode.exact_mode;
    return props;
  }

  SphereMapPtr inner_;
  SymmetrizeMode mode_;
};

}  // namespace

SphereMapPtr normalize_map(std::int64_t k, std::shared_ptr<const NormOracle> oracle) {
  return std::make_shared<NormalizeMap>(k, std::move(oracle));
}

SphereMapPtr phi_map(std::int64_t k, std::string label, std::function<double(double)> phi,
                     bool continuous) {
  return std::make_shared<PhiMap>(k, std::move(label), std::move(phi), continuous);
}

SphereMapPtr phi_map(std::int64_t k, std::string label,
                     std::vector<std::function<double(double)>> phis, bool continuous) {
  return std::make_shared<PhiMap>(k, std::move(label), std::move(phis), continuous);
}

SphereMapPtr integral_homeo(std::int64_t k) { return std::make_shared<IntegralHomeo>(k); }

SphereMapPtr integral_homeo_inverse(std::int64_t k) {
  return std::make_shared<IntegralHomeoInverse>(k);
}

SphereMapPtr mazur_map(double p, std::int64_t k) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("mazur_map: p must be in [1,inf)");
  }
  return std::make_shared<PowerMap>("mazur:" + std::to_string(p), k, lr_oracle(p), l2_oracle(),
                                    p / 2.0);
}

SphereMapPtr mazur_map_inverse(double p, std::int64_t k) {
  if (!(p >= 1.0) || !std::isfinite(p)) {
    throw std::invalid_argument("mazur_map_inverse: p must be in [1,inf)");
  }
  return std::make_shared<PowerMap>("mazur-inverse:" + std::to_string(p), k, l2_oracle(),
                                    lr_oracle(p), 2.0 / p);
}

SphereMapPtr const_uniform_map(std::int64_t k, std::shared_ptr<const NormOracle> oracle) {
  return std::make_shared<ConstUniformMap>(k, std::move(oracle));
}

SphereMapPtr abs_wrapper(SphereMapPtr inner) {
  return std::make_shared<AbsWrapper>(std::move(inner));
}

SphereMapPtr symmetrize(SphereMapPtr inner, SymmetrizeMode mode) {
  return std::make_shared<SymmetrizeMap>(std::move(inner), mode);
}

DenseVector apply_permutation(const DenseVector& x, std::span<const std::int64_t> pi) {
  std::vector<double> out(static_cast<std::size_t>(x.dim()));
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = x.at(pi[j] + 1);
  }
  return DenseVector(std::move(out));
}

namespace {

std::function<double(double)> named_phi(const std::string& name) {
  if (name == "t") return [](double t) { return t; };
  if (name == "t2") return [](double t) { return t * t; };
  if (name == "t3") return [](double t) { return t * t * t; };
  if (name == "one") return [](double) { return 1.0; };
  throw ManifestError("unknown phi function: " + name + " (expected t, t2, t3 or one)");
}

SphereMapPtr parse_base_map(const std::string& base, std::int64_t k,
                            std::shared_ptr<const NormOracle> target) {
  if (base == "normalize") return normalize_map(k, target ? target : l1_oracle());
  if (base == "const-uniform") return const_uniform_map(k, target ? target : l1_oracle());
  if (base == "integral") {
    if (target && target->r_exponent() != 1.0) {
      throw ManifestError("integral map targets l1; got oracle " + target->name());
    }
    return integral_homeo(k);
  }
  if (base == "integral-inverse") return integral_homeo_inverse(k);
  if (base.rfind("phi:", 0) == 0) {
    if (target && target->r_exponent() != 1.0) {
      throw ManifestError("phi maps target l1; got oracle " + target->name());
    }
    const std::string name = base.substr(4);
    return phi_map(k, base, named_phi(name));
  }
  if (base.rfind("mazur:", 0) == 0) {
    double p = 0.0;
    try {
      p = std::stod(base.substr(6));
    } catch (const std::exception&) {
      throw ManifestError("bad mazur exponent in " + base);
    }
    if (target && target->r_exponent() != 2.0) {
      throw ManifestError("mazur maps target l2; got oracle " + target->name());
    }
    return mazur_map(p, k);
  }
  throw ManifestError("unknown map: " + base);
}

SphereMapPtr parse_wrapper(const std::string& token, SphereMapPtr inner) {
  if (token == "abs") return abs_wrapper(std::move(inner));
  if (token == "sym(exact)") return symmetrize(std::move(inner), SymmetrizeMode::exact());
  if (token.rfind("sym(", 0) == 0 && token.back() == ')') {
    const std::string args = token.substr(4, token.size() - 5);
    const auto comma = args.find(',');
    if (comma == std::string::npos) throw ManifestError("bad symmetrize wrapper: " + token);
    try {
      const int n = std::stoi(args.substr(0, comma));
      const std::uint64_t seed = std::stoull(args.substr(comma + 1));
      return symmetrize(std::move(inner), SymmetrizeMode::sampled(n, seed));
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw ManifestError("bad symmetrize wrapper: " + token);
    }
  }
  throw ManifestError("unknown map wrapper: " + token);
}

}  // namespace

SphereMapPtr parse_map(const std::string& spec, std::int64_t k,
                       std::shared_ptr<const NormOracle> target) {
  std::vector<std::string> tokens;
  std::size_t start = 0;
  int depth = 0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (spec[i] == '(') ++depth;
    if (spec[i] == ')') --depth;
    if (spec[i] == '+' && depth == 0) {
      tokens.push_back(spec.substr(start, i - start));
      start = i + 1;
    }
  }
  tokens.push_back(spec.substr(start));
  if (tokens.empty() || tokens.back().empty()) throw ManifestError("empty map spec");

  try {
    SphereMapPtr map = parse_base_map(tokens.back(), k, std::move(target));
    for (std::size_t i = tokens.size() - 1; i-- > 0;) {
      map = parse_wrapper(tokens[i], std::move(map));
    }
    return map;
  } catch (const ManifestError&) {
    throw;
  } catch (const Error& e) {
    throw ManifestError("map spec '" + spec + "': " + e.what());
  }
}

// --- structural property checkers ---------------------------------------

namespace {

constexpr double kTieTol = 1e-12;

PcpVector eval_as_pcp(const SphereMap& map, const PcpVector& x) {
  if (map.pcp_capable()) return map.eval(x);
  return PcpVector::encode(map.eval(x.materialize()));
}

// (input value, output value) pairs realized by a vector and its image.
std::vector<std::pair<double, double>> value_pairs(const PcpVector& x, const PcpVector& y) {
  std::vector<std::pair<double, double>> pairs;
  auto xi = x.segments().begin();
  auto yi = y.segments().begin();
  std::int64_t pos = 1;
  while (pos <= x.dim()) {
    const std::int64_t hi = std::min(xi->hi, yi->hi);
    if (PcpVector::even_count(pos, hi) > 0) pairs.emplace_back(xi->val_even, yi->val_even);
    if (PcpVector::odd_count(pos, hi) > 0) pairs.emplace_back(xi->val_odd, yi->val_odd);
    pos = hi + 1;
    if (xi->hi < pos) ++xi;
    if (yi->hi < pos) ++yi;
  }
  return pairs;
}

// Largest |out_i - out_j| over pairs whose inputs differ by at most kTieTol.
// Exactly equal inputs are collapsed into (min,max) groups first so tied
// blocks cost O(1) instead of O(block^2).
double step_violation(std::vector<std::pair<double, double>> pairs) {
  std::sort(pairs.begin(), pairs.end());
  struct Group {
    double in, out_min, out_max;
  };
  std::vector<Group> groups;
  for (const auto& [in, out] : pairs) {
    if (!groups.empty() && groups.back().in == in) {
      groups.back().out_min = std::min(groups.back().out_min, out);
      groups.back().out_max = std::max(groups.back().out_max, out);
    } else {
      groups.push_back({in, out, out});
    }
  }
  double worst = 0.0;
  for (std::size_t a = 0; a < groups.size(); ++a) {
    worst = std::max(worst, groups[a].out_max - groups[a].out_min);
    for (std::size_t b = a + 1; b < groups.size() && groups[b].in - groups[a].in <= kTieTol; ++b) {
      worst = std::max({worst, std::fabs(groups[a].out_max - groups[b].out_min),
                        std::fabs(groups[b].out_max - groups[a].out_min)});
    }
  }
  return worst;
}

InequalityReport make_step_report(const SphereMap& map, double worst, std::int64_t samples,
                                  double tol) {
  InequalityReport report;
  report.checker = "step_preserving";
  report.inputs["map"] = map.name();
  report.inputs["samples"] = std::to_string(samples);
  report.conclusion_value = worst;
  report.threshold = tol;
  report.margin = tol - worst;
  report.verdict = worst <= tol ? Verdict::Pass : Verdict::Fail;
  return report;
}

}  // namespace

InequalityReport check_step_preserving(const SphereMap& map, std::span<const DenseVector> samples,
                                       double tol) {
  double worst = 0.0;
  for (const DenseVector& x : samples) {
    const DenseVector y = map.eval(x);
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(x.dim()));
    for (std::int64_t i = 1; i <= x.dim(); ++i) pairs.emplace_back(x.at(i), y.at(i));
    worst = std::max(worst, step_violation(std::move(pairs)));
  }
  return make_step_report(map, worst, static_cast<std::int64_t>(samples.size()), tol);
}

InequalityReport check_step_preserving(const SphereMap& map, const PcpVector& sample, double tol) {
  const PcpVector y = eval_as_pcp(map, sample);
  const double worst = step_violation(value_pairs(sample, y));
  return make_step_report(map, worst, 1, tol);
}

namespace {

InequalityReport make_support_report(const SphereMap& map, const char* checker,
                                     std::int64_t violations, std::int64_t samples) {
  InequalityReport report;
  report.checker = checker;
  report.inputs["map"] = map.name();
  report.inputs["samples"] = std::to_string(samples);
  report.conclusion_value = static_cast<double>(violations);
  report.threshold = 0.0;
  report.margin = -static_cast<double>(violations);
  report.verdict = violations == 0 ? Verdict::Pass : Verdict::Fail;
  return report;
}

bool pcp_support_equal(const PcpVector& x, const PcpVector& y, double tol) {
  auto xi = x.segments().begin();
  auto yi = y.segments().begin();
  std::int64_t pos = 1;
  while (pos <= x.dim()) {
    const std::int64_t hi = std::min(xi->hi, yi->hi);
    if (PcpVector::even_count(pos, hi) > 0 &&
        (std::fabs(xi->val_even) > tol) != (std::fabs(yi->val_even) > tol)) {
      return false;
    }
    if (PcpVector::odd_count(pos, hi) > 0 &&
        (std::fabs(xi->val_odd) > tol) != (std::fabs(yi->val_odd) > tol)) {
      return false;
    }
    pos = hi + 1;
    if (xi->hi < pos) ++xi;
    if (yi->hi < pos) ++yi;
  }
  return true;
}

}  // namespace

InequalityReport check_support_preserving(const SphereMap& map, std::span<const DenseVector> samples,
                                          double tol) {
  std::int64_t violations = 0;
  for (const DenseVector& x : samples) {
    if (!(support(map.eval(x), tol) == support(x, tol))) ++violations;
  }
  return make_support_report(map, "support_preserving", violations,
                             static_cast<std::int64_t>(samples.size()));
}

InequalityReport check_support_preserving(const SphereMap& map, const PcpVector& sample,
                                          double tol) {
  const bool ok = pcp_support_equal(sample, eval_as_pcp(map, sample), tol);
  return make_support_report(map, "support_preserving", ok ? 0 : 1, 1);
}

InequalityReport check_non_increasing_support(const SphereMap& map,
                                              std::span<const DenseVector> samples, double tol) {
  std::int64_t violations = 0;
  for (const DenseVector& x : samples) {
    if (support_size(map.eval(x), tol) > support_size(x, tol)) ++violations;
  }
  return make_support_report(map, "non_increasing_support", violations,
                             static_cast<std::int64_t>(samples.size()));
}

InequalityReport check_non_increasing_support(const SphereMap& map, const PcpVector& sample,
                                              double tol) {
  const bool ok = support_size(eval_as_pcp(map, sample), tol) <= support_size(sample, tol);
  return make_support_report(map, "non_increasing_support", ok ? 0 : 1, 1);
}

InequalityReport check_equivariance_implies_step(const SphereMap& map, int trials,
                                                 std::uint64_t seed) {
  InequalityReport report;
  report.checker = "equivariance_implies_step";
  report.inputs["map"] = map.name();
  report.inputs["trials"] = std::to_string(trials);

  const std::int64_t k = map.dim();
  SplitMix64 rng{seed ^ 0x5bf03635aa5f4b6aull};
  double worst_equivariance = 0.0;
  double worst_step = 0.0;

  const bool positive = map.positive_domain();
  const bool sup_domain = map.domain_oracle()->is_c0_like();
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<double> coords(static_cast<std::size_t>(k));
    for (double& c : coords) c = positive ? rng.uniform01() : 2.0 * rng.uniform01() - 1.0;
    // Force a tie half of the time so step preservation is actually exercised.
    if (k >= 2 && rng.next() % 2 == 0) {
      const auto i = rng.bounded(static_cast<std::uint64_t>(k));
      const auto j = rng.bounded(static_cast<std::uint64_t>(k));
      coords[static_cast<std::size_t>(j)] = coords[static_cast<std::size_t>(i)];
    }
    if (sup_domain) {
      coords[rng.bounded(static_cast<std::uint64_t>(k))] =
          positive || rng.next() % 2 == 0 ? 1.0 : -1.0;
    } else {
      // Scaling preserves ties, so the sample stays step-test-worthy.
      const double n = map.domain_oracle()->norm(DenseVector(coords));
      for (double& c : coords) c /= n;
    }
    const DenseVector x{coords};

    std::vector<std::int64_t> pi(static_cast<std::size_t>(k));
    std::iota(pi.begin(), pi.end(), 0);
    for (std::size_t j = pi.size() - 1; j > 0; --j) std::swap(pi[j], pi[rng.bounded(j + 1)]);

    const DenseVector lhs = map.eval(apply_permutation(x, pi));
    const DenseVector rhs = apply_permutation(map.eval(x), pi);
    worst_equivariance = std::max(worst_equivariance, sup_distance(lhs, rhs));

    const DenseVector y = map.eval(x);
    std::vector<std::pair<double, double>> pairs;
    for (std::int64_t i = 1; i <= k; ++i) pairs.emplace_back(x.at(i), y.at(i));
    worst_step = std::max(worst_step, step_violation(std::move(pairs)));
  }

  report.add("worst_equivariance_defect", worst_equivariance);
  report.add("worst_step_defect", worst_step);
  report.threshold = 1e-9;
  if (worst_equivariance > 1e-9) {
    report.verdict = Verdict::HypothesisNotMet;
    report.failed_hypothesis = "permutation_equivariance";
    report.conclusion_value = worst_equivariance;
    report.margin = 1e-9 - worst_equivariance;
  } else if (worst_step > 1e-9) {
    // Equivariance passed while step failed: inconsistent with the averaging
    // lemma, so the harness itself is suspect.
    report.verdict = Verdict::Fail;
    report.failed_hypothesis = "equivariant_but_not_step";
    report.conclusion_value = worst_step;
    report.margin = 1e-9 - worst_step;
  } else {
    report.verdict = Verdict::Pass;
    report.conclusion_value = std::max(worst_equivariance, worst_step);
    report.margin = 1e-9 - report.conclusion_value;
  }
  return report;
}

}  // namespace spheremaps
