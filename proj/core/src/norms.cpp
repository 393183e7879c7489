#include "spheremaps/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace spheremaps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class LrOracle final : public NormOracle {
 public:
  explicit LrOracle(double r)
      : NormOracle(r == 1.0   ? "l1"
                   : r == 2.0 ? "l2"
                              : "lr:" + std::to_string(r),
                   r, r, r, /*c0_like=*/false, /*symmetric=*/true),
        r_(r) {
    if (!(r >= 1.0) || !std::isfinite(r)) {
      throw std::invalid_argument("lr_oracle: r must be in [1,inf)");
    }
  }

  double norm(const DenseVector& v) const override {
    long double acc = 0.0L;
    if (r_ == 1.0) {
      for (double x : v.values()) acc += std::fabs(x);
      return static_cast<double>(acc);
    }
    if (r_ == 2.0) {
      for (double x : v.values()) acc += static_cast<long double>(x) * x;
      return std::sqrt(static_cast<double>(acc));
    }
    for (double x : v.values()) acc += std::pow(std::fabs(static_cast<long double>(x)), r_);
    return static_cast<double>(std::pow(acc, 1.0L / r_));
  }

  double norm(const PcpVector& v) const override {
    long double acc = 0.0L;
    for (const PcpSegment& s : v.segments()) {
      const long double ne = static_cast<long double>(PcpVector::even_count(s.lo, s.hi));
      const long double no = static_cast<long double>(PcpVector::odd_count(s.lo, s.hi));
      if (r_ == 1.0) {
        acc += ne * std::fabs(s.val_even) + no * std::fabs(s.val_odd);
      } else if (r_ == 2.0) {
        acc += ne * s.val_even * s.val_even + no * s.val_odd * s.val_odd;
      } else {
        acc += ne * std::pow(std::fabs(static_cast<long double>(s.val_even)), r_) +
               no * std::pow(std::fabs(static_cast<long double>(s.val_odd)), r_);
      }
    }
    if (r_ == 1.0) return static_cast<double>(acc);
    if (r_ == 2.0) return std::sqrt(static_cast<double>(acc));
    return static_cast<double>(std::pow(acc, 1.0L / r_));
  }

  std::optional<double> indicator_norm(std::int64_t count) const override {
    if (count <= 0) return 0.0;
    if (r_ == 1.0) return static_cast<double>(count);
    if (r_ == 2.0) return std::sqrt(static_cast<double>(count));
    return std::pow(static_cast<double>(count), 1.0 / r_);
  }

  double psi(std::int64_t k) const override { return *indicator_norm(k); }

 private:
  double r_;
};

class LinfOracle final : public NormOracle {
 public:
  LinfOracle() : NormOracle("linf", 1.0, kInf, std::nullopt, /*c0_like=*/true, /*symmetric=*/true) {}

  double norm(const DenseVector& v) const override { return sup_norm(v); }
  double norm(const PcpVector& v) const override { return sup_norm(v); }

  std::optional<double> indicator_norm(std::int64_t count) const override {
    return count > 0 ? 1.0 : 0.0;
  }

  double psi(std::int64_t k) const override { return k > 0 ? 1.0 : 0.0; }
};

}  // namespace

NormOracle::NormOracle(std::string name, double q, double p, std::optional<double> r, bool c0_like,
                       bool symmetric)
    : name_(std::move(name)), q_(q), p_(p), r_(r), c0_like_(c0_like), symmetric_(symmetric) {}

double NormOracle::psi(std::int64_t k) const {
  if (k <= 0) return 0.0;
  if (auto closed = indicator_norm(k)) return *closed;
  if (k > kDenseCap) {
    throw DimensionTooLarge("psi: no closed form and k exceeds the dense cap");
  }
  std::vector<double> ones(static_cast<std::size_t>(k), 1.0);
  return norm(DenseVector(std::move(ones)));
}

std::shared_ptr<const NormOracle> l1_oracle() {
  static const auto oracle = std::make_shared<const LrOracle>(1.0);
  return oracle;
}

std::shared_ptr<const NormOracle> l2_oracle() {
  static const auto oracle = std::make_shared<const LrOracle>(2.0);
  return oracle;
}

std::shared_ptr<const NormOracle> lr_oracle(double r) {
  if (r == 1.0) return l1_oracle();
  if (r == 2.0) return l2_oracle();
  return std::make_shared<const LrOracle>(r);
}

std::shared_ptr<const NormOracle> linf_oracle() {
  static const auto oracle = std::make_shared<const LinfOracle>();
  return oracle;
}

std::shared_ptr<const NormOracle> make_oracle(const std::string& spec) {
  if (spec == "l1") return l1_oracle();
  if (spec == "l2") return l2_oracle();
  if (spec == "linf") return linf_oracle();
  if (spec.rfind("lr:", 0) == 0) {
    const std::string arg = spec.substr(3);
    std::size_t used = 0;
    double r = 0.0;
    try {
      r = std::stod(arg, &used);
    } catch (const std::exception&) {
      throw ManifestError("unknown oracle: " + spec);
    }
    if (used != arg.size() || !(r >= 1.0) || !std::isfinite(r)) {
      throw ManifestError("unknown oracle: " + spec);
    }
    return lr_oracle(r);
  }
  throw ManifestError("unknown oracle: " + spec);
}

FundamentalFunction::FundamentalFunction(std::shared_ptr<const NormOracle> oracle)
    : oracle_(std::move(oracle)) {}

double FundamentalFunction::operator()(std::int64_t k) const {
  if (auto closed = oracle_->indicator_norm(k)) return *closed;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
  }
  const double value = oracle_->psi(k);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(k, value);
  return value;
}

double psi(const NormOracle& oracle, std::int64_t k) { return oracle.psi(k); }

double psi_partition(const NormOracle& oracle, const SupportSet& p_members, std::int64_t k) {
  if (k > kDenseCap) {
    throw DimensionTooLarge("psi_partition: explicit partition beyond the dense cap");
  }
  std::vector<double> in_p(static_cast<std::size_t>(k), 0.0);
  std::vector<double> in_pc(static_cast<std::size_t>(k), 1.0);
  for (std::int64_t i : p_members.members) {
    if (i >= 1 && i <= k) {
      in_p[static_cast<std::size_t>(i - 1)] = 1.0;
      in_pc[static_cast<std::size_t>(i - 1)] = 0.0;
    }
  }
  return std::min(oracle.norm(DenseVector(std::move(in_p))), oracle.norm(DenseVector(std::move(in_pc))));
}

double psi_partition_evens(const NormOracle& oracle, std::int64_t k) {
  if (auto evens = oracle.indicator_norm(PcpVector::even_count(1, k))) {
    return std::min(*evens, *oracle.indicator_norm(PcpVector::odd_count(1, k)));
  }
  const PcpVector evens_ind(k, {{1, k, 1.0, 0.0}});
  const PcpVector odds_ind(k, {{1, k, 0.0, 1.0}});
  return std::min(oracle.norm(evens_ind), oracle.norm(odds_ind));
}

InequalityReport check_block_estimates(const NormOracle& oracle, std::span<const DenseVector> blocks,
                                       double rel_tol) {
  InequalityReport report;
  report.checker = "block_estimates";
  report.inputs["oracle"] = oracle.name();
  report.inputs["blocks"] = std::to_string(blocks.size());
  if (blocks.empty()) throw NotBlockSequence("check_block_estimates: no blocks");

  const std::int64_t dim = blocks.front().dim();
  std::int64_t prev_hi = 0;
  std::vector<double> sum(static_cast<std::size_t>(dim), 0.0);
  for (const DenseVector& b : blocks) {
    if (b.dim() != dim) throw DimMismatch("check_block_estimates: mixed dimensions");
    std::int64_t lo = 0, hi = 0;
    for (std::int64_t i = 1; i <= dim; ++i) {
      if (b.at(i) != 0.0) {
        if (lo == 0) lo = i;
        hi = i;
      }
    }
    if (lo == 0) throw NotBlockSequence("check_block_estimates: zero block");
    if (lo <= prev_hi) {
      throw NotBlockSequence("check_block_estimates: supports overlap or are out of order");
    }
    prev_hi = hi;
    for (std::int64_t i = lo; i <= hi; ++i) {
      sum[static_cast<std::size_t>(i - 1)] += b.at(i);
    }
  }

  const double q = oracle.block_q();
  const double p = oracle.block_p();
  long double lower_acc = 0.0L, upper_acc = 0.0L;
  double lower_max = 0.0;
  for (const DenseVector& b : blocks) {
    const double nb = oracle.norm(b);
    lower_max = std::max(lower_max, nb);
    if (std::isfinite(p)) lower_acc += std::pow(static_cast<long double>(nb), p);
    upper_acc += std::pow(static_cast<long double>(nb), q);
  }
  const double lower = std::isfinite(p)
                           ? static_cast<double>(std::pow(lower_acc, 1.0L / static_cast<long double>(p)))
                           : lower_max;
  const double upper = static_cast<double>(std::pow(upper_acc, 1.0L / static_cast<long double>(q)));
  const double mid = oracle.norm(DenseVector(std::move(sum)));

  report.add("lower_p_estimate", lower);
  report.add("norm_of_sum", mid);
  report.add("upper_q_estimate", upper);
  const double scale = std::max({1.0, lower, mid, upper});
  report.conclusion_value = mid;
  report.threshold = upper;
  report.margin = std::min(mid - lower, upper - mid);
  report.verdict = (lower <= mid + rel_tol * scale && mid <= upper + rel_tol * scale)
                       ? Verdict::Pass
                       : Verdict::Fail;
  return report;
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::HypothesisNotMet:
      return "hypothesis_not_met";
  }
  return "unknown";
}

}  // namespace spheremaps
