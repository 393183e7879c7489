#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include "spheremaps/report.hpp"
#include "spheremaps/vectors.hpp"

namespace spheremaps {

/// A 1-unconditional norm with a normalized basis, evaluated on dense or
/// run-length vectors. Block estimate exponents (q, p) are declared metadata;
/// check_block_estimates validates the declaration empirically.
class NormOracle {
 public:
  virtual ~NormOracle() = default;

  const std::string& name() const { return name_; }
  double block_q() const { return q_; }
  double block_p() const { return p_; }  // may be +infinity
  std::optional<double> r_exponent() const { return r_; }

  /// True when the fundamental function is bounded (the basis is equivalent to
  /// the standard c0 basis). Such oracles are rejected by the growth-set
  /// builder and all separation/concentration checkers.
  bool is_c0_like() const { return c0_like_; }

  /// True when the norm is invariant under coordinate permutations.
  bool symmetric() const { return symmetric_; }

  virtual double norm(const DenseVector& v) const = 0;
  virtual double norm(const PcpVector& v) const = 0;

  /// Norm of a 0/1 indicator as a function of its cardinality alone, when the
  /// norm is symmetric enough for that to make sense.
  virtual std::optional<double> indicator_norm(std::int64_t count) const = 0;

  /// psi(k) = norm of 1_{[1,k]}. Closed form where available.
  virtual double psi(std::int64_t k) const;

 protected:
  NormOracle(std::string name, double q, double p, std::optional<double> r, bool c0_like,
             bool symmetric);

 private:
  std::string name_;
  double q_, p_;
  std::optional<double> r_;
  bool c0_like_;
  bool symmetric_;
};

std::shared_ptr<const NormOracle> l1_oracle();
std::shared_ptr<const NormOracle> l2_oracle();
std::shared_ptr<const NormOracle> lr_oracle(double r);
std::shared_ptr<const NormOracle> linf_oracle();

/// Resolves the CLI oracle names "l1", "l2", "lr:<r>", "linf".
std::shared_ptr<const NormOracle> make_oracle(const std::string& spec);

/// Memoized psi(k) for oracles without a closed form. Safe for concurrent
/// callers.
class FundamentalFunction {
 public:
  explicit FundamentalFunction(std::shared_ptr<const NormOracle> oracle);

  double operator()(std::int64_t k) const;
  const NormOracle& oracle() const { return *oracle_; }

 private:
  std::shared_ptr<const NormOracle> oracle_;
  mutable std::mutex mu_;
  mutable std::unordered_map<std::int64_t, double> memo_;
};

double psi(const NormOracle& oracle, std::int64_t k);

/// min(norm(1_{[1,k] cap P}), norm(1_{[1,k] cap Pc})) for an explicit P.
double psi_partition(const NormOracle& oracle, const SupportSet& p_members, std::int64_t k);

/// Same for P = 2N (even indices); closed form, no dense cap.
double psi_partition_evens(const NormOracle& oracle, std::int64_t k);

/// Verifies the lower-p / upper-q block estimates on the given block sequence.
/// blocks are same-dimension vectors with disjoint, order-consecutive supports.
InequalityReport check_block_estimates(const NormOracle& oracle, std::span<const DenseVector> blocks,
                                       double rel_tol = 1e-10);

}  // namespace spheremaps
