#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spheremaps/errors.hpp"

namespace spheremaps {

/// Coordinates are indexed 1..dim throughout the library; "parity" always
/// refers to that 1-based index, so index 1 is odd, index 2 is even.

/// Hard cap on dense storage; everything above must stay in PcpVector form.
inline constexpr std::int64_t kDenseCap = 10'000'000;

class DenseVector {
 public:
  explicit DenseVector(std::vector<double> coords);
  static DenseVector zeros(std::int64_t dim);

  std::int64_t dim() const { return static_cast<std::int64_t>(coords_.size()); }
  double at(std::int64_t i) const { return coords_[static_cast<std::size_t>(i - 1)]; }
  std::span<const double> values() const { return coords_; }

  bool operator==(const DenseVector& other) const { return coords_ == other.coords_; }

 private:
  std::vector<double> coords_;
};

/// One maximal run of a piecewise-constant-with-parity vector. Coordinate i in
/// [lo,hi] has value val_even if i is even and val_odd if i is odd.
struct PcpSegment {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  double val_even = 0.0;
  double val_odd = 0.0;

  bool operator==(const PcpSegment&) const = default;
};

/// Run-length vector representation exact at dimensions far beyond the dense
/// cap. Always stored in canonical form: the segment list a greedy
/// left-to-right scan of the coordinates would produce, with the unused parity
/// slot of a trailing length-1 segment mirrored from the used one. On that
/// form, materialize + encode is the identity.
class PcpVector {
 public:
  PcpVector(std::int64_t dim, std::vector<PcpSegment> segments);

  static PcpVector constant(std::int64_t dim, double value);
  static PcpVector encode(const DenseVector& v);

  std::int64_t dim() const { return dim_; }
  std::span<const PcpSegment> segments() const { return segments_; }

  double at(std::int64_t i) const;
  DenseVector materialize() const;

  /// Number of even / odd indices inside [lo,hi].
  static std::int64_t even_count(std::int64_t lo, std::int64_t hi);
  static std::int64_t odd_count(std::int64_t lo, std::int64_t hi);

  bool operator==(const PcpVector& other) const = default;

 private:
  PcpVector() = default;

  std::int64_t dim_ = 0;
  std::vector<PcpSegment> segments_;
};

struct SupportSet {
  std::int64_t dim = 0;
  std::vector<std::int64_t> members;  // sorted ascending, subset of {1..dim}

  bool operator==(const SupportSet&) const = default;
};

double sup_norm(const DenseVector& v);
double sup_norm(const PcpVector& v);
double sup_distance(const DenseVector& u, const DenseVector& v);
double sup_distance(const PcpVector& u, const PcpVector& v);

SupportSet support(const DenseVector& v, double tol);
/// Throws DimensionTooLarge if the support has more than kDenseCap members.
SupportSet support(const PcpVector& v, double tol);
std::int64_t support_size(const DenseVector& v, double tol);
std::int64_t support_size(const PcpVector& v, double tol);

enum class Parity { Even, Odd };

/// Copy of v with every coordinate of the other parity zeroed.
PcpVector parity_part(const PcpVector& v, Parity keep);

/// Applies f to every realized (segment, parity) value. f must be a pure
/// function of the coordinate value for the result to stay well formed.
template <typename F>
PcpVector map_segments(const PcpVector& v, F&& f) {
  std::vector<PcpSegment> out;
  out.reserve(v.segments().size());
  for (const PcpSegment& s : v.segments()) {
    out.push_back({s.lo, s.hi, f(s.val_even), f(s.val_odd)});
  }
  return PcpVector(v.dim(), std::move(out));
}

/// Merges the segment structures of u and v and applies f slot-wise.
template <typename F>
PcpVector zip_segments(const PcpVector& u, const PcpVector& v, F&& f) {
  if (u.dim() != v.dim()) {
    throw DimMismatch("zip_segments: dimensions differ");
  }
  std::vector<PcpSegment> out;
  out.reserve(u.segments().size() + v.segments().size());
  auto ui = u.segments().begin();
  auto vi = v.segments().begin();
  std::int64_t pos = 1;
  while (pos <= u.dim()) {
    const std::int64_t hi = std::min(ui->hi, vi->hi);
    out.push_back({pos, hi, f(ui->val_even, vi->val_even), f(ui->val_odd, vi->val_odd)});
    pos = hi + 1;
    if (ui->hi < pos) ++ui;
    if (vi->hi < pos) ++vi;
  }
  return PcpVector(u.dim(), std::move(out));
}

inline PcpVector subtract(const PcpVector& u, const PcpVector& v) {
  return zip_segments(u, v, [](double a, double b) { return a - b; });
}

DenseVector subtract(const DenseVector& u, const DenseVector& v);

}  // namespace spheremaps
