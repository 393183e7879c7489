#include "spheremaps/vectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

namespace spheremaps {

namespace {

void require_finite(std::span<const double> values) {
  for (double x : values) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("vector coordinate is not finite");
    }
  }
}

// Incremental greedy scanner producing the canonical segment list. A run is
// closed only when an incoming value conflicts with an already-determined
// parity slot, so every run except possibly the last covers both parities.
class SegmentScanner {
 public:
  void feed(std::int64_t i, double value) {
    const int p = slot_of(i);
    if (!active_) {
      start(i, p, value);
      return;
    }
    if (!has_[p]) {
      vals_[p] = value;
      has_[p] = true;
      hi_ = i;
      return;
    }
    if (vals_[p] == value) {
      hi_ = i;
      return;
    }
    close();
    start(i, p, value);
  }

  // Extends the current run through hi assuming all remaining coordinates in
  // (hi_, hi] match the run's slot values. Callers must have fed enough
  // positions to determine both slots first.
  void extend_to(std::int64_t hi) { hi_ = hi; }

  bool run_matches(double val_even, double val_odd) const {
    return active_ && has_[0] && has_[1] && vals_[0] == val_even && vals_[1] == val_odd;
  }

  std::vector<PcpSegment> finish() {
    if (active_) close();
    return std::move(out_);
  }

 private:
  static int slot_of(std::int64_t i) { return i % 2 == 0 ? 0 : 1; }  // 0=even, 1=odd

  void start(std::int64_t i, int p, double value) {
    lo_ = hi_ = i;
    vals_[p] = value;
    has_[p] = true;
    has_[1 - p] = false;
    active_ = true;
  }

  void close() {
    const double ve = has_[0] ? vals_[0] : vals_[1];
    const double vo = has_[1] ? vals_[1] : vals_[0];
    out_.push_back({lo_, hi_, ve, vo});
    active_ = false;
  }

  std::vector<PcpSegment> out_;
  std::int64_t lo_ = 0, hi_ = 0;
  double vals_[2] = {0.0, 0.0};
  bool has_[2] = {false, false};
  bool active_ = false;
};

std::vector<PcpSegment> canonicalize(std::span<const PcpSegment> raw) {
  SegmentScanner scan;
  for (const PcpSegment& s : raw) {
    std::int64_t i = s.lo;
    while (i <= s.hi && !scan.run_matches(s.val_even, s.val_odd)) {
      scan.feed(i, i % 2 == 0 ? s.val_even : s.val_odd);
      ++i;
    }
    if (i <= s.hi) scan.extend_to(s.hi);
  }
  return scan.finish();
}

void validate_cover(std::int64_t dim, std::span<const PcpSegment> segments) {
  if (dim < 1) throw std::invalid_argument("PcpVector: dim must be positive");
  std::int64_t pos = 1;
  for (const PcpSegment& s : segments) {
    if (s.lo != pos || s.hi < s.lo || s.hi > dim) {
      throw std::invalid_argument("PcpVector: segments must be sorted, disjoint and cover [1,dim]");
    }
    if (!std::isfinite(s.val_even) || !std::isfinite(s.val_odd)) {
      throw std::invalid_argument("PcpVector: segment value is not finite");
    }
    pos = s.hi + 1;
  }
  if (pos != dim + 1) {
    throw std::invalid_argument("PcpVector: segments do not cover [1,dim]");
  }
}

}  // namespace

DenseVector::DenseVector(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty()) throw std::invalid_argument("DenseVector: dim must be positive");
  require_finite(coords_);
}

DenseVector DenseVector::zeros(std::int64_t dim) {
  if (dim < 1) throw std::invalid_argument("DenseVector: dim must be positive");
  return DenseVector(std::vector<double>(static_cast<std::size_t>(dim), 0.0));
}

PcpVector::PcpVector(std::int64_t dim, std::vector<PcpSegment> segments) : dim_(dim) {
  validate_cover(dim, segments);
  segments_ = canonicalize(segments);
}

PcpVector PcpVector::constant(std::int64_t dim, double value) {
  return PcpVector(dim, {{1, dim, value, value}});
}

PcpVector PcpVector::encode(const DenseVector& v) {
  SegmentScanner scan;
  for (std::int64_t i = 1; i <= v.dim(); ++i) {
    scan.feed(i, v.at(i));
  }
  PcpVector out;
  out.dim_ = v.dim();
  out.segments_ = scan.finish();
  return out;
}

double PcpVector::at(std::int64_t i) const {
  if (i < 1 || i > dim_) throw std::out_of_range("PcpVector::at: index out of range");
  auto it = std::partition_point(segments_.begin(), segments_.end(),
                                 [i](const PcpSegment& s) { return s.hi < i; });
  return i % 2 == 0 ? it->val_even : it->val_odd;
}

DenseVector PcpVector::materialize() const {
  if (dim_ > kDenseCap) {
    throw DimensionTooLarge("materialize: dim " + std::to_string(dim_) +
                            " exceeds the dense cap " + std::to_string(kDenseCap));
  }
  std::vector<double> coords(static_cast<std::size_t>(dim_));
  for (const PcpSegment& s : segments_) {
    for (std::int64_t i = s.lo; i <= s.hi; ++i) {
      coords[static_cast<std::size_t>(i - 1)] = i % 2 == 0 ? s.val_even : s.val_odd;
    }
  }
  return DenseVector(std::move(coords));
}

std::int64_t PcpVector::even_count(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) return 0;
  return hi / 2 - (lo - 1) / 2;
}

std::int64_t PcpVector::odd_count(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) return 0;
  return (hi - lo + 1) - even_count(lo, hi);
}

double sup_norm(const DenseVector& v) {
  double best = 0.0;
  for (double x : v.values()) best = std::max(best, std::fabs(x));
  return best;
}

double sup_norm(const PcpVector& v) {
  double best = 0.0;
  for (const PcpSegment& s : v.segments()) {
    if (PcpVector::even_count(s.lo, s.hi) > 0) best = std::max(best, std::fabs(s.val_even));
    if (PcpVector::odd_count(s.lo, s.hi) > 0) best = std::max(best, std::fabs(s.val_odd));
  }
  return best;
}

double sup_distance(const DenseVector& u, const DenseVector& v) {
  if (u.dim() != v.dim()) throw DimMismatch("sup_distance: dimensions differ");
  double best = 0.0;
  for (std::int64_t i = 1; i <= u.dim(); ++i) {
    best = std::max(best, std::fabs(u.at(i) - v.at(i)));
  }
  return best;
}

double sup_distance(const PcpVector& u, const PcpVector& v) {
  if (u.dim() != v.dim()) throw DimMismatch("sup_distance: dimensions differ");
  double best = 0.0;
  auto ui = u.segments().begin();
  auto vi = v.segments().begin();
  std::int64_t pos = 1;
  while (pos <= u.dim()) {
    const std::int64_t hi = std::min(ui->hi, vi->hi);
    if (hi > pos) {
      best = std::max({best, std::fabs(ui->val_even - vi->val_even),
                       std::fabs(ui->val_odd - vi->val_odd)});
    } else if (pos % 2 == 0) {
      best = std::max(best, std::fabs(ui->val_even - vi->val_even));
    } else {
      best = std::max(best, std::fabs(ui->val_odd - vi->val_odd));
    }
    pos = hi + 1;
    if (ui->hi < pos) ++ui;
    if (vi->hi < pos) ++vi;
  }
  return best;
}

SupportSet support(const DenseVector& v, double tol) {
  SupportSet out{v.dim(), {}};
  for (std::int64_t i = 1; i <= v.dim(); ++i) {
    if (std::fabs(v.at(i)) > tol) out.members.push_back(i);
  }
  return out;
}

SupportSet support(const PcpVector& v, double tol) {
  if (support_size(v, tol) > kDenseCap) {
    throw DimensionTooLarge("support: member count exceeds the dense cap");
  }
  SupportSet out{v.dim(), {}};
  for (const PcpSegment& s : v.segments()) {
    const bool even_in = std::fabs(s.val_even) > tol;
    const bool odd_in = std::fabs(s.val_odd) > tol;
    if (!even_in && !odd_in) continue;
    for (std::int64_t i = s.lo; i <= s.hi; ++i) {
      if (i % 2 == 0 ? even_in : odd_in) out.members.push_back(i);
    }
  }
  return out;
}

std::int64_t support_size(const DenseVector& v, double tol) {
  std::int64_t n = 0;
  for (double x : v.values()) {
    if (std::fabs(x) > tol) ++n;
  }
  return n;
}

std::int64_t support_size(const PcpVector& v, double tol) {
  std::int64_t n = 0;
  for (const PcpSegment& s : v.segments()) {
    if (std::fabs(s.val_even) > tol) n += PcpVector::even_count(s.lo, s.hi);
    if (std::fabs(s.val_odd) > tol) n += PcpVector::odd_count(s.lo, s.hi);
  }
  return n;
}

PcpVector parity_part(const PcpVector& v, Parity keep) {
  std::vector<PcpSegment> out;
  out.reserve(v.segments().size());
  for (const PcpSegment& s : v.segments()) {
    if (keep == Parity::Even) {
      out.push_back({s.lo, s.hi, s.val_even, 0.0});
    } else {
      out.push_back({s.lo, s.hi, 0.0, s.val_odd});
    }
  }
  return PcpVector(v.dim(), std::move(out));
}

DenseVector subtract(const DenseVector& u, const DenseVector& v) {
  if (u.dim() != v.dim()) throw DimMismatch("subtract: dimensions differ");
  std::vector<double> coords(static_cast<std::size_t>(u.dim()));
  for (std::int64_t i = 1; i <= u.dim(); ++i) {
    coords[static_cast<std::size_t>(i - 1)] = u.at(i) - v.at(i);
  }
  return DenseVector(std::move(coords));
}

}  // namespace spheremaps
