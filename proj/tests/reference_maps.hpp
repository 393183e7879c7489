#pragma once

// Deliberately plain re-implementations of the run-length evaluation paths,
// used as an independent cross-check at dimensions where no dense oracle can
// run. Naive loops, std::map bookkeeping, O(levels^2) integration: nothing
// shared with the production code path.

#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "spheremaps/vectors.hpp"

namespace reference_maps {

using spheremaps::PcpSegment;
using spheremaps::PcpVector;

inline double l1_norm(const PcpVector& v) {
  double total = 0.0;
  for (const PcpSegment& s : v.segments()) {
    total += static_cast<double>(PcpVector::even_count(s.lo, s.hi)) * std::fabs(s.val_even) +
             static_cast<double>(PcpVector::odd_count(s.lo, s.hi)) * std::fabs(s.val_odd);
  }
  return total;
}

inline PcpVector scale(const PcpVector& v, double factor) {
  std::vector<PcpSegment> segments(v.segments().begin(), v.segments().end());
  for (PcpSegment& s : segments) {
    s.val_even *= factor;
    s.val_odd *= factor;
  }
  return PcpVector(v.dim(), std::move(segments));
}

inline PcpVector normalize_l1(const PcpVector& v) { return scale(v, 1.0 / l1_norm(v)); }

// Integral of 1 / #{j : x_j >= r} over r in (0, level], from a descending
// (value, count) table.
inline double integrate_level(const std::vector<std::pair<double, std::int64_t>>& descending,
                              double level) {
  double integral = 0.0;
  std::int64_t at_or_above = 0;
  for (std::size_t i = 0; i < descending.size(); ++i) {
    at_or_above += descending[i].second;
    const double hi = descending[i].first;
    const double lo = i + 1 < descending.size() ? descending[i + 1].first : 0.0;
    if (level >= hi) {
      integral += (hi - lo) / static_cast<double>(at_or_above);
    } else if (level > lo) {
      integral += (level - lo) / static_cast<double>(at_or_above);
    }
  }
  return integral;
}

inline PcpVector integral_map(const PcpVector& v) {
  std::map<double, std::int64_t> counts;
  for (const PcpSegment& s : v.segments()) {
    if (PcpVector::even_count(s.lo, s.hi) > 0 && s.val_even > 0.0) {
      counts[s.val_even] += PcpVector::even_count(s.lo, s.hi);
    }
    if (PcpVector::odd_count(s.lo, s.hi) > 0 && s.val_odd > 0.0) {
      counts[s.val_odd] += PcpVector::odd_count(s.lo, s.hi);
    }
  }
  const std::vector<std::pair<double, std::int64_t>> descending(counts.rbegin(), counts.rend());

  std::vector<PcpSegment> segments(v.segments().begin(), v.segments().end());
  for (PcpSegment& s : segments) {
    s.val_even = s.val_even > 0.0 ? integrate_level(descending, s.val_even) : 0.0;
    s.val_odd = s.val_odd > 0.0 ? integrate_level(descending, s.val_odd) : 0.0;
  }
  return PcpVector(v.dim(), std::move(segments));
}

// l1 distance by walking the merged breakpoints one piece at a time.
inline double l1_distance(const PcpVector& a, const PcpVector& b) {
  double total = 0.0;
  std::size_t ia = 0, ib = 0;
  std::int64_t pos = 1;
  const auto sa = a.segments();
  const auto sb = b.segments();
  while (pos <= a.dim()) {
    const std::int64_t hi = std::min(sa[ia].hi, sb[ib].hi);
    total += std::fabs(sa[ia].val_even - sb[ib].val_even) *
                 static_cast<double>(PcpVector::even_count(pos, hi)) +
             std::fabs(sa[ia].val_odd - sb[ib].val_odd) *
                 static_cast<double>(PcpVector::odd_count(pos, hi));
    pos = hi + 1;
    if (sa[ia].hi < pos) ++ia;
    if (sb[ib].hi < pos) ++ib;
  }
  return total;
}

}  // namespace reference_maps
