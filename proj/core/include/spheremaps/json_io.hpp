#pragma once

#include <nlohmann/json.hpp>
#include <span>

#include "spheremaps/report.hpp"
#include "spheremaps/vectors.hpp"
#include "spheremaps/witnesses.hpp"

namespace spheremaps::json_io {

using nlohmann::json;

/// {"dim": k, "segments": [[lo,hi,val_even,val_odd], ...]}
json pcp(const PcpVector& v);
PcpVector pcp_vector(const json& j);

/// Plain array of coordinates.
json dense(const DenseVector& v);
DenseVector dense_vector(const json& j);

json support_set(const SupportSet& s);

/// {"a": ..., "elements": [...]} plus "pairs" when given.
json growth(const GrowthSet& g);
json growth_with_pairs(const GrowthSet& g, std::span<const InterlacedPair> pairs);

json profile(const Profile& u);

json report(const InequalityReport& r);
json modulus(const ModulusEstimate& m);

}  // namespace spheremaps::json_io
