#include "spheremaps/json_io.hpp"

#include <cmath>

namespace spheremaps::json_io {

namespace {

json number_or_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

json pcp(const PcpVector& v) {
  json segments = json::array();
  for (const PcpSegment& s : v.segments()) {
    segments.push_back({s.lo, s.hi, s.val_even, s.val_odd});
  }
  return {{"dim", v.dim()}, {"segments", std::move(segments)}};
}

PcpVector pcp_vector(const json& j) {
  std::vector<PcpSegment> segments;
  for (const json& s : j.at("segments")) {
    segments.push_back({s.at(0).get<std::int64_t>(), s.at(1).get<std::int64_t>(),
                        s.at(2).get<double>(), s.at(3).get<double>()});
  }
  return PcpVector(j.at("dim").get<std::int64_t>(), std::move(segments));
}

json dense(const DenseVector& v) {
  return json(std::vector<double>(v.values().begin(), v.values().end()));
}

DenseVector dense_vector(const json& j) { return DenseVector(j.get<std::vector<double>>()); }

json support_set(const SupportSet& s) {
  return {{"dim", s.dim}, {"members", s.members}};
}

json growth(const GrowthSet& g) {
  json out{{"oracle", g.oracle ? g.oracle->name() : ""},
           {"d", g.d},
           {"eps", g.eps},
           {"elements", g.elements}};
  if (g.base_a) out["a"] = *g.base_a;
  return out;
}

json growth_with_pairs(const GrowthSet& g, std::span<const InterlacedPair> pairs) {
  json out = growth(g);
  json list = json::array();
  for (const InterlacedPair& p : pairs) {
    list.push_back({{"m", p.m}, {"n", p.n}, {"k", p.k}});
  }
  out["pairs"] = std::move(list);
  return out;
}

json profile(const Profile& u) {
  return {{"a", u.a}, {"b", u.b}, {"c", u.c}};
}

json report(const InequalityReport& r) {
  json hypotheses = json::array();
  for (const auto& [name, value] : r.hypothesis_values) {
    hypotheses.push_back({{"name", name}, {"value", number_or_null(value)}});
  }
  json out{{"checker", r.checker},
           {"inputs", r.inputs},
           {"hypothesis_values", std::move(hypotheses)},
           {"conclusion_value", r.conclusion_value},
           {"threshold", r.threshold},
           {"margin", r.margin},
           {"verdict", to_string(r.verdict)}};
  if (!r.failed_hypothesis.empty()) out["failed_hypothesis"] = r.failed_hypothesis;
  if (r.block_readouts) {
    const BlockReadouts& b = *r.block_readouts;
    json alpha_m = json::array(), beta_m = json::array();
    json alpha_n = json::array(), beta_n = json::array();
    for (double v : b.alpha_m) alpha_m.push_back(number_or_null(v));
    for (double v : b.beta_m) beta_m.push_back(number_or_null(v));
    for (double v : b.alpha_n) alpha_n.push_back(number_or_null(v));
    for (double v : b.beta_n) beta_n.push_back(number_or_null(v));
    out["block_readouts"] = {{"alpha_m", std::move(alpha_m)}, {"beta_m", std::move(beta_m)},
                             {"alpha_n", std::move(alpha_n)}, {"beta_n", std::move(beta_n)},
                             {"gamma_m", b.gamma_m},          {"gamma_n", b.gamma_n}};
  }
  return out;
}

json modulus(const ModulusEstimate& m) {
  json out{{"map", m.map_name},
           {"t", m.t},
           {"lower_bound", m.lower_bound},
           {"pairs_tried", m.pairs_tried}};
  if (m.witness_pair) {
    out["witness_pair"] = {pcp(m.witness_pair->first), pcp(m.witness_pair->second)};
  }
  return out;
}

}  // namespace spheremaps::json_io
