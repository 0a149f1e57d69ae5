#include "qdesign/report.hpp"

namespace qdesign {

namespace {

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json bound_value(const std::optional<std::int64_t>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json document(json body) {
  body["schema_version"] = kSchemaVersion;
  return body;
}

json to_json(const FieldCtx& ctx) {
  return {{"p", ctx.characteristic()},
          {"m", ctx.degree()},
          {"q", ctx.order()},
          {"modulus", ctx.modulus()},
          {"primitive_element", ctx.primitive_element().index}};
}

json to_json(const FamilySpec& spec) {
  return {{"p", spec.p}, {"m", spec.m}, {"l", spec.l}, {"q", spec.q()}, {"coprime", spec.coprime()}};
}

json to_json(const Spectrum& s) {
  json rows = json::array();
  for (auto& [size, count] : s.counts) rows.push_back({{"size", size}, {"count", count}});
  return {{"spectrum", rows}, {"total", s.total()}};
}

json to_json(const DesignReport& r) {
  json ce = nullptr;
  if (r.counterexample)
    ce = {{"subset", r.counterexample->subset},
          {"coverage", r.counterexample->coverage},
          {"reference", r.counterexample->reference}};
  json j = {{"t", r.t},
            {"v", r.v},
            {"k", opt(r.k)},
            {"lambda", opt(r.lambda)},
            {"b", r.b},
            {"is_design", r.is_design},
            {"mode", r.mode},
            {"seed", opt(r.seed)},
            {"counterexample", ce}};
  if (r.samples) j["samples"] = *r.samples;
  return j;
}

json to_json(const BluherReport& r) {
  return {{"predicted", opt(r.predicted)},
          {"brute_forced", r.brute_forced},
          {"agrees", r.predicted ? json(r.agrees) : json(nullptr)},
          {"flagged", !r.predicted.has_value()}};
}

json to_json(const CasePrediction& c) {
  return {{"v", c.v},
          {"k", opt(c.k)},
          {"lambda", opt(c.lambda)},
          {"b", opt(c.b)},
          {"range", to_string(c.range)},
          {"trivial_stabilizer_expected", c.trivial_stabilizer_expected}};
}

json to_json(const CaseReport& r) {
  json mult = json::object();
  for (auto& [m, n] : r.multiplicities) mult[std::to_string(m)] = n;
  return {{"spec", to_json(r.spec)},
          {"prediction", to_json(r.prediction)},
          {"image_size", r.image_size},
          {"design", to_json(r.design)},
          {"increments", r.increments},
          {"multiplicities", mult},
          {"zero_slope_pairs", r.zero_slope_pairs},
          {"status", to_string(r.status)},
          {"finding", r.status == CheckStatus::finding},
          {"note", r.note}};
}

json to_json(const StabilizerReport& r) {
  json elems = json::array();
  for (const auto& g : r.elements) elems.push_back({g.u.index, g.v.index});
  return {{"mu", r.mu}, {"elements", elems}};
}

json to_json(const HomogeneityReport& r) {
  json w = nullptr;
  if (r.witness) w = {r.witness->first, r.witness->second};
  return {{"homogeneous", r.homogeneous},
          {"pairs_reached", r.pairs_reached},
          {"pairs_total", r.pairs_total},
          {"witness", w}};
}

json to_json(const EqualityReport& r) {
  return {{"A1_size", r.a1_size},
          {"A2_size", r.a2_size},
          {"A3_size", opt(r.a3_size)},
          {"A1_eq_A2", r.a1_eq_a2},
          {"A1_eq_A3", opt(r.a1_eq_a3)},
          {"A3_subset_A2", opt(r.a3_subset_a2)}};
}

json to_json(const CurveReport& r) {
  json bounds = json::array();
  for (const auto& b : r.bounds)
    bounds.push_back({{"kind", to_string(b.kind)}, {"low", bound_value(b.low)}, {"high", bound_value(b.high)},
                      {"holds", b.holds}});
  return {{"N", r.n},
          {"N_proj", r.n_proj},
          {"delta", r.delta},
          {"genus", r.genus},
          {"width", r.width},
          {"bound_low", bound_value(r.primary.low)},
          {"bound_high", bound_value(r.primary.high)},
          {"bound_kind", to_string(r.primary.kind)},
          {"bounds", bounds},
          {"projective_is_q_plus_1", opt(r.projective_is_q_plus_1)},
          {"within_bounds", r.within_bounds}};
}

}  // namespace qdesign
