#include "fairshare/json_io.hpp"

#include <stdexcept>

namespace fairshare {

using nlohmann::json;

namespace {

json rational_array(const RationalVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

json index_array(const std::vector<std::size_t>& v) {
  json a = json::array();
  for (std::size_t x : v) a.push_back(x);
  return a;
}

}  // namespace

json to_json(const ShareVector& s) {
  json j;
  j["kind"] = std::string(to_string(s.kind));
  j["delta"] = s.delta ? json(to_string(*s.delta)) : json(nullptr);
  j["values"] = rational_array(s.values);
  if (!s.standard_errors.empty()) j["standard_errors"] = s.standard_errors;
  return j;
}

ShareVector share_vector_from_json(const json& j) {
  try {
    ShareVector s;
    s.kind = parse_share_kind(j.at("kind").get<std::string>());
    if (j.contains("delta") && !j.at("delta").is_null()) s.delta = parse_rational(j.at("delta").get<std::string>());
    for (const auto& v : j.at("values")) s.values.push_back(parse_rational(v.get<std::string>()));
    if (j.contains("standard_errors")) s.standard_errors = j.at("standard_errors").get<std::vector<double>>();
    return s;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed share vector: ") + e.what());
  }
}

json to_json(const Allocation& a) {
  json rows = json::array();
  for (const auto& b : a.bundles) rows.push_back(rational_array(b.quantities));
  return rows;
}

json to_json(const ApproxResult& r) {
  json j;
  j["theta"] = r.theta ? json(to_string(*r.theta)) : json("unconstrained");
  j["allocation"] = to_json(r.allocation);
  json ratios = json::array();
  for (const auto& x : r.per_agent_ratio) ratios.push_back(x ? json(to_string(*x)) : json(nullptr));
  j["per_agent_ratio"] = ratios;
  j["shares"] = to_json(r.shares);
  return j;
}

json to_json(const CoverReport& r) {
  json agents = json::array();
  for (const auto& a : r.agents) {
    agents.push_back({{"alg_value", to_string(a.alg_value)},
                      {"ccs_value", to_string(a.ccs_value)},
                      {"ratio", to_string(a.ratio)},
                      {"alg_original", to_string(a.alg_original)},
                      {"ccs_original", to_string(a.ccs_original)},
                      {"within_safe_bound", a.within_safe_bound}});
  }
  json sets = json::array();
  for (std::size_t i : r.cover.cover_agents) sets.push_back({{"agent", i}, {"items", index_array(r.cover.cover_sets[i])}});
  json j;
  j["a"] = to_string(r.cover.a);
  j["b"] = to_string(r.cover.b);
  j["top_agent"] = index_array(r.cover.top_agent);
  j["cover"] = sets;
  j["agents"] = agents;
  j["allocation"] = to_json(r.allocation);
  j["summary"] = {{"max_ratio", to_string(r.max_ratio)},
                  {"max_ratio_float", r.max_ratio.get_d()},
                  {"bound_3m23", r.bound_3m23},
                  {"bound_safe", r.bound_safe},
                  {"supply_feasible", r.supply_feasible},
                  {"safe_bound_holds", r.safe_bound_holds},
                  {"agents_above_3m23", index_array(r.tight_bound_exceeded)}};
  return j;
}

json to_json(const DualReport& r) {
  json v = json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"constraint", x.constraint},
                 {"i", x.i},
                 {"j", x.j ? json(*x.j) : json(nullptr)},
                 {"subset", index_array(x.subset)},
                 {"detail", x.detail}});
  }
  return {{"variant", to_string(r.variant)},
          {"lambda", to_string(r.lambda)},
          {"lambda_float", r.lambda.get_d()},
          {"bound", r.bound},
          {"lambda_within_bound", r.lambda_within_bound},
          {"violations", v},
          {"ratio_lhs", to_string(r.ratio_lhs)},
          {"ratio_rhs", to_string(r.ratio_rhs)},
          {"weak_duality_holds", r.weak_duality_holds},
          {"passed", r.passed()}};
}

json to_json(const PlaneReport& r) {
  return {{"q", r.q},
          {"n", r.n},
          {"m", r.m},
          {"objective", to_string(r.objective)},
          {"expected_objective", to_string(r.expected_objective)},
          {"constraints_tight", r.constraints_tight},
          {"constraint_value", to_string(r.constraint_value)},
          {"ccs_ratio", to_string(r.ccs_ratio)},
          {"ccs_ratio_ok", r.ccs_ratio_ok},
          {"theta", r.theta ? json(to_string(*r.theta)) : json(nullptr)},
          {"welfare_bound", to_string(r.welfare_bound)},
          {"theta_ok", r.theta_ok},
          {"passed", r.passed()}};
}

}  // namespace fairshare
