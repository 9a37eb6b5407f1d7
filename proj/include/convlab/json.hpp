#pragma once

// JSON encodings. Big integers travel as decimal strings so that arbitrary
// precision survives the round trip.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "convlab/bose.hpp"
#include "convlab/constructor.hpp"
#include "convlab/disk.hpp"
#include "convlab/qpoly.hpp"
#include "convlab/series.hpp"
#include "convlab/tolerances.hpp"

namespace convlab {

using json = nlohmann::json;

inline json to_json(const CoeffVector& c) {
  return json{{"a", std::vector<std::int64_t>(c.values().begin(), c.values().end())}};
}

inline CoeffVector coeffs_from_json(const json& j) {
  return CoeffVector(j.at("a").get<std::vector<std::int64_t>>());
}

inline json to_json(const Tolerances& t) {
  return json{{"relative", t.relative},           {"critical_point", t.critical_point},
              {"root_residual", t.root_residual}, {"negative_clamp", t.negative_clamp},
              {"seed_mass", t.seed_mass},         {"monotone", t.monotone},
              {"certificate", t.certificate},     {"ceiling", t.ceiling},
              {"lipschitz", t.lipschitz},         {"mass_bound", t.mass_bound}};
}

inline json to_json(const PolyQ& p) {
  return json{{"coeffs", to_json(p.coeffs())}, {"t_q", p.t_q()}, {"q_max", p.q_max()}};
}

inline json big_to_json(const BigPoly& poly) {
  json arr = json::array();
  for (const auto& v : poly) arr.push_back(v.str());
  return arr;
}

inline BigPoly big_from_json(const json& arr) {
  BigPoly out;
  out.reserve(arr.size());
  for (const auto& v : arr) out.emplace_back(v.get<std::string>());
  return out;
}

inline json to_json(const CoeffTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows) rows.push_back(big_to_json(r));
  return json{{"coeffs", to_json(t.coeffs)}, {"cap", t.cap}, {"cap_too_small", t.cap_too_small}, {"rows", rows}};
}

inline CoeffTable table_from_json(const json& j) {
  CoeffTable t{coeffs_from_json(j.at("coeffs")), j.at("cap").get<std::size_t>(), {},
               j.at("cap_too_small").get<bool>()};
  for (const auto& r : j.at("rows")) t.rows.push_back(big_from_json(r));
  return t;
}

inline json to_json(const LimitSeries& s) {
  return json{{"coeffs", to_json(s.coeffs)}, {"c", big_to_json(s.c)}};
}

inline LimitSeries series_from_json(const json& j) {
  return {coeffs_from_json(j.at("coeffs")), big_from_json(j.at("c"))};
}

inline json to_json(const DiskReport& r) {
  json roots = json::array();
  for (const auto& z : r.qprime_roots) roots.push_back(json{z.real(), z.imag()});
  return json{{"t_q", r.t_q},
              {"scan_radius", r.scan_radius},
              {"qprime_roots", roots},
              {"min_modulus_root", r.min_modulus_root},
              {"positive_root_error", r.positive_root_error},
              {"sup_p_prime", r.sup_p_prime},
              {"sup_p_over_z", r.sup_p_over_z},
              {"pairs_checked", r.pairs_checked},
              {"injectivity_violations", r.injectivity_violations}};
}

inline json to_json(const SolveReport& r) {
  return json{{"iterations", r.iterations},   {"l1_deltas", r.l1_deltas},
              {"masses", r.masses},           {"mass_shadow_error", r.mass_shadow_error},
              {"final_mass", r.final_mass},   {"residual", r.residual},
              {"monotone_ok", r.monotone_ok}, {"converged", r.converged}};
}

inline json to_json(const BoseSolution& s) {
  return json{{"delta", s.delta},
              {"hypothesis_value", s.hypothesis_value},
              {"pde_residual", s.pde_residual},
              {"min_u", min_value(s.u)},
              {"max_u", max_value(s.u)},
              {"l1_norm_u", l1_norm(s.u)},
              {"report", to_json(s.report)}};
}

inline json to_json(const CertificateResult& c) {
  return json{{"verdict", std::string(to_string(c.verdict))},
              {"hypothesis_value", c.hypothesis_value},
              {"hypothesis", c.hypothesis},
              {"proof_inequality", c.proof_inequality},
              {"non_negative", c.non_negative},
              {"ceiling", c.ceiling},
              {"proof_slack", c.proof_slack},
              {"min_u", c.min_u},
              {"f_mass", c.f_mass},
              {"negative_part", c.negative_part}};
}

}  // namespace convlab
