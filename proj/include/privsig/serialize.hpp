//
// Copyright 2026 The privsig Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// JSON views of solver results. Numbers are rounded to 12 significant
// digits when a document is finalized.

#ifndef PRIVSIG_SERIALIZE_HPP_
#define PRIVSIG_SERIALIZE_HPP_

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "privsig/bottleneck.hpp"
#include "privsig/channel.hpp"
#include "privsig/equilibrium.hpp"
#include "privsig/matrix.hpp"
#include "privsig/model.hpp"
#include "privsig/spectral.hpp"
#include "privsig/verify.hpp"

namespace privsig {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "privsig/1";

inline double RoundSignificant(double v, int digits = 12) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return std::strtod(buf, nullptr);
}

// Rounds every float in place. Non-finite values become null, as JSON has
// no literal for them.
inline void RoundNumbers(Json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    j = std::isfinite(v) ? Json(RoundSignificant(v)) : Json(nullptr);
  } else if (j.is_structured()) {
    for (auto& child : j) RoundNumbers(child);
  }
}

inline Json Document(Json body) {
  Json doc;
  doc["schema"] = kSchema;
  for (auto& [key, value] : body.items()) doc[key] = value;
  RoundNumbers(doc);
  return doc;
}

inline Json ToJson(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json Optional(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json ToJson(const SpectralDecomposition& d) {
  return {{"eigenvalues", d.lambda},
          {"eigenvectors", ToJson(d.q)},
          {"inertia",
           {{"positive", d.inertia.positive},
            {"negative", d.inertia.negative},
            {"zero", d.inertia.zero}}}};
}

inline Json ToJson(const ChannelSpec& c) {
  Json j{{"type", ChannelName(c)}};
  if (const auto* a = std::get_if<Awgn>(&c)) {
    j["noise_var"] = a->noise_var;
    j["power"] = a->power;
  } else if (const auto* d = std::get_if<Discrete>(&c)) {
    j["levels"] = d->levels;
  }
  return j;
}

inline Json ToJson(const LinearPolicyPair& p) {
  return {{"encoder", ToJson(p.f)},
          {"decoder_x", ToJson(p.d_x)},
          {"decoder_y", ToJson(p.d_y)},
          {"channel", ToJson(p.channel)}};
}

inline Json ToJson(const EquilibriumReport& r) {
  Json j{{"mse_x", r.mse_x}, {"mse_y", r.mse_y}, {"j_e", r.j_e}, {"j_d", r.j_d}};
  if (r.mc) {
    j["mc"] = {{"n", r.mc->n},
               {"se_mse_x", r.mc->se_mse_x},
               {"se_mse_y", r.mc->se_mse_y},
               {"se_j_e", r.mc->se_j_e}};
  }
  return j;
}

inline Json ToJson(const std::vector<Warning>& ws) {
  Json j = Json::array();
  for (const Warning& w : ws) j.push_back({{"code", w.code}, {"message", w.message}});
  return j;
}

inline Json ToJson(const JointGaussian& s) {
  return {{"n_x", s.n_x()}, {"n_y", s.n_y()}, {"sigma", ToJson(s.sigma().matrix())}};
}

inline Json ToJson(const NashSolution& s) {
  Json j{{"source", ToJson(s.spec.source)},
         {"delta", s.spec.delta},
         {"alphas", s.alphas},
         {"payoff_dominant", s.payoff_dominant},
         {"policy", ToJson(s.policy)},
         {"spectrum", ToJson(s.transform.spectrum)},
         {"report", ToJson(s.report)},
         {"warnings", ToJson(s.warnings)}};
  if (s.spec.source.is_scalar()) {
    j["b_over_a"] = Optional(s.b_over_a);
    j["b_over_a_vector"] = Optional(s.b_over_a_vector);
  }
  return j;
}

inline Json ToJson(const NoisyEquilibrium& e) {
  return {{"source", ToJson(e.spec.source)},
          {"delta", e.spec.delta},
          {"a", e.a},
          {"b", e.b},
          {"b_over_a", Optional(e.b_over_a)},
          {"power_used", e.power_used},
          {"d_x", e.d_x},
          {"d_y", e.d_y},
          {"mse_u", e.mse_u},
          {"policy", ToJson(e.report.policy)},
          {"spectrum", ToJson(*e.report.spectrum)},
          {"report", ToJson(e.report)},
          {"warnings", ToJson(e.warnings)}};
}

inline Json ToJson(const Quantizer& q) {
  return {{"levels", q.levels},
          {"boundaries", q.boundaries},
          {"reconstructions", q.reconstructions},
          {"mse", q.mse},
          {"iterations", q.iterations}};
}

inline Json ToJson(const DiscreteEquilibrium& e) {
  return {{"source", ToJson(e.spec.source)},
          {"delta", e.spec.delta},
          {"u_direction", {e.u_x, e.u_y}},
          {"regression", {e.c_x, e.c_y}},
          {"b_over_a", Optional(e.b_over_a)},
          {"quantizer", ToJson(e.quantizer)},
          {"spectrum", ToJson(*e.report.spectrum)},
          {"report", ToJson(e.report)},
          {"warnings", ToJson(e.warnings)}};
}

inline Json ToJson(const IBSolution& s) {
  return {{"regime", IbRegimeName(s.regime)},
          {"k", s.k},
          {"w_ib", ToJson(s.w_ib.matrix())},
          {"spectrum", ToJson(s.spectrum)},
          {"policy", ToJson(s.policy)},
          {"report", ToJson(s.report)},
          {"warnings", ToJson(s.warnings)}};
}

inline Json ToJson(const ConstrainedIBSolution& s) {
  return {{"alpha", s.alpha},
          {"upsilon", ToJson(s.upsilon.matrix())},
          {"lambda_min", s.lambda_min},
          {"phi", ToJson(s.phi)},
          {"objective", s.objective},
          {"encoder",
           {{"linear", ToJson(s.encoder.linear)},
            {"noise_cov", ToJson(s.encoder.noise_cov)}}},
          {"support_dim", s.support_dim},
          {"support_capacity", s.support_capacity},
          {"optimal", s.optimal},
          {"warnings", ToJson(s.warnings)}};
}

inline Json ToJson(const ChechikSolution& s) {
  return {{"beta", s.beta},
          {"a_matrix", ToJson(s.a_matrix)},
          {"active_count", s.active_count},
          {"betas_critical", s.betas_critical},
          {"lambdas", s.lambdas},
          {"p", ToJson(s.p)},
          {"alphas", s.alphas},
          {"noise_cov", ToJson(s.noise_cov)}};
}

inline Json ToJson(const MutualInformation& mi) {
  return {{"i_xz", mi.i_xz}, {"i_yz", mi.i_yz}};
}

inline Json ToJson(const DeviationReport& r) {
  return {{"verdict", VerdictName(r.verdict)},
          {"baseline_je", r.baseline_je},
          {"tested", r.tested},
          {"best_deviation_je", r.best_deviation_je},
          {"margin", r.margin},
          {"details", r.details}};
}

inline Json ToJson(const ConsistencyReport& c) {
  return {{"pass", c.pass},
          {"z_x", c.z_x},
          {"z_y", c.z_y},
          {"analytic", ToJson(c.analytic)},
          {"empirical", ToJson(c.empirical)}};
}

}  // namespace privsig

#endif  // PRIVSIG_SERIALIZE_HPP_
