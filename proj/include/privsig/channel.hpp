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

// Scalar-source equilibria over a channel: additive Gaussian noise with an
// average power limit, and a noiseless M-ary channel where the sender
// quantizes the conveyable coordinate U with a Lloyd-Max quantizer.

#ifndef PRIVSIG_CHANNEL_HPP_
#define PRIVSIG_CHANNEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "privsig/equilibrium.hpp"
#include "privsig/error.hpp"
#include "privsig/matrix.hpp"
#include "privsig/model.hpp"
#include "privsig/normal.hpp"
#include "privsig/spectral.hpp"

namespace privsig {

struct NoisyEquilibrium {
  GameSpec spec;
  double a = 0.0;
  double b = 0.0;
  double power_used = 0.0;
  double d_x = 0.0;
  double d_y = 0.0;
  std::optional<double> b_over_a;
  double mse_u = 0.0;  // sigma_W^2 / (P + sigma_W^2)
  EquilibriumReport report;
  std::vector<Warning> warnings;
};

namespace detail {

// Unit-power encoder direction (a, b) of the conveyable coordinate U. Uses
// the closed-form ratio when rho != 0, the eigenvector otherwise.
inline std::pair<double, double> ScalarUDirection(const GameSpec& noiseless) {
  const JointGaussian& src = noiseless.source;
  const double sx2 = src.sigma()(0, 0);
  const double sy2 = src.sigma()(1, 1);
  const double rho = src.sigma()(0, 1);
  double a, b;
  if (rho != 0.0) {
    a = 1.0;
    b = ScalarBOverA(sx2, sy2, rho, noiseless.delta);
  } else {
    const WhiteningTransform t = Whiten(noiseless);
    a = t.t_map(0, 0);
    b = t.t_map(0, 1);
  }
  const double power = a * a * sx2 + b * b * sy2 + 2.0 * a * b * rho;
  const double s = 1.0 / std::sqrt(power);
  return {a * s, b * s};
}

}  // namespace detail

// Conveys U at full power P; decoders divide by P + sigma_W^2.
inline NoisyEquilibrium SolveAwgn(double sigma_x2, double sigma_y2, double rho,
                                  double delta, double power,
                                  double noise_var) {
  GameSpec spec{JointGaussian::Scalar(sigma_x2, sigma_y2, rho), delta,
                Awgn{noise_var, power}};
  ValidateSpec(spec);
  const GameSpec noiseless{spec.source, delta};
  const auto [ua, ub] = detail::ScalarUDirection(noiseless);
  const double scale = std::sqrt(power);

  NoisyEquilibrium eq{spec, 0.0, 0.0, 0.0, 0.0, 0.0, std::nullopt, 0.0, {}, {}};
  eq.a = scale * ua;
  eq.b = scale * ub;
  eq.power_used = eq.a * eq.a * sigma_x2 + eq.b * eq.b * sigma_y2 +
                  2.0 * eq.a * eq.b * rho;
  eq.d_x = (eq.a * sigma_x2 + eq.b * rho) / (power + noise_var);
  eq.d_y = (eq.a * rho + eq.b * sigma_y2) / (power + noise_var);
  if (eq.a != 0.0) eq.b_over_a = eq.b / eq.a;
  eq.mse_u = noise_var / (power + noise_var);
  LinearPolicyPair policy{Matrix{{eq.a, eq.b}}, Matrix{{eq.d_x}},
                          Matrix{{eq.d_y}}, spec.channel};
  eq.report = EvaluateLinear(spec, policy);
  eq.report.spectrum = Whiten(noiseless).spectrum;
  if (rho == 0.0) {
    eq.warnings.push_back(
        {"ZeroCorrelation", "rho = 0: the equilibrium transmits Y only"});
  }
  return eq;
}

// Scalar quantizer for a standard normal input. Cell j is
// (boundaries[j-1], boundaries[j]] with the outer cells unbounded; cells map
// to symbols 0..M-1 in ascending order.
struct Quantizer {
  int levels = 1;
  std::vector<double> boundaries;
  std::vector<double> reconstructions;
  double mse = 1.0;
  int iterations = 0;

  int Encode(double u) const {
    return static_cast<int>(
        std::lower_bound(boundaries.begin(), boundaries.end(), u) -
        boundaries.begin());
  }
  double Decode(int symbol) const {
    return reconstructions.at(static_cast<std::size_t>(symbol));
  }
};

namespace detail {

struct CellMoments {
  double mass;     // P(cell)
  double first;    // E[U 1{cell}]
  double second;   // E[U^2 1{cell}]
  double d_lower;  // d centroid / d lower edge
  double d_upper;  // d centroid / d upper edge
};

inline double XPdf(double x) { return std::isinf(x) ? 0.0 : x * NormalPdf(x); }

inline CellMoments NormalCellMoments(double lo, double hi) {
  CellMoments c;
  c.mass = NormalMass(lo, hi);
  c.first = NormalPdf(lo) - NormalPdf(hi);
  c.second = c.mass + XPdf(lo) - XPdf(hi);
  const double centroid = c.first / c.mass;
  c.d_lower = std::isinf(lo) ? 0.0 : NormalPdf(lo) * (centroid - lo) / c.mass;
  c.d_upper = std::isinf(hi) ? 0.0 : NormalPdf(hi) * (hi - centroid) / c.mass;
  return c;
}

inline std::vector<double> Midpoints(const std::vector<double>& r) {
  std::vector<double> a(r.size() - 1);
  for (std::size_t j = 0; j + 1 < r.size(); ++j) a[j] = 0.5 * (r[j] + r[j + 1]);
  return a;
}

inline double Edge(const std::vector<double>& a, std::size_t j, bool upper) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (!upper) return j == 0 ? -kInf : a[j - 1];
  return j == a.size() ? kInf : a[j];
}

// One Lloyd map evaluation: centroids of the midpoint cells, plus the
// tridiagonal Jacobian of that map.
struct LloydStep {
  std::vector<double> next;
  std::vector<double> sub, diag, super;
};

inline LloydStep EvaluateLloyd(const std::vector<double>& r) {
  const std::size_t m = r.size();
  const std::vector<double> a = Midpoints(r);
  LloydStep s;
  s.next.resize(m);
  s.sub.assign(m, 0.0);
  s.diag.assign(m, 0.0);
  s.super.assign(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const CellMoments c = NormalCellMoments(Edge(a, j, false), Edge(a, j, true));
    s.next[j] = c.first / c.mass;
    s.sub[j] = 0.5 * c.d_lower;
    s.super[j] = 0.5 * c.d_upper;
    s.diag[j] = 0.5 * (c.d_lower + c.d_upper);
  }
  return s;
}

inline double MaxMove(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool StrictlyIncreasing(const std::vector<double>& v) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (!(v[i] < v[i + 1])) return false;
  }
  return true;
}

// Newton step for r = T(r): solve (J - I) delta = r - T(r) (Thomas
// algorithm). Returns nullopt if a pivot vanishes.
inline std::optional<std::vector<double>> NewtonCandidate(
    const std::vector<double>& r, const LloydStep& s) {
  const std::size_t m = r.size();
  std::vector<double> c(m), d(m);
  double denom = s.diag[0] - 1.0;
  if (std::abs(denom) < 1e-300) return std::nullopt;
  c[0] = m > 1 ? s.super[0] / denom : 0.0;
  d[0] = (r[0] - s.next[0]) / denom;
  for (std::size_t j = 1; j < m; ++j) {
    denom = (s.diag[j] - 1.0) - s.sub[j] * c[j - 1];
    if (std::abs(denom) < 1e-300) return std::nullopt;
    c[j] = j + 1 < m ? s.super[j] / denom : 0.0;
    d[j] = ((r[j] - s.next[j]) - s.sub[j] * d[j - 1]) / denom;
  }
  std::vector<double> out(m);
  double delta = d[m - 1];
  out[m - 1] = r[m - 1] + delta;
  for (std::size_t j = m - 1; j-- > 0;) {
    delta = d[j] - c[j] * delta;
    out[j] = r[j] + delta;
  }
  return out;
}

}  // namespace detail

inline constexpr double kLloydTol = 1e-12;
inline constexpr int kLloydMaxIter = 100000;

// Lloyd-Max quantizer for N(0, 1). Starts at the normal quantiles
// (j + 0.5) / M and iterates the centroid/midpoint map. Each step also tries
// a Newton step on the fixed-point equation and keeps it when it reduces the
// residual; plain Lloyd converges too slowly for large M.
inline Quantizer LloydMaxGaussian(int levels, double tol = kLloydTol,
                                  int max_iter = kLloydMaxIter) {
  if (levels < 1) {
    throw Error(ErrorCode::kInvalidArgument, "quantizer needs at least one level");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be > 0");
  const std::size_t m = static_cast<std::size_t>(levels);
  std::vector<double> r(m);
  for (std::size_t j = 0; j < m; ++j) {
    r[j] = NormalQuantile((static_cast<double>(j) + 0.5) / static_cast<double>(m));
  }

  Quantizer q;
  q.levels = levels;
  bool converged = false;
  detail::LloydStep step = detail::EvaluateLloyd(r);
  double residual = detail::MaxMove(step.next, r);
  for (int it = 0; it < max_iter; ++it) {
    q.iterations = it + 1;
    if (residual <= tol) {
      r = step.next;
      converged = true;
      break;
    }
    std::vector<double> next = step.next;
    if (auto newton = detail::NewtonCandidate(r, step);
        newton && detail::StrictlyIncreasing(*newton)) {
      detail::LloydStep trial = detail::EvaluateLloyd(*newton);
      const double trial_residual = detail::MaxMove(trial.next, *newton);
      if (trial_residual < residual) {
        r = std::move(*newton);
        step = std::move(trial);
        residual = trial_residual;
        continue;
      }
    }
    r = std::move(next);
    step = detail::EvaluateLloyd(r);
    residual = detail::MaxMove(step.next, r);
  }
  if (!converged) {
    throw Error(ErrorCode::kNonConvergence,
                "Lloyd-Max did not reach level movement " + std::to_string(tol) +
                    " within " + std::to_string(max_iter) + " iterations");
  }

  q.reconstructions = r;
  q.boundaries = detail::Midpoints(r);
  double mse = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const detail::CellMoments c = detail::NormalCellMoments(
        detail::Edge(q.boundaries, j, false), detail::Edge(q.boundaries, j, true));
    mse += c.second - 2.0 * r[j] * c.first + r[j] * r[j] * c.mass;
  }
  q.mse = std::max(0.0, mse);
  return q;
}

// Encoder: u = u_direction . (x, y), symbol = quantizer cell of u.
// Decoder: (x_hat, y_hat) = regression * reconstruction[symbol], with
// regression = Cov(S, U) = S^{1/2} q_1.
struct DiscreteEquilibrium {
  GameSpec spec;
  Quantizer quantizer;
  double u_x = 0.0;
  double u_y = 0.0;
  double c_x = 0.0;
  double c_y = 0.0;
  std::optional<double> b_over_a;
  EquilibriumReport report;
  std::vector<Warning> warnings;

  int Encode(double x, double y) const { return quantizer.Encode(u_x * x + u_y * y); }
  std::pair<double, double> Decode(int symbol) const {
    const double r = quantizer.Decode(symbol);
    return {c_x * r, c_y * r};
  }
};

inline DiscreteEquilibrium SolveDiscrete(double sigma_x2, double sigma_y2,
                                         double rho, double delta, int levels) {
  GameSpec spec{JointGaussian::Scalar(sigma_x2, sigma_y2, rho), delta,
                Discrete{levels}};
  ValidateSpec(spec);
  const GameSpec noiseless{spec.source, delta};
  const WhiteningTransform t = Whiten(noiseless);

  DiscreteEquilibrium eq{spec, LloydMaxGaussian(levels), 0.0, 0.0, 0.0, 0.0,
                         std::nullopt, {}, {}};
  eq.u_x = t.t_map(0, 0);
  eq.u_y = t.t_map(0, 1);
  const Matrix c = t.sigma_sqrt.matrix() * t.spectrum.q.block(0, 0, 2, 1);
  eq.c_x = c(0, 0);
  eq.c_y = c(1, 0);
  if (eq.u_x != 0.0) eq.b_over_a = eq.u_y / eq.u_x;
  const double captured = 1.0 - eq.quantizer.mse;
  eq.report = EquilibriumReport::FromMses(sigma_x2 - eq.c_x * eq.c_x * captured,
                                          sigma_y2 - eq.c_y * eq.c_y * captured,
                                          delta);
  eq.report.policy = {Matrix{{eq.u_x, eq.u_y}}, Matrix{{eq.c_x}},
                      Matrix{{eq.c_y}}, spec.channel};
  eq.report.spectrum = t.spectrum;
  if (rho == 0.0) {
    eq.warnings.push_back(
        {"ZeroCorrelation", "rho = 0: the equilibrium quantizes Y only"});
  }
  return eq;
}

inline EquilibriumReport EmpiricalDiscreteReport(const DiscreteEquilibrium& eq,
                                                 const SampleBatch& batch) {
  if (batch.s.cols() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "discrete channel needs scalar sources");
  }
  ErrorAccumulator acc(eq.spec.delta);
  for (std::size_t i = 0; i < batch.n; ++i) {
    const double x = batch.s(i, 0);
    const double y = batch.s(i, 1);
    const auto [xh, yh] = eq.Decode(eq.Encode(x, y));
    acc.Add((x - xh) * (x - xh), (y - yh) * (y - yh));
  }
  EquilibriumReport r = acc.Report();
  r.policy = eq.report.policy;
  return r;
}

}  // namespace privsig

#endif  // PRIVSIG_CHANNEL_HPP_
