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

// Linear equilibria of the noiseless privacy-signaling game.
//
// With W = S^{1/2} diag(-delta I, I) S^{1/2} = Q L Q^T and the whitened
// coordinates T = Q^T S^{-1/2} s, the sender's cost is sum_i l_i MSE(T_i).
// The n_y coordinates with positive l_i (U) are worth conveying, the n_x
// with negative l_i (V) are worth hiding; every equilibrium encoder is a
// rescaling of the U coordinates.

#ifndef PRIVSIG_EQUILIBRIUM_HPP_
#define PRIVSIG_EQUILIBRIUM_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "privsig/error.hpp"
#include "privsig/matrix.hpp"
#include "privsig/model.hpp"
#include "privsig/spectral.hpp"

namespace privsig {

struct WhiteningTransform {
  SymMatrix w;
  SpectralDecomposition spectrum;  // positives first
  Matrix t_map;                    // Q^T S^{-1/2}
  SymMatrix k;                     // Q^T S Q
  SymMatrix sigma_sqrt;
  SymMatrix sigma_inv_sqrt;

  std::size_t n_u() const noexcept {
    return static_cast<std::size_t>(spectrum.inertia.positive);
  }
};

// Sender weights on the squared error of each source coordinate.
inline std::vector<double> PrivacyWeights(const JointGaussian& source,
                                          double delta) {
  std::vector<double> d(source.dim(), 1.0);
  for (std::size_t i = 0; i < source.n_x(); ++i) d[i] = -delta;
  return d;
}

// Only the source and delta matter; any channel in spec is ignored.
inline WhiteningTransform Whiten(const GameSpec& spec) {
  if (!(spec.delta > 0.0) || !std::isfinite(spec.delta)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must be positive and finite");
  }
  const JointGaussian& src = spec.source;
  const SymMatrix root = SqrtPd(src.sigma());
  const SymMatrix inv_root = InvSqrtPd(src.sigma());
  const std::vector<double> weights = PrivacyWeights(src, spec.delta);
  const SymMatrix w(root.matrix() * Matrix::Diagonal(weights) * root.matrix());
  SpectralDecomposition spectrum = EigSym(w, EigenOrder::kPositivesFirst);

  const Inertia expected{static_cast<int>(src.n_y()),
                         static_cast<int>(src.n_x()), 0};
  if (!(spectrum.inertia == expected)) {
    throw Error(ErrorCode::kInternal,
                "inertia of W is (" + std::to_string(spectrum.inertia.positive) +
                    "," + std::to_string(spectrum.inertia.negative) + "," +
                    std::to_string(spectrum.inertia.zero) +
                    "), expected (n_y, n_x, 0); covariance too ill-conditioned");
  }
  const Matrix qt = spectrum.q.transpose();
  Matrix t_map = qt * inv_root.matrix();
  SymMatrix k = Congruence(qt, src.sigma().matrix());
  return {w, std::move(spectrum), std::move(t_map), std::move(k), root, inv_root};
}

struct NashSolution {
  GameSpec spec;
  WhiteningTransform transform;
  std::vector<double> alphas;
  LinearPolicyPair policy;
  EquilibriumReport report;
  bool payoff_dominant = false;
  std::vector<Warning> warnings;
  // Scalar sources only: B/A from the closed form and from the eigenvector.
  std::optional<double> b_over_a;
  std::optional<double> b_over_a_vector;
};

namespace detail {

inline void RequireNoiseless(const GameSpec& spec, const char* what) {
  if (!std::holds_alternative<Noiseless>(spec.channel)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " solves the noiseless game only");
  }
}

inline std::vector<Warning> SourceWarnings(const JointGaussian& source) {
  std::vector<Warning> out;
  if (!source.has_cross_covariance()) {
    out.push_back({"ZeroCorrelation",
                   "S_XY = 0: the game decouples; equilibrium transmits Y only"});
  }
  return out;
}

}  // namespace detail

// Encoder rows alpha_i q_i^T S^{-1/2} for i < n_y, decoder columns
// S^{1/2} q_i / alpha_i (zero where alpha_i = 0). Default alphas are ones.
inline NashSolution SolveNash(const GameSpec& spec,
                              std::optional<std::vector<double>> alphas = {}) {
  ValidateSpec(spec);
  detail::RequireNoiseless(spec, "SolveNash");
  WhiteningTransform transform = Whiten(spec);
  const std::size_t nx = spec.source.n_x();
  const std::size_t ny = spec.source.n_y();
  const std::size_t n = nx + ny;
  std::vector<double> a = alphas.value_or(std::vector<double>(ny, 1.0));
  if (a.size() != ny) {
    throw Error(ErrorCode::kInvalidAlphas,
                "expected " + std::to_string(ny) + " alphas, got " +
                    std::to_string(a.size()));
  }
  bool all_nonzero = true;
  for (double v : a) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidAlphas, "alphas must be finite");
    }
    all_nonzero = all_nonzero && v != 0.0;
  }

  Matrix f(ny, n);
  Matrix g(n, ny);
  const Matrix root_q = transform.sigma_sqrt.matrix() * transform.spectrum.q;
  for (std::size_t i = 0; i < ny; ++i) {
    const double beta = a[i] != 0.0 ? 1.0 / a[i] : 0.0;
    for (std::size_t c = 0; c < n; ++c) f(i, c) = a[i] * transform.t_map(i, c);
    for (std::size_t r = 0; r < n; ++r) g(r, i) = beta * root_q(r, i);
  }
  LinearPolicyPair policy{f, g.block(0, 0, nx, ny), g.block(nx, 0, ny, ny),
                          spec.channel};
  EquilibriumReport report = EvaluateLinear(spec, WithMmseDecoders(spec, f));
  report.spectrum = transform.spectrum;
  return NashSolution{spec,
                      std::move(transform),
                      std::move(a),
                      std::move(policy),
                      std::move(report),
                      all_nonzero,
                      detail::SourceWarnings(spec.source),
                      std::nullopt,
                      std::nullopt};
}

// The payoff-dominant Nash equilibrium, which is also the Stackelberg
// solution.
inline NashSolution SolveStackelberg(const GameSpec& spec) {
  return SolveNash(spec);
}

struct ScalarEigenvalues {
  double positive;  // lambda_1 > 0
  double negative;  // lambda_2 < 0
};

// (delta s_x^2 + s_y^2)^2 - 4 delta rho^2, written as a sum of nonnegative
// terms for valid covariances.
inline double ScalarDiscriminant(double sigma_x2, double sigma_y2, double rho,
                                 double delta) {
  const double d = delta * sigma_x2 - sigma_y2;
  return d * d + 4.0 * delta * (sigma_x2 * sigma_y2 - rho * rho);
}

inline ScalarEigenvalues ScalarWEigenvalues(double sigma_x2, double sigma_y2,
                                            double rho, double delta) {
  const double root = std::sqrt(ScalarDiscriminant(sigma_x2, sigma_y2, rho, delta));
  const double l1 = 0.5 * (sigma_y2 - delta * sigma_x2) + 0.5 * root;
  // l1 * l2 = det(S diag(-delta, 1)); avoids cancellation in l2.
  const double l2 = -delta * (sigma_x2 * sigma_y2 - rho * rho) / l1;
  return {l1, l2};
}

// Closed-form encoder ratio B/A (minus root).
inline double ScalarBOverA(double sigma_x2, double sigma_y2, double rho,
                           double delta) {
  const double s = delta * sigma_x2 + sigma_y2;
  const double disc = ScalarDiscriminant(sigma_x2, sigma_y2, rho, delta);
  if (disc < 0.0) {
    throw Error(ErrorCode::kInternal, "negative discriminant for a valid covariance");
  }
  return -(s + std::sqrt(disc)) / (2.0 * delta * rho);
}

inline constexpr double kScalarDirectionTol = 1e-9;

// Scalar Nash/Stackelberg solution with A = 1, B = B/A and the matching
// linear MMSE decoders. The vector solver runs alongside and its encoder
// direction must agree with the closed form. rho = 0 returns the decoupled
// vector solution (transmit Y) with a ZeroCorrelation warning.
inline NashSolution SolveScalar(double sigma_x2, double sigma_y2, double rho,
                                double delta) {
  GameSpec spec{JointGaussian::Scalar(sigma_x2, sigma_y2, rho), delta};
  NashSolution vec = SolveNash(spec);
  if (rho == 0.0) return vec;

  const double a_vec = vec.policy.f(0, 0);
  const double b_vec = vec.policy.f(0, 1);
  const double ratio = ScalarBOverA(sigma_x2, sigma_y2, rho, delta);
  const double sine = std::abs(a_vec * ratio - b_vec) /
                      (std::hypot(a_vec, b_vec) * std::hypot(1.0, ratio));
  if (sine > kScalarDirectionTol) {
    throw Error(ErrorCode::kInternal,
                "closed-form and eigenvector encoder directions disagree (sin " +
                    std::to_string(sine) + ")");
  }

  const double power = sigma_x2 + ratio * ratio * sigma_y2 + 2.0 * ratio * rho;
  LinearPolicyPair policy{Matrix{{1.0, ratio}},
                          Matrix{{(sigma_x2 + ratio * rho) / power}},
                          Matrix{{(rho + ratio * sigma_y2) / power}},
                          Noiseless{}};
  vec.report = EvaluateLinear(spec, policy);
  vec.report.spectrum = vec.transform.spectrum;
  vec.alphas = {1.0 / vec.transform.t_map(0, 0)};
  vec.policy = std::move(policy);
  vec.b_over_a = ratio;
  vec.b_over_a_vector = b_vec / a_vec;
  return vec;
}

}  // namespace privsig

#endif  // PRIVSIG_EQUILIBRIUM_HPP_
