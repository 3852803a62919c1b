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

// Information bottleneck variants where the sender observes only X:
//  * MMSE bottleneck: sender cost MSE_Y - delta * MSE_X, receiver uses MMSE.
//  * Constrained MMSE bottleneck: minimize tr(Upsilon Phi) subject to
//    tr(Phi) >= alpha over error covariances Phi.
//  * The mutual-information bottleneck solution, for comparison.

#ifndef PRIVSIG_BOTTLENECK_HPP_
#define PRIVSIG_BOTTLENECK_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "privsig/error.hpp"
#include "privsig/matrix.hpp"
#include "privsig/model.hpp"
#include "privsig/spectral.hpp"

namespace privsig {

enum class IbRegime { kFullyInformative, kPartial, kNoninformative };

inline const char* IbRegimeName(IbRegime r) {
  switch (r) {
    case IbRegime::kFullyInformative:
      return "fully_informative";
    case IbRegime::kPartial:
      return "partial";
    case IbRegime::kNoninformative:
      return "noninformative";
  }
  return "unknown";
}

struct IBSolution {
  IbRegime regime = IbRegime::kNoninformative;
  std::size_t k = 0;  // conveyed directions
  LinearPolicyPair policy;  // encoder columns for Y are zero
  EquilibriumReport report;
  SymMatrix w_ib;  // S_X^{-1/2} S_XY S_YX S_X^{-1/2} - delta S_X
  SpectralDecomposition spectrum;
  std::vector<Warning> warnings;
};

// Encoder rows q_i^T S_X^{-1/2} for the eigenvectors of w_ib with nonnegative
// eigenvalues (zero counts as conveyable, up to the spectral zero_tol).
inline IBSolution SolveMmseIb(const JointGaussian& source, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must be positive and finite");
  }
  const std::size_t nx = source.n_x();
  const std::size_t ny = source.n_y();
  const SymMatrix sx = source.sigma_x();
  const SymMatrix sx_root = SqrtPd(sx);
  const SymMatrix sx_inv_root = InvSqrtPd(sx);
  const Matrix sxy = source.sigma_xy();
  const Matrix syx = source.sigma_yx();

  const Matrix gain = sx_inv_root.matrix() * sxy * syx * sx_inv_root.matrix();
  const Matrix cost = delta * sx.matrix();
  SymMatrix w_ib(gain - cost);
  // Zero is judged against the two terms, since their difference can cancel.
  const double zero_tol = kDefaultRelativeZeroTol *
                          std::max(gain.max_abs(), cost.max_abs());
  SpectralDecomposition spectrum = EigSym(w_ib, EigenOrder::kDescending, zero_tol);
  std::size_t k = 0;
  while (k < nx && spectrum.lambda[k] >= -spectrum.zero_tol) ++k;

  const Matrix qk = spectrum.q.block(0, 0, nx, k);
  const Matrix enc_x = qk.transpose() * sx_inv_root.matrix();
  Matrix f(k, nx + ny);
  f.set_block(0, 0, enc_x);
  LinearPolicyPair policy{f, sx_root.matrix() * qk,
                          syx * sx_inv_root.matrix() * qk, Noiseless{}};

  IBSolution sol;
  sol.k = k;
  sol.regime = k == 0    ? IbRegime::kNoninformative
               : k == nx ? IbRegime::kFullyInformative
                         : IbRegime::kPartial;
  sol.report = EvaluateLinear(GameSpec{source, delta}, policy);
  sol.report.spectrum = spectrum;
  sol.policy = std::move(policy);
  sol.w_ib = std::move(w_ib);
  sol.spectrum = std::move(spectrum);
  if (!source.has_cross_covariance()) {
    sol.warnings.push_back(
        {"ZeroCorrelation", "S_XY = 0: Y is independent of any message"});
  }
  return sol;
}

// z = linear * x + noise, noise ~ N(0, noise_cov) independent of (X, Y).
struct GaussianEncoder {
  Matrix linear;
  Matrix noise_cov;
};

// Error covariance of X given z for a Gaussian encoder on X.
inline Matrix EncoderErrorCovariance(const SymMatrix& sigma_x,
                                     const GaussianEncoder& enc) {
  if (enc.linear.rows() == 0) return sigma_x.matrix();
  const Matrix cross = sigma_x.matrix() * enc.linear.transpose();
  const SymMatrix sz(enc.linear * cross + enc.noise_cov);
  return sigma_x.matrix() -
         cross * PseudoInverse(sz, kPseudoInverseCutoff).matrix() *
             cross.transpose();
}

struct ConstrainedIBSolution {
  double alpha = 0.0;
  SymMatrix upsilon;  // S_X^{-1} S_XY S_YX S_X^{-1}
  double lambda_min = 0.0;
  Matrix phi;  // optimal error covariance
  double objective = 0.0;  // tr(Upsilon Phi)
  GaussianEncoder encoder;
  // Dimension of the eigenspace Phi is supported on and the largest trace an
  // error covariance supported there can reach.
  std::size_t support_dim = 0;
  double support_capacity = 0.0;
  // False when alpha exceeds what the lambda_min eigenspace can absorb; phi
  // is then a feasible point, not a certified optimum.
  bool optimal = true;
  std::vector<Warning> warnings;
};

inline constexpr double kEigenTieRelTol = 1e-9;

namespace detail {

// Error covariance t * E C E^T with C = (E^T S_X^{-1} E)^{-1}: reveal
// the complement of span(E) exactly and E^T x through Gaussian noise of
// covariance t / (1 - t) * C.
struct SubspaceDesign {
  Matrix phi;
  GaussianEncoder encoder;
  double capacity;
};

inline SubspaceDesign DesignOnSubspace(const SymMatrix& sigma_x_inv,
                                       const Matrix& q, std::size_t first,
                                       double alpha) {
  const std::size_t n = q.rows();
  const std::size_t m = n - first;
  const Matrix e = q.block(0, first, n, m);
  const Matrix complement = q.block(0, 0, n, first);
  const SymMatrix c = InversePd(Congruence(e.transpose(), sigma_x_inv.matrix()));
  const double capacity = c.trace();
  const double t = capacity > 0.0 ? std::min(1.0, alpha / capacity) : 0.0;

  SubspaceDesign out;
  out.capacity = capacity;
  out.phi = t * (e * c.matrix() * e.transpose());
  // 1 - t below this is treated as "nothing revealed along E".
  constexpr double kFullHide = 1e-14;
  if (1.0 - t <= kFullHide) {
    out.encoder.linear = complement.transpose();
    out.encoder.noise_cov = Matrix(first, first);
  } else {
    out.encoder.linear = VStack(complement.transpose(), e.transpose());
    Matrix noise(n, n);
    noise.set_block(first, first, (t / (1.0 - t)) * c.matrix());
    out.encoder.noise_cov = noise;
  }
  return out;
}

}  // namespace detail

inline ConstrainedIBSolution SolveConstrainedIb(const JointGaussian& source,
                                                double alpha) {
  const SymMatrix sx = source.sigma_x();
  if (!(alpha >= 0.0) || alpha > sx.trace()) {
    throw Error(ErrorCode::kAlphaOutOfRange,
                "alpha must lie in [0, tr(S_X)] = [0, " +
                    std::to_string(sx.trace()) + "]");
  }
  const std::size_t n = source.n_x();
  const SymMatrix sx_inv = InversePd(sx);
  const Matrix sxy = source.sigma_xy();
  SymMatrix upsilon(sx_inv.matrix() * sxy * source.sigma_yx() * sx_inv.matrix());
  // Descending order: the lambda_min eigenspace occupies the last columns.
  const SpectralDecomposition d = EigSym(upsilon, EigenOrder::kDescending);
  const double lmin = d.lambda.back();
  double lmax_abs = 0.0;
  for (double l : d.lambda) lmax_abs = std::max(lmax_abs, std::abs(l));
  const double tie = kEigenTieRelTol * std::max(lmax_abs, 1e-300);
  std::size_t tied_first = n - 1;
  while (tied_first > 0 && d.lambda[tied_first - 1] - lmin <= tie) --tied_first;

  ConstrainedIBSolution sol;
  sol.alpha = alpha;
  sol.lambda_min = lmin;

  // A single eigenvector first, then the whole tied eigenspace, then growing
  // nested eigenspaces (feasible but no longer optimal).
  detail::SubspaceDesign design =
      detail::DesignOnSubspace(sx_inv, d.q, n - 1, alpha);
  std::size_t first = n - 1;
  const double slack = 1.0 + 1e-12;
  if (alpha > design.capacity * slack && tied_first < n - 1) {
    first = tied_first;
    design = detail::DesignOnSubspace(sx_inv, d.q, first, alpha);
    sol.warnings.push_back({"TiedMinimalEigenspace",
                            "alpha exceeds one direction; spread over the tied "
                            "lambda_min eigenspace"});
  }
  if (alpha > design.capacity * slack) {
    sol.optimal = false;
    sol.warnings.push_back(
        {"InfeasibleAlongMinimalEigenspace",
         "alpha exceeds the capacity of the lambda_min eigenspace; reporting a "
         "feasible nested-eigenspace design"});
    while (first > 0 && alpha > design.capacity * slack) {
      --first;
      design = detail::DesignOnSubspace(sx_inv, d.q, first, alpha);
    }
  }
  sol.support_dim = n - first;
  sol.support_capacity = design.capacity;
  sol.phi = std::move(design.phi);
  sol.encoder = std::move(design.encoder);
  sol.objective = (upsilon.matrix() * sol.phi).trace();
  sol.upsilon = std::move(upsilon);
  return sol;
}

struct ChechikSolution {
  double beta = 0.0;
  Matrix a_matrix;  // n_x by n_x; row i is alpha_i p_i^T or zero
  std::size_t active_count = 0;
  std::vector<double> betas_critical;  // 1 / (1 - lambda_i); +inf if lambda_i = 1
  std::vector<double> lambdas;         // ascending
  Matrix p;                            // left eigenvectors p_i in columns
  std::vector<double> alphas;          // zero for inactive rows
  Matrix noise_cov;                    // identity
};

// Gaussian mutual-information bottleneck: z = A(beta) x + xi, xi ~ N(0, I),
// with p_i^T the left eigenvectors of S_{X|Y} S_X^{-1}.
inline ChechikSolution SolveChechik(const JointGaussian& source, double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must be finite and >= 0");
  }
  const std::size_t n = source.n_x();
  const SymMatrix sx = source.sigma_x();
  const SymMatrix sx_inv_root = InvSqrtPd(sx);
  const Matrix sxy = source.sigma_xy();
  const SymMatrix cond(sx.matrix() -
                       sxy * InversePd(source.sigma_y()).matrix() *
                           source.sigma_yx());
  // S_X^{-1/2} S_{X|Y} S_X^{-1/2} v = l v  <=>  p^T = v^T S_X^{-1/2} is a left
  // eigenvector of S_{X|Y} S_X^{-1}.
  const SpectralDecomposition d = EigSym(
      Congruence(sx_inv_root.matrix(), cond.matrix()), EigenOrder::kDescending);

  ChechikSolution sol;
  sol.beta = beta;
  sol.a_matrix = Matrix(n, n);
  sol.p = Matrix(n, n);
  sol.noise_cov = Matrix::Identity(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t src = n - 1 - i;  // ascending
    const double lambda = d.lambda[src];
    Matrix v(n, 1);
    for (std::size_t r = 0; r < n; ++r) v(r, 0) = d.q(r, src);
    Matrix p = sx_inv_root.matrix() * v;
    p *= 1.0 / p.frobenius_norm();
    sol.p.set_block(0, i, p);
    sol.lambdas.push_back(lambda);
    const double gap = 1.0 - lambda;
    const double beta_c = gap > 1e-14 ? 1.0 / gap
                                      : std::numeric_limits<double>::infinity();
    sol.betas_critical.push_back(beta_c);
    double alpha = 0.0;
    if (beta >= beta_c && lambda > 0.0) {
      const double p_sx_p = (p.transpose() * sx.matrix() * p)(0, 0);
      alpha = std::sqrt(std::max(0.0, beta * gap - 1.0) / (lambda * p_sx_p));
      for (std::size_t c = 0; c < n; ++c) sol.a_matrix(i, c) = alpha * p(c, 0);
      ++sol.active_count;
    }
    sol.alphas.push_back(alpha);
  }
  return sol;
}

// z = f s + noise over the full source s = (X, Y).
struct GaussianChannelPolicy {
  Matrix f;
  Matrix noise_cov;
};

// Embeds an X-only encoder as a policy on (X, Y).
inline GaussianChannelPolicy OnFullSource(const JointGaussian& source,
                                          const Matrix& x_map,
                                          const Matrix& noise_cov) {
  Matrix f(x_map.rows(), source.dim());
  f.set_block(0, 0, x_map);
  return {f, noise_cov};
}

struct MutualInformation {
  double i_xz = 0.0;  // nats
  double i_yz = 0.0;
};

namespace detail {

struct PseudoLogDet {
  double value = 0.0;
  std::size_t rank = 0;
};

inline PseudoLogDet LogPseudoDeterminant(const Matrix& m, double cutoff) {
  PseudoLogDet out;
  if (m.rows() == 0) return out;
  for (double l : EigSym(SymMatrix(m)).lambda) {
    if (l > cutoff) {
      out.value += std::log(l);
      ++out.rank;
    }
  }
  return out;
}

}  // namespace detail

// Gaussian I(X;Z) and I(Y;Z) via log-(pseudo)determinants. A message with a
// component that is deterministic given X (resp. Y) but not constant carries
// infinite information, reported as +inf.
inline MutualInformation GaussianMutualInformation(
    const JointGaussian& source, const GaussianChannelPolicy& policy) {
  const std::size_t n = source.dim();
  const std::size_t m = policy.f.rows();
  if (policy.f.cols() != n || policy.noise_cov.rows() != m ||
      policy.noise_cov.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "GaussianMutualInformation: policy shapes do not fit the source");
  }
  MutualInformation out;
  if (m == 0) return out;
  const Matrix& sigma = source.sigma().matrix();
  const Matrix sz = policy.f * sigma * policy.f.transpose() + policy.noise_cov;
  double scale = 0.0;
  for (double l : EigSym(SymMatrix(sz)).lambda) scale = std::max(scale, l);
  const double cutoff = 1e-12 * scale;
  const detail::PseudoLogDet full = detail::LogPseudoDeterminant(sz, cutoff);

  auto info_given = [&](std::size_t offset, std::size_t size) {
    // Covariance of s given the block [offset, offset + size).
    Matrix cross(n, size);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < size; ++c) cross(r, c) = sigma(r, offset + c);
    }
    const SymMatrix block(sigma.block(offset, offset, size, size));
    const Matrix cond =
        sigma - cross * InversePd(block).matrix() * cross.transpose();
    const Matrix szc = policy.f * cond * policy.f.transpose() + policy.noise_cov;
    const detail::PseudoLogDet given = detail::LogPseudoDeterminant(szc, cutoff);
    if (given.rank > full.rank) {
      throw Error(ErrorCode::kDegenerateCovariance,
                  "conditional message covariance has larger rank than the "
                  "marginal");
    }
    if (given.rank < full.rank) return std::numeric_limits<double>::infinity();
    return std::max(0.0, 0.5 * (full.value - given.value));
  };
  out.i_xz = info_given(0, source.n_x());
  out.i_yz = info_given(source.n_x(), source.n_y());
  return out;
}

}  // namespace privsig

#endif  // PRIVSIG_BOTTLENECK_HPP_
