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

// Problem description (joint Gaussian source, privacy weight, channel),
// linear policies, and exact plus Monte Carlo evaluation of both payoffs.

#ifndef PRIVSIG_MODEL_HPP_
#define PRIVSIG_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "privsig/error.hpp"
#include "privsig/matrix.hpp"
#include "privsig/rng.hpp"
#include "privsig/spectral.hpp"

namespace privsig {

// Zero-mean Gaussian (X, Y) with covariance [[S_X, S_XY], [S_YX, S_Y]],
// X block first.
class JointGaussian {
 public:
  JointGaussian(std::size_t n_x, std::size_t n_y, SymMatrix sigma)
      : n_x_(n_x), n_y_(n_y), sigma_(std::move(sigma)) {
    if (n_x == 0 || n_y == 0 || sigma_.dim() != n_x + n_y) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "covariance of dim " + std::to_string(sigma_.dim()) +
                      " does not match n_x=" + std::to_string(n_x) +
                      ", n_y=" + std::to_string(n_y));
    }
    detail::RequirePositiveDefinite(EigSym(sigma_), "JointGaussian");
  }

  static JointGaussian Scalar(double sigma_x2, double sigma_y2, double rho) {
    if (!(sigma_x2 > 0.0) || !(sigma_y2 > 0.0) || !std::isfinite(rho)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "scalar source needs positive variances and finite rho");
    }
    return JointGaussian(1, 1, SymMatrix{{sigma_x2, rho}, {rho, sigma_y2}});
  }

  std::size_t n_x() const noexcept { return n_x_; }
  std::size_t n_y() const noexcept { return n_y_; }
  std::size_t dim() const noexcept { return n_x_ + n_y_; }
  bool is_scalar() const noexcept { return n_x_ == 1 && n_y_ == 1; }
  const SymMatrix& sigma() const noexcept { return sigma_; }

  SymMatrix sigma_x() const {
    return SymMatrix(sigma_.matrix().block(0, 0, n_x_, n_x_));
  }
  SymMatrix sigma_y() const {
    return SymMatrix(sigma_.matrix().block(n_x_, n_x_, n_y_, n_y_));
  }
  Matrix sigma_xy() const { return sigma_.matrix().block(0, n_x_, n_x_, n_y_); }
  Matrix sigma_yx() const { return sigma_.matrix().block(n_x_, 0, n_y_, n_x_); }

  bool has_cross_covariance() const { return sigma_xy().max_abs() > 0.0; }

 private:
  std::size_t n_x_;
  std::size_t n_y_;
  SymMatrix sigma_;
};

struct Noiseless {
  friend bool operator==(const Noiseless&, const Noiseless&) = default;
};
// Additive Gaussian noise of variance noise_var, average power limit power.
struct Awgn {
  double noise_var = 1.0;
  double power = 1.0;
  friend bool operator==(const Awgn&, const Awgn&) = default;
};
// Noiseless channel carrying one of `levels` symbols.
struct Discrete {
  int levels = 2;
  friend bool operator==(const Discrete&, const Discrete&) = default;
};
using ChannelSpec = std::variant<Noiseless, Awgn, Discrete>;

inline std::string ChannelName(const ChannelSpec& c) {
  switch (c.index()) {
    case 0:
      return "noiseless";
    case 1:
      return "awgn";
    default:
      return "discrete";
  }
}

struct GameSpec {
  JointGaussian source;
  double delta;
  ChannelSpec channel = Noiseless{};
};

inline void ValidateChannel(const JointGaussian& source, const ChannelSpec& c) {
  if (const auto* awgn = std::get_if<Awgn>(&c)) {
    if (!(awgn->noise_var > 0.0) || !(awgn->power > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "awgn channel needs noise_var > 0 and power > 0");
    }
  }
  if (const auto* disc = std::get_if<Discrete>(&c)) {
    if (disc->levels < 2) {
      throw Error(ErrorCode::kInvalidArgument, "discrete channel needs M >= 2");
    }
  }
  if (c.index() != 0 && !source.is_scalar()) {
    throw Error(ErrorCode::kInvalidArgument,
                ChannelName(c) + " channel is only supported for scalar sources");
  }
}

inline void ValidateSpec(const GameSpec& spec) {
  if (!(spec.delta > 0.0) || !std::isfinite(spec.delta)) {
    throw Error(ErrorCode::kInvalidArgument, "delta must be positive and finite");
  }
  ValidateChannel(spec.source, spec.channel);
}

// z = F s (plus channel noise), estimates x_hat = D_X r, y_hat = D_Y r.
struct LinearPolicyPair {
  Matrix f;
  Matrix d_x;
  Matrix d_y;
  ChannelSpec channel = Noiseless{};

  std::size_t message_dim() const noexcept { return f.rows(); }
};

struct MonteCarloStats {
  std::size_t n = 0;
  double se_mse_x = 0.0;
  double se_mse_y = 0.0;
  double se_j_e = 0.0;
};

struct EquilibriumReport {
  double mse_x = 0.0;
  double mse_y = 0.0;
  double j_e = 0.0;  // mse_y - delta * mse_x
  double j_d = 0.0;  // mse_y + mse_x
  LinearPolicyPair policy;
  std::optional<SpectralDecomposition> spectrum;
  std::optional<MonteCarloStats> mc;

  static EquilibriumReport FromMses(double mse_x, double mse_y, double delta) {
    EquilibriumReport r;
    r.mse_x = mse_x;
    r.mse_y = mse_y;
    r.j_e = mse_y - delta * mse_x;
    r.j_d = mse_y + mse_x;
    return r;
  }
};

struct DecoderPair {
  Matrix d_x;
  Matrix d_y;
};

namespace detail {

inline double ChannelNoiseVar(const ChannelSpec& c) {
  if (const auto* awgn = std::get_if<Awgn>(&c)) return awgn->noise_var;
  return 0.0;
}

inline void RequireLinearChannel(const ChannelSpec& c, const char* what) {
  if (std::holds_alternative<Discrete>(c)) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " applies to linear channels only");
  }
}

// Covariance of the received message: F S F^T + noise_var * I. Empty for an
// encoder with no rows.
inline Matrix MessageCovariance(const GameSpec& spec, const Matrix& f) {
  Matrix cov = f * spec.source.sigma().matrix() * f.transpose();
  const double nv = ChannelNoiseVar(spec.channel);
  for (std::size_t i = 0; i < cov.rows(); ++i) cov(i, i) += nv;
  return cov;
}

inline double SumOfProducts(const Matrix& a, const Matrix& b) {
  return Dot(a.data(), b.data());
}

inline double ClampNonnegative(double v) { return v < 0.0 ? 0.0 : v; }

}  // namespace detail

inline constexpr double kPseudoInverseCutoff = 1e-12;

// Exact Gaussian second-moment evaluation of the given policy. Decoders are
// used as given, not replaced by their best responses.
inline EquilibriumReport EvaluateLinear(const GameSpec& spec,
                                        const LinearPolicyPair& policy) {
  ValidateSpec(spec);
  detail::RequireLinearChannel(spec.channel, "EvaluateLinear");
  const std::size_t n = spec.source.dim();
  const std::size_t nx = spec.source.n_x();
  const std::size_t ny = spec.source.n_y();
  const std::size_t m = policy.f.rows();
  if (policy.f.cols() != n || policy.d_x.rows() != nx || policy.d_x.cols() != m ||
      policy.d_y.rows() != ny || policy.d_y.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "policy shapes F " + policy.f.shape() + ", D_X " +
                    policy.d_x.shape() + ", D_Y " + policy.d_y.shape() +
                    " do not fit source (" + std::to_string(nx) + ", " +
                    std::to_string(ny) + ")");
  }
  if (const auto* awgn = std::get_if<Awgn>(&spec.channel)) {
    if (m != 1) {
      throw Error(ErrorCode::kDimensionMismatch, "awgn messages are scalar");
    }
    const double power =
        (policy.f * spec.source.sigma().matrix() * policy.f.transpose())(0, 0);
    if (power > awgn->power * (1.0 + 1e-9) + 1e-9) {
      throw Error(ErrorCode::kInvalidArgument,
                  "encoder power " + std::to_string(power) + " exceeds P=" +
                      std::to_string(awgn->power));
    }
  }

  const Matrix sigma_z = detail::MessageCovariance(spec, policy.f);
  const Matrix sigma_sz = spec.source.sigma().matrix() * policy.f.transpose();
  const Matrix sigma_xz = sigma_sz.block(0, 0, nx, m);
  const Matrix sigma_yz = sigma_sz.block(nx, 0, ny, m);

  auto mse = [&](const Matrix& prior, const Matrix& d, const Matrix& cross) {
    return prior.trace() - 2.0 * detail::SumOfProducts(d, cross) +
           (d * sigma_z * d.transpose()).trace();
  };
  EquilibriumReport r = EquilibriumReport::FromMses(
      detail::ClampNonnegative(mse(spec.source.sigma_x(), policy.d_x, sigma_xz)),
      detail::ClampNonnegative(mse(spec.source.sigma_y(), policy.d_y, sigma_yz)),
      spec.delta);
  r.policy = policy;
  r.policy.channel = spec.channel;
  return r;
}

// Conditional-expectation decoders S_SZ S_Z^+ for a fixed linear encoder.
// A near-singular message covariance falls back to the spectral
// pseudo-inverse with relative cutoff 1e-12.
inline DecoderPair MmseDecoders(const GameSpec& spec, const Matrix& f) {
  ValidateSpec(spec);
  detail::RequireLinearChannel(spec.channel, "MmseDecoders");
  if (f.cols() != spec.source.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "encoder has " + std::to_string(f.cols()) + " columns, source dim " +
                    std::to_string(spec.source.dim()));
  }
  const std::size_t nx = spec.source.n_x();
  if (f.rows() == 0) return {Matrix(nx, 0), Matrix(spec.source.n_y(), 0)};
  const SymMatrix sigma_z_pinv = PseudoInverse(
      SymMatrix(detail::MessageCovariance(spec, f)), kPseudoInverseCutoff);
  const Matrix gain =
      spec.source.sigma().matrix() * f.transpose() * sigma_z_pinv.matrix();
  return {gain.block(0, 0, nx, f.rows()),
          gain.block(nx, 0, spec.source.n_y(), f.rows())};
}

inline LinearPolicyPair WithMmseDecoders(const GameSpec& spec, const Matrix& f) {
  DecoderPair d = MmseDecoders(spec, f);
  return {f, std::move(d.d_x), std::move(d.d_y), spec.channel};
}

// n draws of S = (X, Y), one per row, plus channel noise draws for awgn.
struct SampleBatch {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  Matrix s;
  std::vector<double> w;
};

// Draws are L g with L the Cholesky factor of the covariance; source and
// noise use separate streams of the same seed.
inline SampleBatch Sample(const GameSpec& spec, std::uint64_t seed,
                          std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "sample count must be >= 1");
  ValidateSpec(spec);
  const Matrix l = CholeskyPd(spec.source.sigma());
  const std::size_t dim = spec.source.dim();
  SampleBatch batch;
  batch.seed = seed;
  batch.n = n;
  batch.s = Matrix(n, dim);
  CounterRng source_rng(seed, 0);
  std::vector<double> g(dim);
  for (std::size_t i = 0; i < n; ++i) {
    for (double& v : g) v = source_rng.Normal();
    for (std::size_t r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c <= r; ++c) acc += l(r, c) * g[c];
      batch.s(i, r) = acc;
    }
  }
  if (const auto* awgn = std::get_if<Awgn>(&spec.channel)) {
    CounterRng noise_rng(seed, 1);
    const double sd = std::sqrt(awgn->noise_var);
    batch.w.resize(n);
    for (double& v : batch.w) v = sd * noise_rng.Normal();
  }
  return batch;
}

// Accumulates per-sample squared errors and forms means with standard errors.
class ErrorAccumulator {
 public:
  explicit ErrorAccumulator(double delta) : delta_(delta) {}

  void Add(double err_x2, double err_y2) {
    const double j = err_y2 - delta_ * err_x2;
    ++n_;
    sx_ += err_x2;
    sxx_ += err_x2 * err_x2;
    sy_ += err_y2;
    syy_ += err_y2 * err_y2;
    sj_ += j;
    sjj_ += j * j;
  }

  EquilibriumReport Report() const {
    const double nd = static_cast<double>(n_);
    EquilibriumReport r = EquilibriumReport::FromMses(sx_ / nd, sy_ / nd, delta_);
    auto se = [nd](double s, double ss) {
      if (nd < 2.0) return 0.0;
      const double mean = s / nd;
      const double var = std::max(0.0, (ss - nd * mean * mean) / (nd - 1.0));
      return std::sqrt(var / nd);
    };
    r.mc = MonteCarloStats{n_, se(sx_, sxx_), se(sy_, syy_), se(sj_, sjj_)};
    return r;
  }

 private:
  double delta_;
  std::size_t n_ = 0;
  double sx_ = 0, sxx_ = 0, sy_ = 0, syy_ = 0, sj_ = 0, sjj_ = 0;
};

// Empirical MSEs of a linear policy over a sample batch.
inline EquilibriumReport EmpiricalReport(const GameSpec& spec,
                                         const SampleBatch& batch,
                                         const LinearPolicyPair& policy) {
  detail::RequireLinearChannel(spec.channel, "EmpiricalReport");
  const std::size_t nx = spec.source.n_x();
  const std::size_t ny = spec.source.n_y();
  const std::size_t dim = nx + ny;
  const std::size_t m = policy.f.rows();
  if (batch.s.cols() != dim || policy.f.cols() != dim ||
      policy.d_x.rows() != nx || policy.d_x.cols() != m ||
      policy.d_y.rows() != ny || policy.d_y.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch,
                "EmpiricalReport: batch/policy shapes do not fit the source");
  }
  const bool noisy = std::holds_alternative<Awgn>(spec.channel);
  if (noisy && (m != 1 || batch.w.size() != batch.n)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "EmpiricalReport: awgn needs scalar messages and noise draws");
  }
  ErrorAccumulator acc(spec.delta);
  std::vector<double> z(m);
  for (std::size_t i = 0; i < batch.n; ++i) {
    const auto s = batch.s.row_span(i);
    for (std::size_t k = 0; k < m; ++k) {
      z[k] = Dot(policy.f.row_span(k), s);
      if (noisy) z[k] += batch.w[i];
    }
    double ex2 = 0.0;
    for (std::size_t r = 0; r < nx; ++r) {
      const double e = s[r] - Dot(policy.d_x.row_span(r), z);
      ex2 += e * e;
    }
    double ey2 = 0.0;
    for (std::size_t r = 0; r < ny; ++r) {
      const double e = s[nx + r] - Dot(policy.d_y.row_span(r), z);
      ey2 += e * e;
    }
    acc.Add(ex2, ey2);
  }
  EquilibriumReport r = acc.Report();
  r.policy = policy;
  return r;
}

}  // namespace privsig

#endif  // PRIVSIG_MODEL_HPP_
