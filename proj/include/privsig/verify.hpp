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

// Numerical certification of equilibrium claims: encoder and decoder best
// responses for scalar Nash solutions, deviation sampling for Stackelberg
// solutions, and agreement between analytic and sampled reports.

#ifndef PRIVSIG_VERIFY_HPP_
#define PRIVSIG_VERIFY_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "privsig/channel.hpp"
#include "privsig/equilibrium.hpp"
#include "privsig/error.hpp"
#include "privsig/matrix.hpp"
#include "privsig/model.hpp"
#include "privsig/rng.hpp"

namespace privsig {

enum class Verdict { kCertified, kViolated, kIndefiniteEncoderCost };

inline const char* VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kCertified:
      return "certified";
    case Verdict::kViolated:
      return "violated";
    case Verdict::kIndefiniteEncoderCost:
      return "indefinite_encoder_cost";
  }
  return "unknown";
}

struct DeviationReport {
  double baseline_je = 0.0;
  std::size_t tested = 0;
  double best_deviation_je = 0.0;
  double margin = 0.0;  // best_deviation_je - baseline_je
  Verdict verdict = Verdict::kCertified;
  std::string details;

  bool certified() const noexcept { return verdict == Verdict::kCertified; }
};

inline constexpr double kVerifyTol = 1e-8;
inline constexpr double kVerifyKSigma = 4.0;

namespace detail {

inline double ScaledTol(double tol, double scale) {
  return tol * std::max(1.0, std::abs(scale));
}

inline void RequireScalarLinear(const GameSpec& spec, const LinearPolicyPair& p) {
  if (!spec.source.is_scalar()) {
    throw Error(ErrorCode::kInvalidArgument, "CheckNashScalar needs a scalar source");
  }
  if (p.f.rows() != 1 || p.f.cols() != 2) {
    throw Error(ErrorCode::kDimensionMismatch, "scalar Nash check needs a 1x2 encoder");
  }
}

}  // namespace detail

// Best-response test for a scalar linear policy. The decoders must be the
// MMSE decoders of the encoder, and the encoder must minimize the pointwise
// sender cost (y - c_Y z)^2 - delta (x - c_X z)^2 against the fixed decoders.
// Over AWGN the minimizer is taken under the power limit: the encoder must
// be collinear with (-delta c_X, c_Y) with a nonnegative multiplier, and
// a positive multiplier requires the full power.
inline DeviationReport CheckNashScalar(const GameSpec& spec,
                                       const LinearPolicyPair& policy,
                                       double tol = kVerifyTol) {
  ValidateSpec(spec);
  detail::RequireScalarLinear(spec, policy);
  const double a = policy.f(0, 0);
  const double b = policy.f(0, 1);
  const double cx = policy.d_x(0, 0);
  const double cy = policy.d_y(0, 0);
  const double delta = spec.delta;

  DeviationReport rep;
  rep.tested = 1;
  rep.baseline_je = EvaluateLinear(spec, policy).j_e;
  rep.best_deviation_je = rep.baseline_je;
  std::ostringstream why;

  const DecoderPair mmse = MmseDecoders(spec, policy.f);
  const double dec_err = std::max(std::abs(mmse.d_x(0, 0) - cx),
                                  std::abs(mmse.d_y(0, 0) - cy));
  // Tolerances are relative: rescaling the encoder by c rescales the
  // decoders by 1/c and the curvature by 1/c^2.
  const double dec_scale = std::max(std::abs(cx), std::abs(cy));
  const bool decoders_ok = dec_err <= tol * dec_scale;
  if (!decoders_ok) why << "decoders differ from MMSE by " << dec_err << "; ";

  const double curvature = cy * cy - delta * cx * cx;
  const double gx = -delta * cx;
  const double gy = cy;
  const double enc_scale = std::abs(a) + std::abs(b);
  const auto* awgn = std::get_if<Awgn>(&spec.channel);

  if (awgn == nullptr) {
    if (curvature <= tol * (cy * cy + delta * cx * cx)) {
      rep.verdict = Verdict::kIndefiniteEncoderCost;
      why << "c_Y^2 - delta c_X^2 = " << curvature << " is not positive";
      rep.details = why.str();
      return rep;
    }
    const double za = gx / curvature;
    const double zb = gy / curvature;
    LinearPolicyPair best = policy;
    best.f = Matrix{{za, zb}};
    rep.best_deviation_je = EvaluateLinear(spec, best).j_e;
    const double enc_err = std::max(std::abs(za - a), std::abs(zb - b));
    const bool encoder_ok = enc_err <= tol * enc_scale;
    if (!encoder_ok) {
      why << "encoder best response (" << za << ", " << zb << ") differs from ("
          << a << ", " << b << ")";
    }
    rep.verdict = decoders_ok && encoder_ok ? Verdict::kCertified : Verdict::kViolated;
  } else {
    const double ff = a * a + b * b;
    const double t = (gx * a + gy * b) / ff;
    const double enc_err = std::max(std::abs(gx - t * a), std::abs(gy - t * b));
    const double mu = t - curvature;
    const bool collinear =
        t > 0.0 && enc_err <= tol * std::hypot(gx, gy);
    const double power =
        (policy.f * spec.source.sigma().matrix() * policy.f.transpose())(0, 0);
    const bool multiplier_ok = mu >= -detail::ScaledTol(tol, t);
    const bool slack_ok = mu <= detail::ScaledTol(tol, t) ||
                          std::abs(power - awgn->power) <=
                              detail::ScaledTol(tol, awgn->power);
    if (!collinear) why << "encoder is not collinear with (" << gx << ", " << gy << "); ";
    if (!multiplier_ok) why << "power multiplier " << mu << " is negative; ";
    if (!slack_ok) why << "power constraint slack with positive multiplier";

    // Constrained best response: unconstrained minimizer if it is feasible,
    // else the cost direction at full power.
    const Matrix g{{gx, gy}};
    const double g_power = (g * spec.source.sigma().matrix() * g.transpose())(0, 0);
    double scale = curvature > 0.0 ? 1.0 / curvature : 0.0;
    if (curvature <= 0.0 || g_power * scale * scale > awgn->power) {
      scale = std::sqrt(awgn->power / g_power);
    }
    LinearPolicyPair best = policy;
    best.f = g * scale;
    rep.best_deviation_je = EvaluateLinear(spec, best).j_e;
    rep.verdict = decoders_ok && collinear && multiplier_ok && slack_ok
                      ? Verdict::kCertified
                      : Verdict::kViolated;
  }
  rep.margin = rep.best_deviation_je - rep.baseline_je;
  rep.details = why.str();
  return rep;
}

inline DeviationReport CheckNashScalar(const NashSolution& sol,
                                       double tol = kVerifyTol) {
  return CheckNashScalar(sol.spec, sol.policy, tol);
}

inline DeviationReport CheckNashScalar(const NoisyEquilibrium& eq,
                                       double tol = kVerifyTol) {
  return CheckNashScalar(eq.spec, eq.report.policy, tol);
}

struct StackelbergOptions {
  std::size_t n_linear = 200;
  std::size_t n_nonlinear = 30;
  std::size_t mc_samples = 100000;
  std::size_t bins = 200;
  std::uint64_t seed = 42;
  double tol = kVerifyTol;
  double k_sigma = kVerifyKSigma;
};

namespace detail {

// Exponents of the nonlinear family sign(u) |u|^p.
inline constexpr double kNonlinearPowers[] = {1.0 / 3.0, 1.0, 3.0};

inline double SignedPower(double u, double p) {
  return std::copysign(std::pow(std::abs(u), p), u);
}

// E|N|^(2p) for N standard normal.
inline double AbsNormalMoment(double p) {
  return std::pow(2.0, p) * std::tgamma(p + 0.5) / std::sqrt(std::numbers::pi);
}

inline Matrix RandomGaussianMatrix(CounterRng& rng, std::size_t rows,
                                   std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = rng.Normal();
  }
  return m;
}

inline double EncoderPower(const GameSpec& spec, const Matrix& f) {
  return (f * spec.source.sigma().matrix() * f.transpose())(0, 0);
}

// Scalar encoder rescaled to power fraction * P.
inline Matrix ToPower(const GameSpec& spec, const Matrix& f, double power) {
  return f * std::sqrt(power / EncoderPower(spec, f));
}

struct SampledJe {
  double j_e;
  double se;
};

// J^e of z = sign(g s)|g s|^p against the binned conditional-mean decoder.
// Equal-probability bins of the received value; each within-bin squared
// error is inflated by n_b / (n_b - 1), which makes the estimate unbiased
// for the binned receiver.
inline SampledJe SampleNonlinear(const GameSpec& spec, const Matrix& pre_map,
                                 double p, double gain, std::uint64_t seed,
                                 const StackelbergOptions& opt) {
  const SampleBatch batch = Sample(spec, seed, opt.mc_samples);
  const std::size_t n = batch.n;
  const std::size_t dim = spec.source.dim();
  const std::size_t nx = spec.source.n_x();
  std::vector<double> r(n);
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = gain * SignedPower(Dot(pre_map.row_span(0), batch.s.row_span(i)), p);
    if (!batch.w.empty()) r[i] += batch.w[i];
  }
  std::vector<double> sorted = r;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t bins = std::max<std::size_t>(1, std::min(opt.bins, n));
  std::vector<double> edges(bins - 1);
  for (std::size_t k = 1; k < bins; ++k) edges[k - 1] = sorted[k * n / bins];

  std::vector<std::size_t> bin_of(n);
  std::vector<std::size_t> count(bins, 0);
  Matrix sums(bins, dim);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = static_cast<std::size_t>(
        std::upper_bound(edges.begin(), edges.end(), r[i]) - edges.begin());
    bin_of[i] = b;
    ++count[b];
    for (std::size_t c = 0; c < dim; ++c) sums(b, c) += batch.s(i, c);
  }
  ErrorAccumulator acc(spec.delta);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t b = bin_of[i];
    const double nb = static_cast<double>(count[b]);
    const double inflate = nb > 1.0 ? nb / (nb - 1.0) : 1.0;
    double ex2 = 0.0, ey2 = 0.0;
    for (std::size_t c = 0; c < dim; ++c) {
      const double e = batch.s(i, c) - sums(b, c) / nb;
      (c < nx ? ex2 : ey2) += e * e;
    }
    acc.Add(inflate * ex2, inflate * ey2);
  }
  const EquilibriumReport rep = acc.Report();
  return {rep.j_e, rep.mc->se_j_e};
}

}  // namespace detail

// Samples deviating encoders, lets the receiver best-respond to each, and
// checks that none lowers the sender cost below the baseline. Candidates,
// in order: the full-alpha encoder, the baseline with a V row appended
// (noiseless only), random linear maps (half unstructured, half U-span
// mixes with V leakage), then the nonlinear family over random pre-maps.
// Candidate i draws from stream i of the seed.
inline DeviationReport CheckStackelberg(const GameSpec& spec,
                                        const LinearPolicyPair& baseline,
                                        const StackelbergOptions& opt = {}) {
  ValidateSpec(spec);
  detail::RequireLinearChannel(spec.channel, "CheckStackelberg");
  const auto* awgn = std::get_if<Awgn>(&spec.channel);
  const GameSpec noiseless{spec.source, spec.delta};
  const WhiteningTransform t = Whiten(noiseless);
  const std::size_t n = spec.source.dim();
  const std::size_t ny = spec.source.n_y();
  const std::size_t nx = spec.source.n_x();
  const Matrix t_u = t.t_map.block(0, 0, ny, n);
  const Matrix t_v = t.t_map.block(ny, 0, nx, n);

  DeviationReport rep;
  rep.baseline_je = EvaluateLinear(spec, baseline).j_e;
  rep.best_deviation_je = std::numeric_limits<double>::infinity();
  const double lin_tol = detail::ScaledTol(opt.tol, rep.baseline_je);
  std::ostringstream why;
  std::size_t index = 0;

  auto try_linear = [&](const Matrix& f, const char* kind) {
    const double je = EvaluateLinear(spec, WithMmseDecoders(spec, f)).j_e;
    ++rep.tested;
    rep.best_deviation_je = std::min(rep.best_deviation_je, je);
    if (je < rep.baseline_je - lin_tol && rep.verdict == Verdict::kCertified) {
      rep.verdict = Verdict::kViolated;
      why << kind << " candidate " << index << " reaches J^e " << je
          << " below baseline " << rep.baseline_je;
    }
  };

  if (awgn == nullptr) {
    try_linear(t_u, "full-alpha");
    ++index;
    try_linear(VStack(baseline.f, t_v.block(0, 0, 1, n)), "v-leak");
    ++index;
  } else {
    try_linear(detail::ToPower(spec, t_u, awgn->power), "full-power");
    ++index;
  }

  for (std::size_t k = 0; k < opt.n_linear; ++k, ++index) {
    CounterRng rng(opt.seed, index);
    Matrix f;
    if (k % 2 == 0) {
      const std::size_t rows = awgn ? 1 : 1 + static_cast<std::size_t>(
                                                  rng.Uniform() * static_cast<double>(n));
      f = detail::RandomGaussianMatrix(rng, std::min(rows, n), n);
    } else {
      const std::size_t rows = awgn ? 1 : ny;
      const double leak = rng.Uniform();
      f = detail::RandomGaussianMatrix(rng, rows, ny) * t_u +
          detail::RandomGaussianMatrix(rng, rows, nx) * t_v * leak;
    }
    if (awgn) f = detail::ToPower(spec, f, awgn->power * rng.Uniform());
    try_linear(f, "linear");
  }

  for (std::size_t k = 0; k < opt.n_nonlinear; ++k, ++index) {
    CounterRng rng(opt.seed, index);
    const double p =
        detail::kNonlinearPowers[k % std::size(detail::kNonlinearPowers)];
    const Matrix pre = detail::RandomGaussianMatrix(rng, 1, n);
    double gain = 1.0;
    if (awgn) {
      const double var_u = detail::EncoderPower(spec, pre);
      const double power = awgn->power * rng.Uniform();
      gain = std::sqrt(power / (std::pow(var_u, p) * detail::AbsNormalMoment(p)));
    }
    const detail::SampledJe s =
        detail::SampleNonlinear(spec, pre, p, gain, rng.NextU64(), opt);
    ++rep.tested;
    rep.best_deviation_je = std::min(rep.best_deviation_je, s.j_e);
    if (s.j_e < rep.baseline_je - opt.k_sigma * s.se - lin_tol &&
        rep.verdict == Verdict::kCertified) {
      rep.verdict = Verdict::kViolated;
      why << "nonlinear candidate " << index << " (p=" << p << ") reaches J^e "
          << s.j_e << " +- " << s.se << " below baseline " << rep.baseline_je;
    }
  }
  rep.margin = rep.best_deviation_je - rep.baseline_je;
  rep.details = why.str();
  return rep;
}

struct ConsistencyReport {
  EquilibriumReport analytic;
  EquilibriumReport empirical;
  double z_x = 0.0;  // standardized differences
  double z_y = 0.0;
  bool pass = false;
};

namespace detail {

inline ConsistencyReport CompareReports(EquilibriumReport analytic,
                                        EquilibriumReport empirical,
                                        double k_sigma) {
  ConsistencyReport c;
  c.analytic = std::move(analytic);
  c.empirical = std::move(empirical);
  auto z = [](double a, double e, double se) {
    const double d = std::abs(a - e);
    if (se > 0.0) return d / se;
    return d <= 1e-12 * std::max(1.0, std::abs(a)) ? 0.0
                                                   : std::numeric_limits<double>::infinity();
  };
  c.z_x = z(c.analytic.mse_x, c.empirical.mse_x, c.empirical.mc->se_mse_x);
  c.z_y = z(c.analytic.mse_y, c.empirical.mse_y, c.empirical.mc->se_mse_y);
  c.pass = c.z_x <= k_sigma && c.z_y <= k_sigma;
  return c;
}

}  // namespace detail

// Analytic and sampled MSEs of the same policy, compared in standard errors.
inline ConsistencyReport CheckConsistency(const GameSpec& spec,
                                          const LinearPolicyPair& policy,
                                          std::size_t n, std::uint64_t seed,
                                          double k_sigma = kVerifyKSigma) {
  return detail::CompareReports(EvaluateLinear(spec, policy),
                                EmpiricalReport(spec, Sample(spec, seed, n), policy),
                                k_sigma);
}

inline ConsistencyReport CheckConsistency(const DiscreteEquilibrium& eq,
                                          std::size_t n, std::uint64_t seed,
                                          double k_sigma = kVerifyKSigma) {
  return detail::CompareReports(
      eq.report, EmpiricalDiscreteReport(eq, Sample(eq.spec, seed, n)), k_sigma);
}

}  // namespace privsig

#endif  // PRIVSIG_VERIFY_HPP_
