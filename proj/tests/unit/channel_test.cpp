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

#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "privsig/channel.hpp"
#include "privsig/equilibrium.hpp"
#include "privsig/error.hpp"
#include "privsig/normal.hpp"
#include "privsig/rng.hpp"
#include "test_support.hpp"

namespace privsig {
namespace {

constexpr double kTruncation = 10.0;

double Phi(double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); }

// Integral of g(u) phi(u) over [lo, hi] intersected with [-10, 10].
template <typename G>
double Integrate(G g, double lo, double hi) {
  lo = std::max(lo, -kTruncation);
  hi = std::min(hi, kTruncation);
  if (!(hi > lo)) return 0.0;
  using boost::math::quadrature::gauss_kronrod;
  return gauss_kronrod<double, 61>::integrate([&](double u) { return g(u) * Phi(u); }, lo,
                                              hi, 15, 1e-14);
}

double Lower(const Quantizer& q, std::size_t j) {
  return j == 0 ? -std::numeric_limits<double>::infinity() : q.boundaries[j - 1];
}
double Upper(const Quantizer& q, std::size_t j) {
  return j + 1 == q.reconstructions.size() ? std::numeric_limits<double>::infinity()
                                           : q.boundaries[j];
}

double IntegratedDistortion(const Quantizer& q) {
  double d = 0.0;
  for (std::size_t j = 0; j < q.reconstructions.size(); ++j) {
    const double r = q.reconstructions[j];
    d += Integrate([r](double u) { return (u - r) * (u - r); }, Lower(q, j), Upper(q, j));
  }
  return d;
}

TEST(NormalFunctions, AgainstIntegrationAndIdentities) {
  for (double x : {-8.0, -3.0, -0.5, 0.0, 0.7, 2.5, 6.0}) {
    EXPECT_NEAR(NormalCdf(x), Integrate([](double) { return 1.0; }, -kTruncation, x),
                1e-14);
    EXPECT_NEAR(NormalPdf(x), Phi(x), 1e-16);
  }
  for (double p : {1e-10, 0.001, 0.2, 0.5}) {
    EXPECT_NEAR(NormalCdf(NormalQuantile(p)), p, 1e-13 * p);
    // Upper tail through the complementary probability.
    EXPECT_NEAR(NormalCdf(-NormalQuantile(1.0 - p)), p, 1e-13 * p + 1e-15);
  }
  EXPECT_NEAR(NormalMass(1.0, 2.0), NormalCdf(2.0) - NormalCdf(1.0), 1e-16);
  EXPECT_NEAR(NormalMass(7.0, 8.0), Integrate([](double) { return 1.0; }, 7.0, 8.0),
              1e-25);
  EXPECT_EQ(NormalPdf(std::numeric_limits<double>::infinity()), 0.0);
}

TEST(LloydMax, OneLevel) {
  const Quantizer q = LloydMaxGaussian(1);
  EXPECT_EQ(q.mse, 1.0);
  EXPECT_TRUE(q.boundaries.empty());
  EXPECT_EQ(q.reconstructions, std::vector<double>{0.0});
  EXPECT_EQ(q.Encode(-5.0), 0);
}

TEST(LloydMax, TwoLevels) {
  const Quantizer q = LloydMaxGaussian(2);
  ASSERT_EQ(q.boundaries.size(), 1u);
  EXPECT_NEAR(q.boundaries[0], 0.0, 1e-15);
  const double half_mean = Integrate([](double u) { return u; }, 0.0, kTruncation) / 0.5;
  EXPECT_NEAR(half_mean, std::sqrt(2.0 / std::numbers::pi), 1e-13);
  EXPECT_NEAR(q.reconstructions[1], half_mean, 1e-12);
  EXPECT_NEAR(q.reconstructions[0], -half_mean, 1e-12);
  EXPECT_NEAR(q.mse, 1.0 - 2.0 / std::numbers::pi, 1e-12);
  EXPECT_NEAR(q.mse, IntegratedDistortion(q), 1e-10);
}

TEST(LloydMax, LloydConditionsByIntegration) {
  for (int m : {2, 3, 4, 8, 16}) {
    const Quantizer q = LloydMaxGaussian(m);
    ASSERT_EQ(q.reconstructions.size(), static_cast<std::size_t>(m));
    ASSERT_EQ(q.boundaries.size(), static_cast<std::size_t>(m - 1));
    for (std::size_t j = 0; j + 1 < q.reconstructions.size(); ++j) {
      EXPECT_NEAR(q.boundaries[j], 0.5 * (q.reconstructions[j] + q.reconstructions[j + 1]),
                  1e-9);
      EXPECT_LT(q.reconstructions[j], q.reconstructions[j + 1]);
    }
    for (std::size_t j = 0; j < q.reconstructions.size(); ++j) {
      const double mass = Integrate([](double) { return 1.0; }, Lower(q, j), Upper(q, j));
      const double first = Integrate([](double u) { return u; }, Lower(q, j), Upper(q, j));
      EXPECT_NEAR(q.reconstructions[j], first / mass, 1e-9) << "M=" << m << " j=" << j;
    }
    EXPECT_NEAR(q.mse, IntegratedDistortion(q), 1e-8) << "M=" << m;
    // Symmetric about zero.
    for (std::size_t j = 0; j < q.reconstructions.size(); ++j) {
      EXPECT_NEAR(q.reconstructions[j], -q.reconstructions[m - 1 - j], 1e-10);
    }
  }
}

TEST(LloydMax, KnownFourLevelQuantizer) {
  // Classical tabulated values for the 4-level Gaussian quantizer.
  const Quantizer q = LloydMaxGaussian(4);
  EXPECT_NEAR(q.boundaries[2], 0.9816, 1e-4);
  EXPECT_NEAR(q.reconstructions[3], 1.510, 1e-3);
  EXPECT_NEAR(q.reconstructions[2], 0.4528, 1e-4);
  EXPECT_NEAR(q.mse, 0.1175, 1e-4);
}

TEST(LloydMax, DistortionDecreasesWithLevels) {
  double prev = 2.0;
  for (int m = 1; m <= 64; m *= 2) {
    const Quantizer q = LloydMaxGaussian(m);
    EXPECT_LT(q.mse, prev) << m;
    prev = q.mse;
  }
  // High-resolution asymptote pi sqrt(3) / (2 M^2).
  const Quantizer q = LloydMaxGaussian(256);
  EXPECT_NEAR(q.mse * 256.0 * 256.0, std::numbers::pi * std::sqrt(3.0) / 2.0, 0.05);
}

TEST(LloydMax, EncodeMapsAscendingCells) {
  const Quantizer q = LloydMaxGaussian(8);
  for (int j = 0; j < 8; ++j) {
    EXPECT_EQ(q.Encode(q.reconstructions[static_cast<std::size_t>(j)]), j);
    EXPECT_DOUBLE_EQ(q.Decode(j), q.reconstructions[static_cast<std::size_t>(j)]);
  }
  EXPECT_EQ(q.Encode(-100.0), 0);
  EXPECT_EQ(q.Encode(100.0), 7);
  EXPECT_THROW(q.Decode(8), std::out_of_range);
}

TEST(LloydMax, Errors) {
  EXPECT_THROW(LloydMaxGaussian(0), Error);
  EXPECT_THROW(LloydMaxGaussian(4, 0.0), Error);
  try {
    LloydMaxGaussian(16, 1e-12, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonConvergence);
  }
}

TEST(SolveAwgn, PowerRatioAndDecoders) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const testing::ScalarParams s = testing::RandomScalar(seed);
    CounterRng rng(seed, 77);
    const double p = testing::LogUniform(rng, 0.1, 10.0);
    const double nv = testing::LogUniform(rng, 0.01, 10.0);
    const NoisyEquilibrium e = SolveAwgn(s.sx2, s.sy2, s.rho, s.delta, p, nv);
    EXPECT_NEAR(e.power_used, p, 1e-9 * p);
    const double ratio = *SolveScalar(s.sx2, s.sy2, s.rho, s.delta).b_over_a;
    EXPECT_NEAR(*e.b_over_a, ratio, 1e-9 * std::abs(ratio));
    EXPECT_NEAR(e.d_x, (e.a * s.sx2 + e.b * s.rho) / (p + nv), 1e-12);
    EXPECT_NEAR(e.d_y, (e.a * s.rho + e.b * s.sy2) / (p + nv), 1e-12);
    const DecoderPair mmse = MmseDecoders(e.spec, e.report.policy.f);
    EXPECT_NEAR(mmse.d_x(0, 0), e.d_x, 1e-10);
    EXPECT_NEAR(mmse.d_y(0, 0), e.d_y, 1e-10);
  }
}

TEST(SolveAwgn, ConveyedCoordinateError) {
  for (double nv : {0.01, 0.5, 3.0}) {
    const NoisyEquilibrium e = SolveAwgn(1.0, 2.0, 0.6, 0.8, 2.0, nv);
    const WhiteningTransform t = Whiten(GameSpec{e.spec.source, e.spec.delta});
    // u = t_map row 0 . s has unit variance; r = z + w.
    const Matrix u = t.t_map.block(0, 0, 1, 2);
    const double cov_ur =
        (u * e.spec.source.sigma().matrix() * e.report.policy.f.transpose())(0, 0);
    const double mse_u = 1.0 - cov_ur * cov_ur / (2.0 + nv);
    EXPECT_NEAR(mse_u, nv / (2.0 + nv), 1e-9);
    EXPECT_NEAR(e.mse_u, nv / (2.0 + nv), 1e-15);
    // z = +-sqrt(P) u; the sign of u is a convention.
    const double sign = e.a * u(0, 0) + e.b * u(0, 1) > 0.0 ? 1.0 : -1.0;
    EXPECT_NEAR(e.a, sign * std::sqrt(2.0) * u(0, 0), 1e-12);
    EXPECT_NEAR(e.b, sign * std::sqrt(2.0) * u(0, 1), 1e-12);
  }
}

TEST(SolveAwgn, VanishingNoiseRecoversNoiseless) {
  for (double rho : {0.3, 0.7}) {
    for (double delta : {0.1, 1.0, 10.0}) {
      const NoisyEquilibrium e = SolveAwgn(1.0, 1.0, rho, delta, 1.0, 1e-12);
      const NashSolution s = SolveScalar(1.0, 1.0, rho, delta);
      EXPECT_NEAR(e.report.mse_x, s.report.mse_x, 1e-6);
      EXPECT_NEAR(e.report.mse_y, s.report.mse_y, 1e-6);
      EXPECT_NEAR(e.report.j_e, s.report.j_e, 1e-6);
    }
  }
}

TEST(SolveAwgn, MonotoneInPrivacyRatioAndNoise) {
  const std::vector<double> deltas{0.1, 0.3, 1.0, 3.0, 10.0};
  const std::vector<double> noises{0.1, 1.0};
  for (double nv : noises) {
    double px = -1.0, py = -1.0;
    for (double d : deltas) {
      const NoisyEquilibrium e = SolveAwgn(1.0, 1.0, 0.75, d, 1.0, nv);
      EXPECT_GE(e.report.mse_x, px - 1e-12);
      EXPECT_GE(e.report.mse_y, py - 1e-12);
      px = e.report.mse_x;
      py = e.report.mse_y;
    }
  }
  for (double d : deltas) {
    const NashSolution s = SolveScalar(1.0, 1.0, 0.75, d);
    const NoisyEquilibrium lo = SolveAwgn(1.0, 1.0, 0.75, d, 1.0, 0.1);
    const NoisyEquilibrium hi = SolveAwgn(1.0, 1.0, 0.75, d, 1.0, 1.0);
    EXPECT_LE(s.report.mse_x, lo.report.mse_x + 1e-12);
    EXPECT_LE(lo.report.mse_x, hi.report.mse_x + 1e-12);
    EXPECT_LE(s.report.mse_y, lo.report.mse_y + 1e-12);
    EXPECT_LE(lo.report.mse_y, hi.report.mse_y + 1e-12);
  }
}

TEST(SolveAwgn, ZeroCorrelationAndErrors) {
  const NoisyEquilibrium e = SolveAwgn(1.0, 1.0, 0.0, 1.0, 1.0, 1.0);
  EXPECT_FALSE(e.b_over_a.has_value());
  ASSERT_EQ(e.warnings.size(), 1u);
  EXPECT_NEAR(e.report.mse_y, 0.5, 1e-12);
  EXPECT_NEAR(e.report.mse_x, 1.0, 1e-12);
  EXPECT_THROW(SolveAwgn(1.0, 1.0, 0.5, 1.0, 0.0, 1.0), Error);
  EXPECT_THROW(SolveAwgn(1.0, 1.0, 0.5, 1.0, 1.0, -1.0), Error);
}

TEST(SolveDiscrete, ReportFormulaAndRefinementLimit) {
  const NashSolution s = SolveScalar(1.0, 1.0, 0.75, 1.0);
  const DiscreteEquilibrium d = SolveDiscrete(1.0, 1.0, 0.75, 1.0, 256);
  EXPECT_NEAR(d.report.mse_x, s.report.mse_x, 1e-3);
  EXPECT_NEAR(d.report.mse_y, s.report.mse_y, 1e-3);
  EXPECT_NEAR(d.report.j_e, s.report.j_e, 1e-3);
  // Regression coefficients are Cov(S, U).
  const Matrix& sigma = d.spec.source.sigma().matrix();
  EXPECT_NEAR(d.c_x, sigma(0, 0) * d.u_x + sigma(0, 1) * d.u_y, 1e-12);
  EXPECT_NEAR(d.c_y, sigma(1, 0) * d.u_x + sigma(1, 1) * d.u_y, 1e-12);
  EXPECT_NEAR(*d.b_over_a, *s.b_over_a, 1e-9 * std::abs(*s.b_over_a));
}

TEST(SolveDiscrete, MoreLevelsHelpBothPlayers) {
  for (double delta : {0.1, 1.0, 10.0}) {
    double je = INFINITY, jd = INFINITY;
    for (int m : {2, 3, 4, 8, 16, 32}) {
      const DiscreteEquilibrium d = SolveDiscrete(1.0, 1.0, 0.75, delta, m);
      EXPECT_LT(d.report.j_e, je);
      EXPECT_LT(d.report.j_d, jd);
      je = d.report.j_e;
      jd = d.report.j_d;
    }
  }
}

TEST(SolveDiscrete, MonteCarloAgreement) {
  const DiscreteEquilibrium d = SolveDiscrete(1.0, 1.0, 0.75, 1.0, 2);
  const EquilibriumReport e = EmpiricalDiscreteReport(d, Sample(d.spec, 42, 1000000));
  EXPECT_NEAR(e.mse_x, d.report.mse_x, 4.0 * e.mc->se_mse_x);
  EXPECT_NEAR(e.mse_y, d.report.mse_y, 4.0 * e.mc->se_mse_y);
  EXPECT_NEAR(e.j_e, d.report.j_e, 4.0 * e.mc->se_j_e);
}

TEST(SolveDiscrete, EncodeDecodeRoundTrip) {
  const DiscreteEquilibrium d = SolveDiscrete(2.0, 1.0, -0.4, 0.5, 4);
  for (int j = 0; j < 4; ++j) {
    const auto [xh, yh] = d.Decode(j);
    EXPECT_NEAR(xh, d.c_x * d.quantizer.reconstructions[static_cast<std::size_t>(j)], 1e-15);
    EXPECT_NEAR(yh, d.c_y * d.quantizer.reconstructions[static_cast<std::size_t>(j)], 1e-15);
  }
  const double u = 0.3;
  // A point with u-coordinate 0.3 lands in the cell containing 0.3.
  const double scale = u / (d.u_x * d.u_x + d.u_y * d.u_y);
  EXPECT_EQ(d.Encode(scale * d.u_x, scale * d.u_y), d.quantizer.Encode(u));
  EXPECT_THROW(SolveDiscrete(1.0, 1.0, 0.5, 1.0, 1), Error);
}

}  // namespace
}  // namespace privsig
