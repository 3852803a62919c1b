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

#include <cmath>
#include <vector>

#include "privsig/channel.hpp"
#include "privsig/equilibrium.hpp"
#include "privsig/error.hpp"
#include "privsig/verify.hpp"
#include "test_support.hpp"

namespace privsig {
namespace {

LinearPolicyPair PerturbEncoder(const GameSpec& spec, const LinearPolicyPair& p,
                                double factor) {
  Matrix f = p.f;
  f(0, 1) *= factor;
  return WithMmseDecoders(spec, f);
}

TEST(CheckNashScalar, CertifiesTableGrid) {
  for (double rho : {0.3, 0.7}) {
    for (double delta : {0.1, 1.0, 10.0}) {
      const NashSolution s = SolveScalar(1.0, 1.0, rho, delta);
      const DeviationReport r = CheckNashScalar(s);
      EXPECT_TRUE(r.certified()) << r.details;
      EXPECT_GE(r.margin, -kVerifyTol);
      EXPECT_EQ(r.tested, 1u);
    }
  }
}

TEST(CheckNashScalar, HandComputedFixedPoint) {
  // sx2 = sy2 = 1, rho = 0.75, delta = 1: B/A solves 0.75 r^2 + 2 r + 0.75 = 0.
  const double r = (-2.0 - std::sqrt(4.0 - 4.0 * 0.75 * 0.75)) / (2.0 * 0.75);
  const double power = 1.0 + r * r + 2.0 * r * 0.75;
  const double cx = (1.0 + r * 0.75) / power;
  const double cy = (0.75 + r) / power;
  const double curvature = cy * cy - cx * cx;
  ASSERT_GT(curvature, 0.0);
  EXPECT_NEAR(-cx / curvature, 1.0, 1e-12);
  EXPECT_NEAR(cy / curvature, r, 1e-12);
  const NashSolution s = SolveScalar(1.0, 1.0, 0.75, 1.0);
  EXPECT_NEAR(s.policy.d_x(0, 0), cx, 1e-14);
  EXPECT_TRUE(CheckNashScalar(s).certified());
}

TEST(CheckNashScalar, RandomSpecsAndNegativeControls) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const testing::ScalarParams p = testing::RandomScalar(seed);
    const NashSolution s = SolveScalar(p.sx2, p.sy2, p.rho, p.delta);
    const DeviationReport good = CheckNashScalar(s);
    EXPECT_TRUE(good.certified()) << seed << ": " << good.details;
    const DeviationReport bad = CheckNashScalar(s.spec, PerturbEncoder(s.spec, s.policy, 1.05));
    EXPECT_EQ(bad.verdict, Verdict::kViolated) << seed;
    EXPECT_LT(bad.margin, 0.0);
  }
}

TEST(CheckNashScalar, TinyPrivacyRatio) {
  const NashSolution s = SolveScalar(1.0, 1.0, 0.5, 1e-8);
  const DeviationReport r = CheckNashScalar(s);
  EXPECT_TRUE(r.certified()) << r.details;
  // The best response is almost z = y / c_Y.
  EXPECT_LT(std::abs(s.policy.f(0, 0) / s.policy.f(0, 1)), 1e-3);
}

TEST(CheckNashScalar, MisScaledDecodersAreRejected) {
  const NashSolution s = SolveScalar(1.0, 1.0, 0.5, 2.0);
  LinearPolicyPair p = s.policy;
  p.d_x = p.d_x * 2.0;
  p.d_y = p.d_y * 2.0;
  EXPECT_EQ(CheckNashScalar(s.spec, p).verdict, Verdict::kViolated);
}

TEST(CheckNashScalar, IndefiniteEncoderCost) {
  // Revealing X exactly: c_X = 1, c_Y = rho, so c_Y^2 - delta c_X^2 < 0.
  const GameSpec spec{JointGaussian::Scalar(1.0, 1.0, 0.5), 2.0};
  const DeviationReport r = CheckNashScalar(spec, WithMmseDecoders(spec, Matrix{{1.0, 0.0}}));
  EXPECT_EQ(r.verdict, Verdict::kIndefiniteEncoderCost);
  EXPECT_FALSE(r.certified());
}

TEST(CheckNashScalar, AwgnEquilibria) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const testing::ScalarParams p = testing::RandomScalar(seed);
    const NoisyEquilibrium e = SolveAwgn(p.sx2, p.sy2, p.rho, p.delta, 1.5, 0.4);
    const DeviationReport r = CheckNashScalar(e);
    EXPECT_TRUE(r.certified()) << seed << ": " << r.details;
    Matrix f = e.report.policy.f;
    f(0, 1) *= 1.05;
    f = detail::ToPower(e.spec, f, 1.5);
    EXPECT_EQ(CheckNashScalar(e.spec, WithMmseDecoders(e.spec, f)).verdict,
              Verdict::kViolated);
    // Below full power the multiplier argument fails too.
    const Matrix half = e.report.policy.f * std::sqrt(0.5);
    EXPECT_EQ(CheckNashScalar(e.spec, WithMmseDecoders(e.spec, half)).verdict,
              Verdict::kViolated);
  }
}

TEST(CheckNashScalar, RequiresScalarSource) {
  const GameSpec spec = testing::RandomSpec(1, 2, 2);
  EXPECT_THROW(CheckNashScalar(spec, SolveNash(spec).policy), Error);
}

StackelbergOptions Quick(std::uint64_t seed) {
  StackelbergOptions o;
  o.seed = seed;
  o.n_linear = 60;
  o.n_nonlinear = 6;
  o.mc_samples = 20000;
  return o;
}

TEST(CheckStackelberg, VectorBaselineCertified) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const GameSpec spec = testing::RandomSpec(1100 + seed, 2, 2);
    StackelbergOptions o = Quick(seed);
    o.n_linear = 200;
    const DeviationReport r = CheckStackelberg(spec, SolveStackelberg(spec).policy, o);
    EXPECT_TRUE(r.certified()) << r.details;
    EXPECT_EQ(r.tested, 2 + 200 + 6u);
    EXPECT_GE(r.margin, -1e-8);
  }
}

TEST(CheckStackelberg, WeakenedBaselineIsBeaten) {
  const GameSpec spec = testing::RandomSpec(1200, 2, 2);
  const NashSolution weak = SolveNash(spec, std::vector<double>{1.0, 0.0});
  const DeviationReport r = CheckStackelberg(spec, weak.policy, Quick(3));
  EXPECT_EQ(r.verdict, Verdict::kViolated);
  EXPECT_LT(r.margin, -1e-6);
}

TEST(CheckStackelberg, LeakingAVDirectionDoesNotHelp) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GameSpec spec = testing::RandomSpecUpTo(1300 + seed, 3);
    const NashSolution s = SolveStackelberg(spec);
    const std::size_t ny = spec.source.n_y();
    const Matrix leak_row = s.transform.t_map.block(ny, 0, 1, spec.source.dim());
    const Matrix leaked = VStack(s.policy.f, leak_row);
    const double j = EvaluateLinear(spec, WithMmseDecoders(spec, leaked)).j_e;
    EXPECT_GE(j, s.report.j_e - 1e-9);
  }
}

TEST(CheckStackelberg, ScalarNoiselessAndAwgn) {
  const NashSolution s = SolveScalar(1.0, 1.0, 0.75, 1.0);
  const DeviationReport r = CheckStackelberg(s.spec, s.policy, Quick(5));
  EXPECT_TRUE(r.certified()) << r.details;
  const NoisyEquilibrium e = SolveAwgn(1.0, 1.0, 0.75, 1.0, 1.0, 0.5);
  const DeviationReport ra = CheckStackelberg(e.spec, e.report.policy, Quick(6));
  EXPECT_TRUE(ra.certified()) << ra.details;
  EXPECT_EQ(ra.tested, 1 + 60 + 6u);
}

TEST(CheckStackelberg, CorruptedScalarEncoderIsBeaten) {
  const NashSolution s = SolveScalar(1.0, 1.0, 0.3, 1.0);
  const DeviationReport r =
      CheckStackelberg(s.spec, PerturbEncoder(s.spec, s.policy, 1.05), Quick(7));
  EXPECT_EQ(r.verdict, Verdict::kViolated);
}

TEST(CheckStackelberg, DeterministicGivenSeed) {
  const GameSpec spec = testing::RandomSpec(1400, 1, 1);
  const LinearPolicyPair p = SolveStackelberg(spec).policy;
  const DeviationReport a = CheckStackelberg(spec, p, Quick(9));
  const DeviationReport b = CheckStackelberg(spec, p, Quick(9));
  EXPECT_EQ(a.best_deviation_je, b.best_deviation_je);
  EXPECT_EQ(a.tested, b.tested);
}

TEST(CheckStackelberg, RejectsDiscreteChannel) {
  const GameSpec spec{JointGaussian::Scalar(1, 1, 0.5), 1.0, Discrete{4}};
  EXPECT_THROW(CheckStackelberg(spec, LinearPolicyPair{}), Error);
}

TEST(CheckConsistency, BabblingEquilibriumAndMisScaled) {
  const NashSolution s = SolveScalar(1.0, 1.0, 0.75, 1.0);
  const ConsistencyReport babble =
      CheckConsistency(s.spec, WithMmseDecoders(s.spec, Matrix(0, 2)), 10000, 1);
  EXPECT_TRUE(babble.pass);
  const ConsistencyReport eq = CheckConsistency(s.spec, s.policy, 1000000, 2);
  EXPECT_TRUE(eq.pass) << eq.z_x << " " << eq.z_y;
  LinearPolicyPair bad = s.policy;
  bad.d_x = bad.d_x * 2.0;
  bad.d_y = bad.d_y * 2.0;
  const ConsistencyReport mis = CheckConsistency(s.spec, bad, 100000, 3);
  EXPECT_TRUE(mis.pass);
  EXPECT_GT(mis.analytic.mse_x, s.report.mse_x);
}

TEST(CheckConsistency, VectorAndDiscrete) {
  const GameSpec spec = testing::RandomSpec(1500, 2, 3);
  EXPECT_TRUE(CheckConsistency(spec, SolveNash(spec).policy, 100000, 4).pass);
  EXPECT_TRUE(CheckConsistency(SolveDiscrete(1.0, 1.0, 0.75, 1.0, 4), 200000, 5).pass);
}

}  // namespace
}  // namespace privsig
