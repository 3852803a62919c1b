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

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "privsig/error.hpp"
#include "privsig/model.hpp"
#include "privsig/rng.hpp"
#include "test_support.hpp"

namespace privsig {
namespace {

using testing::FromEigen;
using testing::RandomSpec;
using testing::ToEigen;

// Error covariance traces from e = (P - D F) s - D w, computed with Eigen.
std::pair<double, double> OracleMses(const GameSpec& spec, const LinearPolicyPair& p,
                                     double noise_var) {
  const int nx = static_cast<int>(spec.source.n_x());
  const int ny = static_cast<int>(spec.source.n_y());
  const Eigen::MatrixXd sigma = ToEigen(spec.source.sigma().matrix());
  const Eigen::MatrixXd f = ToEigen(p.f);
  auto block = [&](const Matrix& d, int offset, int size) {
    Eigen::MatrixXd sel = Eigen::MatrixXd::Zero(size, nx + ny);
    sel.block(0, offset, size, size).setIdentity();
    const Eigen::MatrixXd de = ToEigen(d);
    const Eigen::MatrixXd g = sel - de * f;
    return (g * sigma * g.transpose() + noise_var * de * de.transpose()).trace();
  };
  return {block(p.d_x, 0, nx), block(p.d_y, nx, ny)};
}

LinearPolicyPair RandomPolicy(CounterRng& rng, const GameSpec& spec, std::size_t m) {
  const std::size_t n = spec.source.dim();
  LinearPolicyPair p;
  p.f = Matrix(m, n);
  p.d_x = Matrix(spec.source.n_x(), m);
  p.d_y = Matrix(spec.source.n_y(), m);
  for (Matrix* a : {&p.f, &p.d_x, &p.d_y}) {
    for (std::size_t r = 0; r < a->rows(); ++r) {
      for (std::size_t c = 0; c < a->cols(); ++c) (*a)(r, c) = rng.Normal();
    }
  }
  return p;
}

TEST(JointGaussian, Validation) {
  EXPECT_THROW(JointGaussian(1, 2, SymMatrix::Identity(2)), Error);
  EXPECT_THROW(JointGaussian(0, 2, SymMatrix::Identity(2)), Error);
  EXPECT_THROW(JointGaussian::Scalar(1.0, 1.0, 1.0), NotPositiveDefinite);
  EXPECT_THROW(JointGaussian::Scalar(-1.0, 1.0, 0.0), Error);
  EXPECT_THROW(JointGaussian::Scalar(1.0, 1.0, std::nan("")), Error);
  const JointGaussian s = JointGaussian::Scalar(2.0, 3.0, 0.5);
  EXPECT_TRUE(s.is_scalar());
  EXPECT_DOUBLE_EQ(s.sigma_xy()(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(s.sigma_y()(0, 0), 3.0);
  EXPECT_FALSE(JointGaussian::Scalar(1.0, 1.0, 0.0).has_cross_covariance());
}

TEST(GameSpec, ChannelValidation) {
  const GameSpec vec = RandomSpec(1, 2, 2);
  EXPECT_THROW(ValidateSpec(GameSpec{vec.source, 1.0, Awgn{1.0, 1.0}}), Error);
  const JointGaussian s = JointGaussian::Scalar(1.0, 1.0, 0.5);
  EXPECT_THROW(ValidateSpec(GameSpec{s, 1.0, Awgn{0.0, 1.0}}), Error);
  EXPECT_THROW(ValidateSpec(GameSpec{s, 1.0, Discrete{1}}), Error);
  EXPECT_THROW(ValidateSpec(GameSpec{s, 0.0}), Error);
  EXPECT_THROW(ValidateSpec(GameSpec{s, INFINITY}), Error);
  EXPECT_NO_THROW(ValidateSpec(GameSpec{s, 1.0, Discrete{2}}));
}

TEST(EvaluateLinear, MatchesErrorCovarianceOracle) {
  CounterRng rng(3);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const GameSpec spec = testing::RandomSpecUpTo(seed, 3);
    const LinearPolicyPair p = RandomPolicy(rng, spec, 1 + seed % 3);
    const EquilibriumReport r = EvaluateLinear(spec, p);
    const auto [mx, my] = OracleMses(spec, p, 0.0);
    EXPECT_NEAR(r.mse_x, mx, 1e-10 * std::max(1.0, mx));
    EXPECT_NEAR(r.mse_y, my, 1e-10 * std::max(1.0, my));
    EXPECT_NEAR(r.j_e, r.mse_y - spec.delta * r.mse_x, 1e-12 * std::max(1.0, mx));
    EXPECT_NEAR(r.j_d, r.mse_x + r.mse_y, 1e-12);
  }
}

TEST(EvaluateLinear, AwgnAddsNoiseTerm) {
  const GameSpec spec{JointGaussian::Scalar(1.0, 2.0, 0.4), 1.5, Awgn{0.3, 4.0}};
  const LinearPolicyPair p{Matrix{{0.7, 0.9}}, Matrix{{0.2}}, Matrix{{0.5}}};
  const EquilibriumReport r = EvaluateLinear(spec, p);
  const auto [mx, my] = OracleMses(spec, p, 0.3);
  EXPECT_NEAR(r.mse_x, mx, 1e-13);
  EXPECT_NEAR(r.mse_y, my, 1e-13);
  EXPECT_EQ(r.policy.channel, spec.channel);
}

TEST(EvaluateLinear, RejectsBadShapesAndPower) {
  const GameSpec spec{JointGaussian::Scalar(1.0, 1.0, 0.5), 1.0, Awgn{1.0, 1.0}};
  EXPECT_THROW(EvaluateLinear(spec, {Matrix{{3.0, 0.0}}, Matrix{{0.0}}, Matrix{{0.0}}}),
               Error);
  EXPECT_THROW(EvaluateLinear(spec, {Matrix(2, 2), Matrix(1, 2), Matrix(1, 2)}), Error);
  const GameSpec noiseless{spec.source, 1.0};
  EXPECT_THROW(EvaluateLinear(noiseless, {Matrix(1, 3), Matrix(1, 1), Matrix(1, 1)}),
               Error);
  const GameSpec disc{spec.source, 1.0, Discrete{4}};
  EXPECT_THROW(EvaluateLinear(disc, {Matrix(1, 2), Matrix(1, 1), Matrix(1, 1)}), Error);
}

TEST(EvaluateLinear, BabblingKeepsPriorVariance) {
  const GameSpec spec = RandomSpec(8, 2, 3);
  const LinearPolicyPair p = WithMmseDecoders(spec, Matrix(0, 5));
  const EquilibriumReport r = EvaluateLinear(spec, p);
  EXPECT_NEAR(r.mse_x, spec.source.sigma_x().trace(), 1e-14);
  EXPECT_NEAR(r.mse_y, spec.source.sigma_y().trace(), 1e-14);
  // An all-zero encoder row carries nothing either.
  const EquilibriumReport z = EvaluateLinear(spec, WithMmseDecoders(spec, Matrix(1, 5)));
  EXPECT_NEAR(z.mse_x, r.mse_x, 1e-14);
}

TEST(MmseDecoders, MatchRegressionAndOrthogonality) {
  CounterRng rng(4);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GameSpec spec = testing::RandomSpecUpTo(100 + seed, 3);
    const std::size_t m = 1 + seed % spec.source.dim();
    const Matrix f = RandomPolicy(rng, spec, m).f;
    const DecoderPair d = MmseDecoders(spec, f);
    const Eigen::MatrixXd sigma = ToEigen(spec.source.sigma().matrix());
    const Eigen::MatrixXd fe = ToEigen(f);
    const Eigen::MatrixXd gain =
        (sigma * fe.transpose()) * (fe * sigma * fe.transpose()).inverse();
    const Matrix g = FromEigen(gain);
    const std::size_t nx = spec.source.n_x();
    EXPECT_LT(MaxAbsDiff(d.d_x, g.block(0, 0, nx, m)), 1e-9);
    EXPECT_LT(MaxAbsDiff(d.d_y, g.block(nx, 0, spec.source.n_y(), m)), 1e-9);
  }
}

TEST(MmseDecoders, AreBestResponses) {
  CounterRng rng(6);
  const GameSpec spec = RandomSpec(21, 2, 2);
  const Matrix f = RandomPolicy(rng, spec, 2).f;
  const EquilibriumReport best = EvaluateLinear(spec, WithMmseDecoders(spec, f));
  for (int trial = 0; trial < 50; ++trial) {
    LinearPolicyPair p = WithMmseDecoders(spec, f);
    p.d_x(trial % 2, (trial / 2) % 2) += 0.01 * rng.Normal();
    p.d_y((trial / 2) % 2, trial % 2) += 0.01 * rng.Normal();
    const EquilibriumReport r = EvaluateLinear(spec, p);
    EXPECT_GE(r.mse_x, best.mse_x - 1e-14);
    EXPECT_GE(r.mse_y, best.mse_y - 1e-14);
  }
}

TEST(MmseDecoders, RankDeficientEncoderUsesPseudoInverse) {
  const GameSpec spec = RandomSpec(2, 2, 2);
  Matrix f{{1.0, 0.0, 0.5, 0.0}, {2.0, 0.0, 1.0, 0.0}};
  const EquilibriumReport dup = EvaluateLinear(spec, WithMmseDecoders(spec, f));
  const EquilibriumReport one =
      EvaluateLinear(spec, WithMmseDecoders(spec, f.block(0, 0, 1, 4)));
  EXPECT_NEAR(dup.mse_x, one.mse_x, 1e-10);
  EXPECT_NEAR(dup.mse_y, one.mse_y, 1e-10);
}

TEST(Sample, DeterministicPerSeed) {
  const GameSpec spec = RandomSpec(5, 2, 1);
  const SampleBatch a = Sample(spec, 77, 100);
  const SampleBatch b = Sample(spec, 77, 100);
  const SampleBatch c = Sample(spec, 78, 100);
  EXPECT_EQ(a.s, b.s);
  EXPECT_NE(a.s, c.s);
  EXPECT_THROW(Sample(spec, 1, 0), Error);
}

TEST(Sample, CovarianceWithinStandardErrors) {
  const GameSpec spec = RandomSpec(6, 2, 2);
  const std::size_t n = 100000;
  const SampleBatch batch = Sample(spec, 3, n);
  const Matrix& sigma = spec.source.sigma().matrix();
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += batch.s(k, i) * batch.s(k, j);
      const double se =
          std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / n);
      EXPECT_NEAR(s / n, sigma(i, j), 4.0 * se) << i << "," << j;
    }
  }
}

TEST(Sample, AwgnNoiseVariance) {
  const GameSpec spec{JointGaussian::Scalar(1.0, 1.0, 0.2), 1.0, Awgn{0.25, 1.0}};
  const std::size_t n = 100000;
  const SampleBatch batch = Sample(spec, 4, n);
  ASSERT_EQ(batch.w.size(), n);
  double ss = 0.0;
  for (double w : batch.w) ss += w * w;
  EXPECT_NEAR(ss / n, 0.25, 4.0 * 0.25 * std::sqrt(2.0 / n));
}

TEST(EmpiricalReport, AgreesWithAnalytic) {
  CounterRng rng(12);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const GameSpec spec = RandomSpec(200 + seed, 1 + seed % 2, 2);
    const LinearPolicyPair p = RandomPolicy(rng, spec, 2);
    const EquilibriumReport a = EvaluateLinear(spec, p);
    const EquilibriumReport e = EmpiricalReport(spec, Sample(spec, seed, 50000), p);
    ASSERT_TRUE(e.mc.has_value());
    EXPECT_NEAR(e.mse_x, a.mse_x, 4.0 * e.mc->se_mse_x);
    EXPECT_NEAR(e.mse_y, a.mse_y, 4.0 * e.mc->se_mse_y);
    EXPECT_NEAR(e.j_e, a.j_e, 4.0 * e.mc->se_j_e);
  }
}

TEST(ErrorAccumulator, MeansAndStandardErrors) {
  ErrorAccumulator acc(2.0);
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  for (double x : xs) acc.Add(x, 2.0 * x);
  const EquilibriumReport r = acc.Report();
  EXPECT_DOUBLE_EQ(r.mse_x, 2.5);
  EXPECT_DOUBLE_EQ(r.mse_y, 5.0);
  EXPECT_DOUBLE_EQ(r.j_e, 0.0);
  // Sample sd of {1,2,3,4} is sqrt(5/3).
  EXPECT_NEAR(r.mc->se_mse_x, std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
  EXPECT_NEAR(r.mc->se_j_e, 0.0, 1e-15);
}

}  // namespace
}  // namespace privsig
