//
// Copyright 2026 The classdp Authors.
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

#include "classdp/privacy_analysis.h"

#include <omp.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"
#include "classdp/errors.h"
#include "classdp/noise_optimizer.h"
#include "test_util.h"

namespace classdp {
namespace {

using testing::LogDensity;
using testing::RandomClass;
using testing::RandomSpd;

constexpr double kPhiOfOne = 0.8413447460685429;

ClassGaussian Make(const std::string& label, Vector mean, Matrix cov) {
  return {label, std::move(mean), std::move(cov)};
}

TEST(PairGeometryTest, IdenticalClasses) {
  const ClassGaussian x = Make("X", Vector::Zero(2), Matrix::Identity(2, 2));
  const PairGeometry g = ComputePairGeometry(x, x);
  EXPECT_LT((g.eigvals - Vector::Ones(2)).norm(), 1e-14);
  EXPECT_LT(g.mean_offset.norm(), 1e-14);
}

TEST(PairGeometryTest, ScaledCovariance) {
  const ClassGaussian x = Make("X", Vector::Zero(2), Matrix::Identity(2, 2));
  const ClassGaussian xp =
      Make("Y", Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
  const PairGeometry g = ComputePairGeometry(x, xp);
  EXPECT_NEAR(g.eigvals[0], 2.0, 1e-13);
  EXPECT_NEAR(g.eigvals[1], 2.0, 1e-13);
  EXPECT_NEAR(g.gamma_max, 2.0, 1e-13);
}

TEST(PairGeometryTest, DiagonalExample) {
  Vector mu_p(2);
  mu_p << 1.0, 0.0;
  const ClassGaussian x =
      Make("X", Vector::Zero(2), Eigen::Vector2d(4.0, 1.0).asDiagonal());
  const ClassGaussian xp = Make("Y", mu_p, Matrix::Identity(2, 2));
  const PairGeometry g = ComputePairGeometry(x, xp);
  EXPECT_NEAR(g.eigvals[0], 4.0, 1e-13);
  EXPECT_NEAR(g.eigvals[1], 1.0, 1e-13);
  EXPECT_NEAR(g.mean_offset[0], 0.5, 1e-13);
  EXPECT_NEAR(g.mean_offset[1], 0.0, 1e-13);
}

TEST(PairGeometryTest, InvariantsOnRandomPairs) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const ClassGaussian x = RandomClass("X", 4, rng);
    const ClassGaussian xp = RandomClass("Y", 4, rng);
    const PairGeometry g = ComputePairGeometry(x, xp);
    EXPECT_LT((g.eigvecs.transpose() * g.eigvecs - Matrix::Identity(4, 4)).norm(),
              1e-10);
    for (int i = 1; i < 4; ++i) EXPECT_GE(g.eigvals[i - 1], g.eigvals[i]);
    EXPECT_GT(g.eigvals.minCoeff(), 0.0);
    EXPECT_EQ(g.eigvals[0], g.gamma_max);
    const Matrix sx = MatrixSqrtSym(x.covariance);
    const Matrix target = sx * xp.covariance.inverse() * sx;
    const Matrix rebuilt = g.eigvecs * g.eigvals.asDiagonal() * g.eigvecs.transpose();
    EXPECT_LE((rebuilt - target).norm(), 1e-9 * target.norm());
    const Vector mu = g.eigvecs.transpose() * InverseSqrtSym(x.covariance) *
                      (xp.mean - x.mean);
    EXPECT_LT((mu - g.mean_offset).norm(), 1e-10 * (1.0 + mu.norm()));
  }
}

TEST(PairGeometryTest, Errors) {
  const ClassGaussian x = Make("X", Vector::Zero(2), Matrix::Identity(2, 2));
  const ClassGaussian wide = Make("Y", Vector::Zero(3), Matrix::Identity(3, 3));
  EXPECT_THROW(ComputePairGeometry(x, wide), std::invalid_argument);
  const ClassGaussian flat =
      Make("Z", Vector::Zero(2), Eigen::Vector2d(1.0, 0.0).asDiagonal());
  EXPECT_THROW(ComputePairGeometry(x, flat), NumericError);
}

TEST(PrivacyLossTest, IdenticalClassesGiveZero) {
  std::mt19937_64 rng(1);
  const ClassGaussian x = RandomClass("X", 3, rng);
  for (int i = 0; i < 10; ++i) {
    EXPECT_NEAR(PrivacyLoss(testing::RandomVector(3, rng), x, x), 0.0, 1e-12);
  }
}

TEST(PrivacyLossTest, ShiftedUnitGaussians) {
  Vector mu_p(2);
  mu_p << 2.0, 0.0;
  const ClassGaussian x = Make("X", Vector::Zero(2), Matrix::Identity(2, 2));
  const ClassGaussian xp = Make("Y", mu_p, Matrix::Identity(2, 2));
  EXPECT_NEAR(PrivacyLoss(Vector::Zero(2), x, xp), 2.0, 1e-14);
}

TEST(PrivacyLossTest, MatchesLogDensityDifference) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const ClassGaussian x = RandomClass("X", 3, rng);
    const ClassGaussian xp = RandomClass("Y", 3, rng);
    const Vector q = testing::RandomVector(3, rng);
    const double direct = LogDensity(q, x.mean, x.covariance) -
                          LogDensity(q, xp.mean, xp.covariance);
    EXPECT_NEAR(PrivacyLoss(q, x, xp), direct, 1e-9 * (1.0 + std::abs(direct)));
  }
}

TEST(PrivacyLossTest, AntisymmetricAndWhitenedFormAgree) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const ClassGaussian x = RandomClass("X", 4, rng);
    const ClassGaussian xp = RandomClass("Y", 4, rng);
    const Vector q = x.mean + MatrixSqrtSym(x.covariance) *
                                  testing::RandomVector(4, rng);
    const double l = PrivacyLoss(q, x, xp);
    EXPECT_NEAR(l, -PrivacyLoss(q, xp, x), 1e-9 * (1.0 + std::abs(l)));
    const PairGeometry g = ComputePairGeometry(x, xp);
    const Vector xi = g.whitening * (q - x.mean);
    EXPECT_NEAR(PrivacyLossWhitened(xi, g), l, 1e-9 * (1.0 + std::abs(l)));
  }
}

TEST(DeltaExactEqualCovTest, Examples) {
  EXPECT_DOUBLE_EQ(DeltaExactEqualCov(2.0, 2.0), 0.5);
  EXPECT_EQ(DeltaExactEqualCov(0.0, 0.1), 0.0);
  EXPECT_EQ(DeltaExactEqualCov(0.0, -0.1), 1.0);
  EXPECT_EQ(DeltaExactEqualCov(0.0, 0.0), 0.0);
  EXPECT_NEAR(DeltaExactEqualCov(2.0, 0.0), kPhiOfOne, 1e-12);
  EXPECT_THROW(DeltaExactEqualCov(-1.0, 0.0), std::invalid_argument);
}

PairGeometry EqualCovPair(double offset) {
  Vector mu_p = Vector::Zero(2);
  mu_p[0] = offset;
  return ComputePairGeometry(Make("X", Vector::Zero(2), Matrix::Identity(2, 2)),
                             Make("Y", mu_p, Matrix::Identity(2, 2)));
}

TEST(DeltaMonteCarloTest, IdenticalClassesGiveZero) {
  const ClassGaussian x = Make("X", Vector::Zero(2), Matrix::Identity(2, 2));
  const std::vector<double> eps{0.5};
  const DeltaEstimate est = DeltaMonteCarlo(x, x, eps, {});
  EXPECT_EQ(est.deltas[0], 0.0);
}

TEST(DeltaMonteCarloTest, EqualCovarianceMatchesClosedForm) {
  const PairGeometry g = EqualCovPair(2.0);
  const std::vector<double> eps{0.0, 0.5, 1.0, 2.0, 3.0, 4.0};
  MonteCarloOptions opts;
  opts.seed = 99;
  const DeltaEstimate est = DeltaMonteCarlo(g, eps, opts);
  for (size_t i = 0; i < eps.size(); ++i) {
    EXPECT_NEAR(est.deltas[i], DeltaExactEqualCov(2.0, eps[i]),
                3.0 * est.std_errors[i] + 1e-12)
        << "eps=" << eps[i];
  }
}

TEST(DeltaMonteCarloTest, EqualCovarianceLossMoments) {
  // L ~ N(|mu|^2 / 2, |mu|^2) = N(2, 4).
  const PairGeometry g = EqualCovPair(2.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    Vector xi(2);
    xi << normal(rng), normal(rng);
    const double l = PrivacyLossWhitened(xi, g);
    sum += l;
    sum_sq += l * l;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  EXPECT_NEAR(mean, 2.0, 4.0 * std::sqrt(4.0 / n));
  EXPECT_NEAR(var, 4.0, 4.0 * 4.0 * std::sqrt(2.0 / (n - 1)));
}

TEST(DeltaMonteCarloTest, MatchesDirectSamplingOfQueries) {
  // Independent estimator: draw q ~ N(mu_X, Sigma_X) with a Cholesky factor
  // and evaluate the log-density difference.
  std::mt19937_64 rng(8);
  const ClassGaussian x = RandomClass("X", 3, rng);
  const ClassGaussian xp = RandomClass("Y", 3, rng);
  const std::vector<double> eps{-0.5, 0.0, 0.5, 1.0, 2.0};
  MonteCarloOptions opts;
  opts.seed = 4;
  const DeltaEstimate est = DeltaMonteCarlo(x, xp, eps, opts);

  const Matrix chol = Eigen::LLT<Matrix>(x.covariance).matrixL();
  std::normal_distribution<double> normal;
  std::vector<int> hits(eps.size(), 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    Vector z(3);
    for (int j = 0; j < 3; ++j) z[j] = normal(rng);
    const Vector q = x.mean + chol * z;
    const double l = LogDensity(q, x.mean, x.covariance) -
                     LogDensity(q, xp.mean, xp.covariance);
    for (size_t e = 0; e < eps.size(); ++e) hits[e] += l > eps[e];
  }
  for (size_t e = 0; e < eps.size(); ++e) {
    const double oracle = static_cast<double>(hits[e]) / n;
    const double se = std::sqrt(oracle * (1 - oracle) / n);
    EXPECT_NEAR(est.deltas[e], oracle,
                3.0 * std::hypot(se, est.std_errors[e]) + 1e-12);
  }
}

TEST(DeltaMonteCarloTest, MonotoneInEpsilon) {
  std::mt19937_64 rng(10);
  const PairGeometry g =
      ComputePairGeometry(RandomClass("X", 2, rng), RandomClass("Y", 2, rng));
  std::vector<double> eps;
  for (int i = 0; i <= 30; ++i) eps.push_back(-1.0 + 0.1 * i);
  const DeltaEstimate est = DeltaMonteCarlo(g, eps, {});
  for (size_t i = 1; i < eps.size(); ++i) {
    EXPECT_LE(est.deltas[i], est.deltas[i - 1] + 3.0 * est.std_errors[i - 1]);
  }
}

TEST(DeltaMonteCarloTest, ParallelMatchesSerialBitForBit) {
  std::mt19937_64 rng(12);
  const PairGeometry g =
      ComputePairGeometry(RandomClass("X", 3, rng), RandomClass("Y", 3, rng));
  const std::vector<double> eps{0.1, 0.5, 1.0};
  MonteCarloOptions opts;
  opts.samples = 50001;
  opts.seed = 77;
  opts.partitions = 7;
  const DeltaEstimate serial = DeltaMonteCarloSerial(g, eps, opts);
  const int saved = omp_get_max_threads();
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    const DeltaEstimate parallel = DeltaMonteCarlo(g, eps, opts);
    EXPECT_EQ(parallel.deltas, serial.deltas) << threads << " threads";
    EXPECT_EQ(parallel.std_errors, serial.std_errors);
  }
  omp_set_num_threads(saved);
}

TEST(DeltaMonteCarloTest, Preconditions) {
  const PairGeometry g = EqualCovPair(1.0);
  MonteCarloOptions small;
  small.samples = 999;
  const std::vector<double> eps{0.1};
  EXPECT_THROW(DeltaMonteCarlo(g, eps, small), std::invalid_argument);
  const std::vector<double> unsorted{0.5, 0.1};
  EXPECT_THROW(DeltaMonteCarlo(g, unsorted, {}), std::invalid_argument);
}

TEST(ChernoffBoundTest, CollapsesForIdenticalClasses) {
  const PairGeometry g = EqualCovPair(0.0);
  EXPECT_NEAR(ChernoffDeltaBound(g, 1.0, 2.0).bound, std::exp(-1.0), 1e-14);
}

TEST(ChernoffBoundTest, RejectsInadmissibleS) {
  const ClassGaussian x = Make("X", Vector::Zero(2), Matrix::Identity(2, 2));
  const ClassGaussian xp =
      Make("Y", Vector::Zero(2), 0.5 * Matrix::Identity(2, 2));
  const PairGeometry g = ComputePairGeometry(x, xp);
  EXPECT_THROW(ChernoffDeltaBound(g, 1.0, g.gamma_max), std::invalid_argument);
  EXPECT_THROW(ChernoffDeltaBound(EqualCovPair(0.0), 1.0, 1.0),
               std::invalid_argument);
}

TEST(ChernoffBoundTest, DominatesMonteCarlo) {
  std::mt19937_64 rng(14);
  std::vector<double> eps;
  for (int i = 0; i <= 30; ++i) eps.push_back(0.1 * i);
  for (int trial = 0; trial < 5; ++trial) {
    const PairGeometry g =
        ComputePairGeometry(RandomClass("X", 2, rng), RandomClass("Y", 2, rng));
    MonteCarloOptions opts;
    opts.seed = trial;
    const DeltaEstimate est = DeltaMonteCarlo(g, eps, opts);
    for (size_t i = 0; i < eps.size(); ++i) {
      const ChernoffBound auto_bound = ChernoffDeltaBound(g, eps[i]);
      EXPECT_GE(auto_bound.bound, est.deltas[i] - 3.0 * est.std_errors[i]);
      EXPECT_LE(auto_bound.bound, 1.0);
      // The search should do at least as well as a fixed admissible s.
      const double fixed = ChernoffDeltaBound(g, eps[i], auto_bound.s + 1.0).bound;
      EXPECT_LE(auto_bound.bound, fixed * (1 + 1e-9));
    }
  }
}

TEST(GaussianSensitivityTest, IdenticalClassesGiveZero) {
  const ClassGaussian a = Make("A", Vector::Zero(2), Matrix::Identity(2, 2));
  ClassGaussian b = a;
  b.label = "B";
  const SensitivityResult s = GaussianSensitivity(MakeEnsemble({a, b}, {{"A", "B"}}));
  EXPECT_NEAR(s.value, 0.0, 1e-14);
}

TEST(GaussianSensitivityTest, ShiftedUnitGaussians) {
  Vector mu(2);
  mu << 2.0, 0.0;
  const ClassEnsemble e = MakeEnsemble(
      {Make("A", Vector::Zero(2), Matrix::Identity(2, 2)),
       Make("B", mu, Matrix::Identity(2, 2))},
      {{"A", "B"}});
  const SensitivityResult s = GaussianSensitivity(e);
  EXPECT_NEAR(s.value, 2.0, 1e-13);
  EXPECT_EQ(s.pair, OrderedPair("A", "B"));
}

TEST(GaussianSensitivityTest, MatchesExhaustiveEdgeSearch) {
  std::mt19937_64 rng(15);
  std::vector<ClassGaussian> classes;
  for (const char* l : {"a", "b", "c", "d"}) classes.push_back(RandomClass(l, 3, rng));
  const ClassEnsemble e =
      MakeEnsemble(classes, {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"a", "d"}});
  double best = -INFINITY;
  for (const auto& [x, y] : e.graph.OrderedEdges()) {
    const ClassGaussian& cx = e.Find(x);
    const ClassGaussian& cy = e.Find(y);
    const Vector v = cy.mean - cx.mean;
    // 1/2 v' S_y^-1 v + 1/2 ln|S_y| - 1/2 ln|S_x|.
    const double value = 0.5 * v.dot(cy.covariance.inverse() * v) +
                         0.5 * std::log(cy.covariance.determinant()) -
                         0.5 * std::log(cx.covariance.determinant());
    best = std::max(best, value);
  }
  EXPECT_NEAR(GaussianSensitivity(e).value, best, 1e-10 * (1.0 + std::abs(best)));
}

TEST(GaussianSensitivityTest, NoEdgesThrows) {
  const ClassEnsemble e = MakeEnsemble(
      {Make("A", Vector::Zero(2), Matrix::Identity(2, 2)),
       Make("B", Vector::Ones(2), Matrix::Identity(2, 2))},
      {});
  EXPECT_THROW(GaussianSensitivity(e), std::invalid_argument);
}

TEST(EpsilonDeltaCurveTest, IdenticalClassesAnyNoise) {
  const ClassGaussian a = Make("A", Vector::Zero(2), Matrix::Identity(2, 2));
  ClassGaussian b = a;
  b.label = "B";
  const ClassEnsemble e = MakeEnsemble({a, b}, {{"A", "B"}});
  const std::vector<double> eps{0.05, 0.5, 1.0};
  const PrivacyCurve none = EpsilonDeltaCurve(e, eps, {});
  const PrivacyCurve white =
      EpsilonDeltaCurve(e, WhiteNoiseSpec({"A", "B"}, 2, 1.0), eps, {});
  for (size_t i = 0; i < eps.size(); ++i) {
    EXPECT_EQ(none.deltas[i], 0.0);
    EXPECT_EQ(white.deltas[i], 0.0);
  }
}

TEST(EpsilonDeltaCurveTest, TwoClassEqualCovariance) {
  Vector mu(2);
  mu << 0.0, 2.0;
  const ClassEnsemble e = MakeEnsemble(
      {Make("A", Vector::Zero(2), Matrix::Identity(2, 2)),
       Make("B", mu, Matrix::Identity(2, 2))},
      {{"A", "B"}});
  std::vector<double> eps;
  for (int i = 0; i <= 10; ++i) eps.push_back(0.4 * i);
  MonteCarloOptions opts;
  opts.seed = 3;
  const PrivacyCurve c = EpsilonDeltaCurve(e, eps, opts);
  ASSERT_EQ(c.per_edge.size(), 2u);
  for (size_t i = 0; i < eps.size(); ++i) {
    EXPECT_NEAR(c.deltas[i], GaussianTailQ((eps[i] - 2.0) / 2.0),
                3.0 * c.std_errors[i] + 1e-12);
    EXPECT_EQ(c.deltas[i],
              std::max(c.per_edge[0].deltas[i], c.per_edge[1].deltas[i]));
  }
}

TEST(EpsilonDeltaCurveTest, WhiteNoiseNeverHurts) {
  std::mt19937_64 rng(16);
  std::vector<ClassGaussian> classes;
  for (const char* l : {"a", "b", "c"}) classes.push_back(RandomClass(l, 2, rng));
  const ClassEnsemble e =
      MakeEnsemble(classes, {{"a", "b"}, {"b", "c"}, {"a", "c"}});
  std::vector<double> eps;
  for (int i = 1; i <= 10; ++i) eps.push_back(0.2 * i);
  const PrivacyCurve none = EpsilonDeltaCurve(e, eps, {});
  const PrivacyCurve white =
      EpsilonDeltaCurve(e, WhiteNoiseSpec(e.Labels(), 2, 1.0), eps, {});
  for (size_t i = 0; i < eps.size(); ++i) {
    EXPECT_LE(white.deltas[i], none.deltas[i] + 3.0 * none.std_errors[i]);
    EXPECT_GE(white.deltas[i], 0.0);
    EXPECT_LE(white.deltas[i], 1.0);
  }
}

TEST(EpsilonDeltaCurveTest, CsvLayout) {
  const ClassEnsemble e = MakeEnsemble(
      {Make("A", Vector::Zero(1), Matrix::Identity(1, 1)),
       Make("B", Vector::Ones(1), Matrix::Identity(1, 1))},
      {{"A", "B"}});
  const std::vector<double> eps{0.1, 0.2};
  const std::string csv = PrivacyCurveToCsv(EpsilonDeltaCurve(e, eps, {}));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "epsilon,delta,std_err,delta_A_B,delta_B_A");
  EXPECT_NE(csv.find("\n0.10000000000000001,"), std::string::npos);
}

}  // namespace
}  // namespace classdp
