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

#include "classdp/noise_optimizer.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"
#include "classdp/errors.h"
#include "classdp/experiments.h"
#include "classdp/noise_spec.h"
#include "classdp/privacy_analysis.h"
#include "test_util.h"

namespace classdp {
namespace {

using testing::RandomClass;
using testing::RandomSpd;
using testing::RandomVector;

OptimizerState TwoClassState(const Matrix& a_x, const Matrix& a_y,
                             const Vector& mu_x, const Vector& mu_y) {
  return {{"X", "Y"}, {a_x, a_y}, {mu_x, mu_y}};
}

TEST(SurrogateCostTest, Examples) {
  const Matrix i2 = Matrix::Identity(2, 2);
  EXPECT_NEAR(SurrogateCostG(i2, i2, Vector::Zero(2), Vector::Zero(2)), 0.0,
              1e-15);
  EXPECT_NEAR(SurrogateCostG(i2, 2.0 * i2, Vector::Zero(2), Vector::Zero(2)),
              -std::log(4.0), 1e-14);
}

TEST(SurrogateCostTest, EqualsReleasedGeometryForm) {
  // g = mu^T Gamma mu - ln|Gamma| for the released pair with
  // Sigma~ = A^{-1}, i.e. twice the sensitivity term.
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix sx = RandomSpd(3, rng), sy = RandomSpd(3, rng);
    const Vector mx = RandomVector(3, rng), my = RandomVector(3, rng);
    const PairGeometry geom =
        ComputePairGeometry({"X", mx, sx}, {"Y", my, sy});
    const double expected =
        geom.mean_offset.dot(geom.eigvals.asDiagonal() * geom.mean_offset) -
        geom.LogDetGamma();
    const double g = SurrogateCostG(sx.inverse(), sy.inverse(), mx, my);
    EXPECT_NEAR(g, expected, 1e-9 * (1.0 + std::abs(expected)));
  }
}

TEST(CostJTest, SingleSymmetricEdge) {
  Vector m(1);
  m << 1.0;
  const OptimizerState s = TwoClassState(Matrix::Identity(1, 1),
                                         Matrix::Identity(1, 1),
                                         Vector::Zero(1), m);
  NeighborhoodGraph g = NeighborhoodGraph::Complete({"X", "Y"});
  const CostResult c = CostJ(s, g);
  EXPECT_NEAR(c.value, 1.0, 1e-15);
  EXPECT_EQ(c.pair, OrderedPair("X", "Y"));  // lexicographic tie-break
}

TEST(CostJTest, ChainMatchesExhaustiveSearch) {
  std::mt19937_64 rng(32);
  OptimizerState s;
  s.labels = {"a", "b", "c"};
  for (int i = 0; i < 3; ++i) {
    s.inv_cov.push_back(RandomSpd(2, rng));
    s.means.push_back(RandomVector(2, rng));
  }
  NeighborhoodGraph g;
  for (const auto& l : s.labels) g.AddLabel(l);
  g.AddEdge("a", "b");
  g.AddEdge("b", "c");
  double best = -INFINITY;
  OrderedPair arg;
  for (const auto& [x, y] : std::vector<std::pair<int, int>>{
           {0, 1}, {1, 0}, {1, 2}, {2, 1}}) {
    const double v = SurrogateCostG(s.inv_cov[x], s.inv_cov[y], s.means[x],
                                    s.means[y]);
    if (v > best) best = v, arg = {s.labels[x], s.labels[y]};
  }
  const CostResult c = CostJ(s, g);
  EXPECT_NEAR(c.value, best, 1e-12);
  EXPECT_EQ(c.pair, arg);
}

TEST(CostJTest, NoEdgesThrows) {
  const OptimizerState s =
      TwoClassState(Matrix::Identity(1, 1), Matrix::Identity(1, 1),
                    Vector::Zero(1), Vector::Ones(1));
  NeighborhoodGraph g;
  g.AddLabel("X");
  g.AddLabel("Y");
  EXPECT_THROW(CostJ(s, g), std::invalid_argument);
}

TEST(StepSizeBoundTest, MatchesHandTranscription) {
  Matrix a_x(2, 2), a_y(2, 2);
  a_x << 2.0, 0.3, 0.3, 1.0;
  a_y << 0.7, -0.1, -0.1, 1.5;
  Vector mx(2), my(2);
  mx << 0.0, 0.0;
  my << 1.0, -0.5;
  const OptimizerState s = TwoClassState(a_x, a_y, mx, my);
  const StepBound bound =
      StepSizeBound(s, NeighborhoodGraph::Complete({"X", "Y"}), {"X", "Y"});
  ASSERT_EQ(bound.terms.size(), 1u);
  EXPECT_EQ(bound.updated, "Y");

  // Updated variable u = Y, neighbor X, v = mu_Y - mu_X.
  const Vector v = my - mx;
  const Matrix inv = a_y.inverse();
  const double ld_u = std::log(a_y.determinant());
  const double ld_x = std::log(a_x.determinant());
  const double tr = (inv * inv).trace();
  const double b = (v.dot(a_y * v) - v.dot(a_x * v) + ld_u + ld_x - 2 * ld_u) /
                   (tr - v.dot(inv * v));
  const double d = (v.dot(a_y * v) + ld_u - ld_x) /
                   (v.dot(inv * v) - tr - std::pow(v.dot(v), 2));
  EXPECT_NEAR(bound.terms[0].b, b, 1e-12 * (1 + std::abs(b)));
  EXPECT_NEAR(bound.terms[0].d, d, 1e-12 * (1 + std::abs(d)));
  EXPECT_DOUBLE_EQ(bound.alpha, std::max(0.0, std::min(b, d)));
}

TEST(StepSizeBoundTest, NegativeBoundsGiveZero) {
  // Equal means and A_Y = A_X: b = 0/..., d = 0/... -> no move.
  const OptimizerState s =
      TwoClassState(Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2),
                    Vector::Zero(2), Vector::Zero(2));
  const StepBound bound =
      StepSizeBound(s, NeighborhoodGraph::Complete({"X", "Y"}), {"X", "Y"});
  EXPECT_LT(std::min(bound.terms[0].b, bound.terms[0].d), 0.0);
  EXPECT_EQ(bound.alpha, 0.0);
}

TEST(StepSizeBoundTest, PositiveStepNeverIncreasesCost) {
  std::mt19937_64 rng(33);
  int positive = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const int k = 1 + trial % 3;
    std::vector<ClassGaussian> classes;
    for (const char* l : {"a", "b", "c"}) {
      ClassGaussian c = RandomClass(l, k, rng);
      c.mean *= trial % 5;
      classes.push_back(c);
    }
    const ClassEnsemble e =
        MakeEnsemble(classes, {{"a", "b"}, {"b", "c"}, {"a", "c"}});
    const OptimizerState s = WhiteInitState(e, AccuracyBudget(1.0));
    const CostResult c = CostJ(s, e.graph);
    const StepBound bound = StepSizeBound(s, e.graph, c.pair);
    EXPECT_GE(bound.alpha, 0.0);
    EXPECT_TRUE(std::isfinite(bound.alpha));
    if (!(bound.alpha > 0.0)) continue;
    ++positive;
    const int u = s.IndexOf(c.pair.second), x = s.IndexOf(c.pair.first);
    const Vector v = s.means[u] - s.means[x];
    OptimizerState next = s;
    next.inv_cov[u] = PsdProject(
        s.inv_cov[u] - bound.alpha * (v * v.transpose() - s.inv_cov[u].inverse()));
    ASSERT_TRUE(IsPositiveDefinite(next.inv_cov[u]));
    EXPECT_LE(CostJ(next, e.graph).value, c.value + 1e-12);
  }
  EXPECT_GT(positive, 50);
}

TEST(OptimizerTest, IdenticalClassesStayAtWhiteInit) {
  const ClassGaussian a{"A", Vector::Zero(2), Matrix::Identity(2, 2)};
  ClassGaussian b = a;
  b.label = "B";
  const ClassEnsemble e = MakeEnsemble({a, b}, {{"A", "B"}});
  const OptimizationResult r = OptimizeInverseCovariances(e, AccuracyBudget(1.0));
  EXPECT_EQ(r.final_cost, r.initial_cost);
  const OptimizerState init = WhiteInitState(e, AccuracyBudget(1.0));
  for (size_t i = 0; i < init.inv_cov.size(); ++i) {
    EXPECT_EQ(r.state.inv_cov[i], init.inv_cov[i]);
  }
  ASSERT_EQ(r.trace.records.size(), 2u);
  EXPECT_EQ(r.trace.records[0].alpha, 0.0);
}

TEST(OptimizerTest, SyntheticTraceDescends) {
  const ClassEnsemble e = GenSyntheticScenario(4, 2, 0);
  const OptimizationResult r = OptimizeInverseCovariances(e, AccuracyBudget(1.0));
  EXPECT_LE(r.final_cost, r.initial_cost);
  EXPECT_EQ(r.trace.records.front().cost, r.initial_cost);
  EXPECT_EQ(r.trace.records.back().cost, r.final_cost);
  for (size_t i = 1; i < r.trace.records.size(); ++i) {
    EXPECT_LE(r.trace.records[i].cost, r.trace.records[i - 1].cost);
    EXPECT_GE(r.trace.records[i].alpha, 0.0);
  }
  for (const Matrix& a : r.state.inv_cov) EXPECT_TRUE(IsPositiveDefinite(a));
  EXPECT_FALSE(r.trace.termination.empty());
}

TEST(OptimizerTest, ScalarCaseMatchesGridOverUpdatedVariable) {
  // Two 1-D classes. The argmax pair is (a, b), so only A_b moves; its best
  // value against the fixed A_a is found by brute force on a fine log grid.
  const ClassEnsemble e = MakeEnsemble(
      {{"a", Vector::Zero(1), Matrix::Identity(1, 1)},
       {"b", Vector::Constant(1, 1.5), 2.0 * Matrix::Identity(1, 1)}},
      {{"a", "b"}});
  const OptimizationResult r = OptimizeInverseCovariances(e, AccuracyBudget(1.0));
  const double a_fixed = r.state.inv_cov[0](0, 0);
  EXPECT_EQ(a_fixed, 0.5);  // (1 + rho/k)^{-1}, untouched
  const double v2 = 1.5 * 1.5;
  double grid_best = INFINITY, grid_arg = 0.0;
  const double ratio = 1.0001;
  for (double b = 1e-4; b < 1e2; b *= ratio) {
    const double j = std::max(v2 * b - std::log(b) + std::log(a_fixed),
                              v2 * a_fixed - std::log(a_fixed) + std::log(b));
    if (j < grid_best) grid_best = j, grid_arg = b;
  }
  EXPECT_NEAR(r.final_cost, grid_best, 1e-6);
  EXPECT_NEAR(r.state.inv_cov[1](0, 0), grid_arg, grid_arg * (ratio - 1.0));
}

TEST(OptimizerTest, InvalidEnsembleRejected) {
  ClassGaussian a{"A", Vector::Zero(2), Matrix::Identity(2, 2)};
  a.covariance(0, 1) = 0.5;
  const ClassEnsemble e = MakeEnsemble(
      {a, {"B", Vector::Ones(2), Matrix::Identity(2, 2)}}, {{"A", "B"}});
  EXPECT_THROW(OptimizeInverseCovariances(e, AccuracyBudget(1.0)), ConfigError);
}

TEST(ExtractNoiseTest, ScalingExample) {
  const Matrix sigma = Matrix::Identity(2, 2);
  const Matrix a_inv = sigma + 2.0 * Matrix::Identity(2, 2);
  const Matrix out = ExtractNoiseCovariance(a_inv.inverse(), sigma, 1.0);
  EXPECT_NEAR(out(0, 0), 0.5, 1e-12);
  EXPECT_NEAR(out(1, 1), 0.5, 1e-12);
  EXPECT_NEAR(out(0, 1), 0.0, 1e-12);
}

TEST(ExtractNoiseTest, ClipThenScale) {
  // A^{-1} - Sigma = diag(3, -1).
  const Matrix sigma2 = Eigen::Vector2d(1.0, 3.0).asDiagonal();
  const Matrix a_inv2 = Eigen::Vector2d(4.0, 2.0).asDiagonal();
  const Matrix out = ExtractNoiseCovariance(a_inv2.inverse(), sigma2, 2.0);
  EXPECT_NEAR(out(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(out(1, 1), 0.0, 1e-12);
}

TEST(ExtractNoiseTest, RandomInstancesRespectBudget) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix sigma = RandomSpd(3, rng);
    const Matrix a = (sigma + RandomSpd(3, rng)).inverse();
    const double rho = 0.1 + trial;
    const Matrix out = ExtractNoiseCovariance(a, sigma, rho);
    EXPECT_NEAR(out.trace(), rho, 1e-9 * rho);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(out);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12 * rho);
  }
}

TEST(ExtractNoiseTest, ZeroTraceSignalsFallback) {
  const Matrix sigma = Matrix::Identity(2, 2);
  EXPECT_THROW(ExtractNoiseCovariance(2.0 * sigma, sigma, 1.0), ZeroTraceError);
}

TEST(DesignNoiseTest, FallbackToWhiteWithWarning) {
  // Identical classes: A* stays at (Sigma + rho/k I)^{-1}, so extraction
  // recovers white noise with no fallback needed.
  const ClassGaussian a{"A", Vector::Zero(2), Matrix::Identity(2, 2)};
  ClassGaussian b = a;
  b.label = "B";
  const NoiseDesign d =
      DesignNoise(MakeEnsemble({a, b}, {{"A", "B"}}), AccuracyBudget(1.0));
  EXPECT_TRUE(d.warnings.empty());
  EXPECT_EQ(CheckBudget(d.spec), "");
  EXPECT_NEAR(d.spec.Find("A").covariance(0, 0), 0.5, 1e-12);
}

TEST(DesignNoiseTest, SyntheticSpecRespectsBudget) {
  const ClassEnsemble e = GenSyntheticScenario(4, 2, 3);
  for (double rho : {0.5, 1.0, 2.0}) {
    const NoiseDesign d = DesignNoise(e, AccuracyBudget(rho));
    EXPECT_EQ(CheckBudget(d.spec), "") << "rho=" << rho;
    EXPECT_EQ(d.spec.classes.size(), 4u);
  }
}

TEST(WhiteNoiseSpecTest, Examples) {
  const NoiseSpec two = WhiteNoiseSpec({"A"}, 2, 1.0);
  EXPECT_EQ(two.Find("A").covariance, Matrix(0.5 * Matrix::Identity(2, 2)));
  const NoiseSpec twelve = WhiteNoiseSpec({"A", "B"}, 12, 0.45);
  EXPECT_NEAR(twelve.Find("B").covariance(3, 3), 0.0375, 1e-15);
  EXPECT_NEAR(twelve.Find("B").covariance.trace(), 0.45, 1e-15);
  EXPECT_EQ(CheckBudget(twelve), "");
}

TEST(PrivatizeQueryTest, ZeroCovarianceIsIdentity) {
  const NoiseSpec zero = ZeroNoiseSpec({"A"}, 3, 1.0);
  Vector q(3);
  q << 1.25, -3.5, 1e-7;
  EXPECT_EQ(PrivatizeQuery(q, "A", zero, 5), q);
}

TEST(PrivatizeQueryTest, DeterministicPerSeed) {
  const NoiseSpec white = WhiteNoiseSpec({"A"}, 2, 1.0);
  const Vector q = Vector::Ones(2);
  EXPECT_EQ(PrivatizeQuery(q, "A", white, 9), PrivatizeQuery(q, "A", white, 9));
  EXPECT_NE(PrivatizeQuery(q, "A", white, 9), PrivatizeQuery(q, "A", white, 10));
  EXPECT_THROW(PrivatizeQuery(q, "missing", white, 9), std::invalid_argument);
}

TEST(PrivatizeQueryTest, EmpiricalCovarianceMatches) {
  std::mt19937_64 rng(35);
  NoiseSpec spec = WhiteNoiseSpec({"A"}, 3, 1.0);
  const Matrix target = RandomSpd(3, rng);
  spec.classes[0].covariance = target;
  const int n = 100000;
  Matrix acc = Matrix::Zero(3, 3);
  for (int i = 0; i < n; ++i) {
    const Vector eta = PrivatizeQuery(Vector::Zero(3), "A", spec, DeriveSeed(1, i));
    acc += eta * eta.transpose();
  }
  acc /= n;
  EXPECT_LT((acc - target).norm(), 0.05 * target.norm());
}

TEST(InvarianceTest, CommonNoiseShrinksMeanTerm) {
  std::mt19937_64 rng(36);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix sigma = RandomSpd(3, rng);
    const Matrix added = RandomSpd(3, rng);
    const Vector v = RandomVector(3, rng);
    const double before = v.dot(sigma.inverse() * v);
    const double after = v.dot((sigma + added).inverse() * v);
    EXPECT_LT(after, before);
  }
}

TEST(DescentTraceCsvTest, Layout) {
  DescentTrace t;
  t.records.push_back({0, {"a", "b"}, 1.5, 0.25, false});
  EXPECT_EQ(DescentTraceToCsv(t), "t,pair,J,alpha\n0,a->b,1.5,0.25\n");
}

}  // namespace
}  // namespace classdp
