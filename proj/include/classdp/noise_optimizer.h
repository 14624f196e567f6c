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

#ifndef CLASSDP_NOISE_OPTIMIZER_H_
#define CLASSDP_NOISE_OPTIMIZER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "classdp/errors.h"
#include "classdp/gaussian_ensemble.h"
#include "classdp/noise_spec.h"

namespace classdp {

// Per-class inverse released covariances A_X = (Sigma_X + Sigma_eta|X)^{-1}
// together with the released means. Index i refers to labels[i], which are
// sorted.
struct OptimizerState {
  std::vector<Label> labels;
  std::vector<Matrix> inv_cov;
  std::vector<Vector> means;

  int IndexOf(const Label& label) const;
};

// A_X = (Sigma_X + (rho/k) I)^{-1}: the white-noise starting point.
OptimizerState WhiteInitState(const ClassEnsemble& ensemble,
                              const AccuracyBudget& budget);

// g_XX' = v^T A_X' v - ln|A_X'| + ln|A_X| with v = mu_X' - mu_X.
double SurrogateCostG(const Matrix& a_x, const Matrix& a_x_prime,
                      const Vector& mu_x, const Vector& mu_x_prime);

struct CostResult {
  double value = 0.0;
  OrderedPair pair;
};

// J = max of g over all ordered edges, ties to the lexicographically first
// pair. Throws std::invalid_argument when the graph has no edges.
CostResult CostJ(const OptimizerState& state, const NeighborhoodGraph& graph);

struct StepBoundTerm {
  Label neighbor;
  double b = 0.0;
  double d = 0.0;
};

struct StepBound {
  double alpha = 0.0;
  Label updated;
  std::vector<StepBoundTerm> terms;
};

// Descent-preserving step size for the variable being updated, which is the
// second label of the selected pair. For each neighbor X of that label u,
// with v = mu_u - mu_X, T = Tr(A_u^{-2}):
//
//   b = (v'A_u v - v'A_X v + ln|A_u| + ln|A_X| - 2 ln|A_u|) / (T - v'A_u^{-1}v)
//   d = (v'A_u v + ln|A_u| - ln|A_X|) / (v'A_u^{-1}v - T - (v'v)^2)
//
// and alpha = max(0, min over X of min(b, d)). Non-finite results collapse
// to 0.
StepBound StepSizeBound(const OptimizerState& state,
                        const NeighborhoodGraph& graph,
                        const OrderedPair& pair);

struct OptimizerOptions {
  int max_iterations = 10000;
  double alpha_floor = 1e-12;
  double relative_tolerance = 1e-8;
  int stall_window = 10;
  double backtrack_initial = 0.1;
  int max_halvings = 30;
};

struct DescentRecord {
  int t = 0;
  OrderedPair pair;
  double cost = 0.0;   // J before the step at iteration t
  double alpha = 0.0;  // accepted step, 0 when none
  bool backtracked = false;
};

struct DescentTrace {
  std::vector<DescentRecord> records;
  std::string termination;
};

struct OptimizationResult {
  OptimizerState state;
  DescentTrace trace;
  double initial_cost = 0.0;
  double final_cost = 0.0;
};

// Block-coordinate projected descent on the inverse released covariances.
// Each iteration picks the argmax pair, steps A of its second label along
// -(v v^T - A^{-1}), projects onto the PSD cone and accepts the step only
// if the re-evaluated J strictly decreases. The StepSizeBound step is tried
// first, then halving from 0.1.
OptimizationResult OptimizeInverseCovariances(const ClassEnsemble& ensemble,
                                              const AccuracyBudget& budget,
                                              const OptimizerOptions& options = {});

// Signals that A*^{-1} - Sigma_X has no PSD direction to put noise in.
class ZeroTraceError : public NumericError {
 public:
  explicit ZeroTraceError(const std::string& what) : NumericError(what) {}
};

// rho * P / Tr(P) with P = Proj_PSD(A*^{-1} - Sigma_X).
Matrix ExtractNoiseCovariance(const Matrix& a_star, const Matrix& sigma_x,
                              double rho);

// Isotropic (rho/k) I for every label.
NoiseSpec WhiteNoiseSpec(const std::vector<Label>& labels, int k, double rho);

struct NoiseDesign {
  NoiseSpec spec;
  OptimizationResult optimization;
  std::vector<std::string> warnings;
};

// Optimize, then extract a budget-respecting covariance per class. With
// `white_fallback`, a class whose extraction has zero trace gets white noise
// and a warning; otherwise the ZeroTraceError propagates.
NoiseDesign DesignNoise(const ClassEnsemble& ensemble,
                        const AccuracyBudget& budget,
                        const OptimizerOptions& options = {},
                        bool white_fallback = true);

// q + eta with eta ~ N(0, Sigma_eta|label), deterministic in `seed`.
Vector PrivatizeQuery(const Vector& q, const Label& label,
                      const NoiseSpec& noise, std::uint64_t seed);

// CSV `t,pair,J,alpha`; pair is written as "X->X'".
std::string DescentTraceToCsv(const DescentTrace& trace);

}  // namespace classdp

#endif  // CLASSDP_NOISE_OPTIMIZER_H_
