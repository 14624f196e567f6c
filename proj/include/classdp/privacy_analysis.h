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

#ifndef CLASSDP_PRIVACY_ANALYSIS_H_
#define CLASSDP_PRIVACY_ANALYSIS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "classdp/gaussian_ensemble.h"
#include "classdp/noise_spec.h"

namespace classdp {

// Whitened geometry of an ordered class pair (X, X'). With
// U diag(gamma) U^T = Sigma_X^{1/2} Sigma_X'^{-1} Sigma_X^{1/2} and
// xi = U^T Sigma_X^{-1/2} (q - mu_X) ~ N(0, I) under X, the privacy loss is
//
//   L(xi) = -1/2 ln|Gamma| + 1/2 xi^T (Gamma - I) xi
//           - mu^T Gamma xi + 1/2 mu^T Gamma mu,
//
// where mu = U^T Sigma_X^{-1/2} (mu_X' - mu_X) is `mean_offset`.
struct PairGeometry {
  Matrix eigvecs;       // U, columns sign-normalized
  Vector eigvals;       // gamma, descending
  Vector mean_offset;   // mu_XX'
  double gamma_max = 0;
  Matrix whitening;     // U^T Sigma_X^{-1/2}, maps q - mu_X to xi

  int dim() const { return static_cast<int>(eigvals.size()); }
  double LogDetGamma() const { return eigvals.array().log().sum(); }
};

// Throws std::invalid_argument on dimension mismatch and NumericError when a
// covariance is not strictly positive definite.
PairGeometry ComputePairGeometry(const ClassGaussian& x,
                                 const ClassGaussian& x_prime);

// ln f(q|X) - ln f(q|X') through the expanded quadratic form
//   1/2 ln|S'| - 1/2 ln|S| + 1/2 (q-m)^T (S'^-1 - S^-1)(q-m)
//   + (m - m')^T S'^-1 (q-m) + 1/2 (m'-m)^T S'^-1 (m'-m).
double PrivacyLoss(const Vector& q, const ClassGaussian& x,
                   const ClassGaussian& x_prime);

// L evaluated in whitened coordinates.
double PrivacyLossWhitened(const Vector& xi, const PairGeometry& geom);

// Pr(L > epsilon) when both covariances are equal, so that
// L ~ N(|mu|^2 / 2, |mu|^2). For |mu| = 0 the loss is identically zero and
// the result is Pr(0 > epsilon).
double DeltaExactEqualCov(double mean_offset_norm, double epsilon);

struct MonteCarloOptions {
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;
  // Fixed work split. Results depend on (seed, partitions) only, never on
  // the number of threads.
  int partitions = 16;
};

struct DeltaEstimate {
  std::vector<double> epsilons;
  std::vector<double> deltas;
  std::vector<double> std_errors;  // sqrt(d (1 - d) / n)
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
};

// One-sided tail Pr(L_XX'(q) > eps) for q ~ N(mu_X, Sigma_X), on an
// ascending epsilon grid. Requires samples >= 1000. Partitions run in
// parallel with OpenMP.
DeltaEstimate DeltaMonteCarlo(const PairGeometry& geom,
                              std::span<const double> epsilons,
                              const MonteCarloOptions& options);
DeltaEstimate DeltaMonteCarlo(const ClassGaussian& x,
                              const ClassGaussian& x_prime,
                              std::span<const double> epsilons,
                              const MonteCarloOptions& options);

// Serial reference for DeltaMonteCarlo; bit-identical output.
DeltaEstimate DeltaMonteCarloSerial(const PairGeometry& geom,
                                    std::span<const double> epsilons,
                                    const MonteCarloOptions& options);

struct ChernoffBound {
  double bound = 1.0;  // clipped at 1
  double s = 0.0;      // the free parameter used
};

// Upper bound on Pr(L > eps) valid for every s > max(1, gamma_max):
//
//   (s-1)^{k/2} / (|Gamma|^{1/(2(s-1))} |sI - Gamma|^{1/2})
//     * exp(-eps/(s-1) + s/(2(s-1)) mu^T (sI - Gamma)^{-1} Gamma mu).
//
// With no s given, s minimizes the bound by golden-section search on
// log(s - max(1, gamma_max)) over [1e-6, 1e3].
ChernoffBound ChernoffDeltaBound(const PairGeometry& geom, double epsilon,
                                 std::optional<double> s = std::nullopt);

// Natural log of the unclipped bound at a fixed admissible s.
double ChernoffLogBound(const PairGeometry& geom, double epsilon, double s);

struct SensitivityResult {
  double value = 0.0;
  OrderedPair pair;
};

// max over ordered edges of 1/2 mu^T Gamma mu - 1/2 ln|Gamma| for the given
// (already released) ensemble. Ties go to the lexicographically first pair.
SensitivityResult GaussianSensitivity(const ClassEnsemble& released);
SensitivityResult GaussianSensitivity(const ClassEnsemble& ensemble,
                                      const NoiseSpec& noise);

struct EdgeCurve {
  OrderedPair pair;
  std::vector<double> deltas;
  std::vector<double> std_errors;
};

struct PrivacyCurve {
  std::vector<double> epsilons;
  std::vector<double> deltas;      // max over ordered edges
  std::vector<double> std_errors;  // of the maximizing edge
  std::vector<EdgeCurve> per_edge;
  std::int64_t mc_samples = 0;
  std::uint64_t seed = 0;
};

// delta(eps) of the release N(mu_X, Sigma_X + Sigma_eta|X) over every
// ordered edge. Without noise, the query itself is released. Each ordered
// edge i draws from stream DeriveSeed(seed, i).
PrivacyCurve EpsilonDeltaCurve(const ClassEnsemble& ensemble,
                               std::span<const double> epsilons,
                               const MonteCarloOptions& options);
PrivacyCurve EpsilonDeltaCurve(const ClassEnsemble& ensemble,
                               const NoiseSpec& noise,
                               std::span<const double> epsilons,
                               const MonteCarloOptions& options);

// CSV `epsilon,delta,std_err,delta_<X>_<X'>...`, 17 significant digits.
std::string PrivacyCurveToCsv(const PrivacyCurve& curve);

}  // namespace classdp

#endif  // CLASSDP_PRIVACY_ANALYSIS_H_
