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

#ifndef CLASSDP_EXPERIMENTS_H_
#define CLASSDP_EXPERIMENTS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "classdp/forecast_pipeline.h"
#include "classdp/gaussian_ensemble.h"
#include "classdp/noise_optimizer.h"
#include "classdp/privacy_analysis.h"

namespace classdp {

// `count` classes with means i*u, u = (1,...,1)/sqrt(k), covariances G G^T
// for G a k x k standard normal matrix, complete graph. Labels are "c0",
// "c1", ... zero-padded to a common width.
ClassEnsemble GenSyntheticScenario(int count, int k, std::uint64_t seed);

struct KMeansResult {
  std::vector<int> assignment;
  std::vector<Vector> centroids;
  std::vector<double> objective;  // within-cluster sum of squares per pass
  int iterations = 0;
};

// Lloyd iterations from k-means++ seeding. Ties go to the lowest cluster
// index; an emptied cluster is moved onto the worst-served point.
KMeansResult KMeansCluster(const std::vector<Vector>& features, int k,
                           std::uint64_t seed, int max_iter = 300);

// Per-phase mean of log p over all full and partial periods.
Vector ClusterFeatures(std::span<const double> p, int period);

// `count` evenly spaced values from lo to hi inclusive.
std::vector<double> LinearGrid(double lo, double hi, int count);

struct ScenarioConfig {
  std::string mode = "synthetic";  // or "timeseries"
  int classes = 4;
  int dim = 2;
  std::vector<double> rhos{0.5, 1.0, 2.0};
  std::vector<double> epsilons = LinearGrid(0.1, 1.0, 20);
  std::int64_t mc_samples = 100000;
  int mc_partitions = 16;
  std::uint64_t seed = 0;
  int arma_m = 2;
  int arma_n = 1;
  int period = 672;
  int clusters = 6;
  int history = 96;
  int horizon = 12;
  std::vector<std::string> inputs;
};

// Validates counts, the epsilon grid and rho values; ConfigError otherwise.
void ValidateConfig(const ScenarioConfig& config);
ScenarioConfig ScenarioConfigFromJson(const std::string& text);
std::string ScenarioConfigToJson(const ScenarioConfig& config);

// Clusters the input series, fits one ARMA model per cluster on the
// geometric-mean profile and returns the log-domain forecast ensemble.
struct TimeseriesScenario {
  std::vector<std::string> paths;
  KMeansResult clustering;
  std::vector<ClassSeries> classes;
  ClassEnsemble ensemble;
};
TimeseriesScenario BuildTimeseriesScenario(const ScenarioConfig& config);

struct MechanismCurves {
  double rho = 0.0;
  PrivacyCurve none;
  PrivacyCurve white;
  PrivacyCurve optimized;
  NoiseSpec optimized_spec;
  OptimizationResult optimization;
  std::vector<std::string> warnings;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct ExperimentResult {
  ClassEnsemble ensemble;
  std::vector<MechanismCurves> cells;  // one per rho, in config order
  std::vector<StageTiming> timings;
  std::vector<std::string> outputs;
};

// No-noise, white and optimized curves for every rho; all three share the
// Monte Carlo stream so they are compared on common random numbers. With
// `out_dir`, writes curves_<rho>.csv, noise_spec_<rho>.json,
// trace_<rho>.csv, noise_spec.json and trace.csv (first rho), ensemble.json,
// curves.svg and manifest.json. Failures are rethrown with the stage name
// prefixed.
ExperimentResult RunCurveExperiment(const ScenarioConfig& config,
                                    const std::optional<std::string>& out_dir);

// `epsilon,delta_none,se_none,delta_white,se_white,delta_optimized,
// se_optimized`.
std::string CurvesCsv(const MechanismCurves& cell);

std::string VersionString();

}  // namespace classdp

#endif  // CLASSDP_EXPERIMENTS_H_
