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

#ifndef CLASSDP_FORECAST_PIPELINE_H_
#define CLASSDP_FORECAST_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "classdp/arma_forecast.h"
#include "classdp/gaussian_ensemble.h"
#include "classdp/noise_optimizer.h"
#include "classdp/noise_spec.h"
#include "classdp/privacy_analysis.h"

namespace classdp {

// Positive-valued history of one class plus the ARMA model of its
// log-seasonal residuals.
struct ClassSeries {
  Label label;
  std::vector<double> values;
  ArmaModel model;
};

struct PipelineOptions {
  int history = 96;  // K
  int horizon = 12;  // T
  int period = 672;
  double rho = 0.45;
  std::uint64_t seed = 0;
  MonteCarloOptions mc;
  std::vector<double> epsilons;  // empty: no curve
  OptimizerOptions optimizer;
  bool white_fallback = true;
  // Skip the design and release with this spec instead.
  std::optional<NoiseSpec> noise_override;
};

struct ClassForecast {
  Label label;
  int first_index = 0;            // absolute index of the first forecast step
  Vector log_mean;                // residual forecast + seasonal means
  std::vector<double> seasonal;   // seasonal means of the forecast steps
  ForecastDistribution residual;  // conditional forecast of the residuals
  Vector log_released;
  std::vector<double> plain;      // exp(log_mean)
  std::vector<double> released;   // exp(log_released)
  std::vector<double> lower95;
  std::vector<double> upper95;
};

struct PipelineResult {
  std::vector<ClassForecast> forecasts;  // sorted by label
  ClassEnsemble ensemble;                // log-domain query distributions
  NoiseSpec noise;
  std::optional<DescentTrace> trace;
  std::vector<std::string> warnings;
  std::optional<PrivacyCurve> curve;
};

// Per class: log-seasonal transform, conditional forecast of the next T
// residuals from the last K, query mean = forecast + seasonal means. The
// ensemble of those queries gets designed noise, each query is released with
// stream DeriveSeed(seed, i) and mapped back through exp. The curve, if
// requested, is computed on the released log-domain ensemble.
PipelineResult RunForecastPipeline(const std::vector<ClassSeries>& classes,
                                   const std::vector<std::pair<Label, Label>>& edges,
                                   const PipelineOptions& options);

// Query distribution of one class, without noise.
ClassForecast ForecastClass(const ClassSeries& series, int history,
                            int horizon, int period);

// CSV `step,mean,released,lower95,upper95` in the original units.
std::string ForecastToCsv(const ClassForecast& forecast);

}  // namespace classdp

#endif  // CLASSDP_FORECAST_PIPELINE_H_
