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

#include "classdp/forecast_pipeline.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "classdp/io_util.h"

namespace classdp {
namespace {

constexpr double kZ95 = 1.959963984540054;

}  // namespace

ClassForecast ForecastClass(const ClassSeries& series, int history,
                            int horizon, int period) {
  const SeasonalLogSeries logs = ToLogResidual(series.values, period);
  const int len = logs.original_length;
  if (history < 1 || history > len) {
    throw std::invalid_argument("class " + series.label +
                                ": history length exceeds the series");
  }
  ClassForecast out;
  out.label = series.label;
  out.first_index = len;
  out.residual = ForecastArma(
      series.model,
      std::span<const double>(logs.residuals).subspan(len - history), horizon);
  out.seasonal = logs.MeansFor(len, horizon);
  out.log_mean =
      out.residual.mean + Eigen::Map<const Vector>(out.seasonal.data(), horizon);
  out.plain = FromLogResidual(
      std::span<const double>(out.residual.mean.data(), horizon), out.seasonal);
  return out;
}

PipelineResult RunForecastPipeline(
    const std::vector<ClassSeries>& classes,
    const std::vector<std::pair<Label, Label>>& edges,
    const PipelineOptions& options) {
  if (classes.empty()) throw std::invalid_argument("pipeline needs classes");
  PipelineResult result;
  result.forecasts.resize(classes.size());
  for (size_t i = 0; i < classes.size(); ++i) {
    result.forecasts[i] = ForecastClass(classes[i], options.history,
                                        options.horizon, options.period);
  }
  std::sort(result.forecasts.begin(), result.forecasts.end(),
            [](const ClassForecast& a, const ClassForecast& b) {
              return a.label < b.label;
            });

  std::vector<ClassGaussian> gaussians;
  for (const auto& f : result.forecasts) {
    gaussians.push_back({f.label, f.log_mean, f.residual.covariance});
  }
  result.ensemble = MakeEnsemble(std::move(gaussians), edges);
  RequireValidEnsemble(result.ensemble);

  if (options.noise_override.has_value()) {
    result.noise = *options.noise_override;
  } else {
    NoiseDesign design = DesignNoise(result.ensemble,
                                     AccuracyBudget(options.rho),
                                     options.optimizer, options.white_fallback);
    result.noise = std::move(design.spec);
    result.trace = std::move(design.optimization.trace);
    result.warnings = std::move(design.warnings);
  }

  const int t = options.horizon;
  for (size_t i = 0; i < result.forecasts.size(); ++i) {
    ClassForecast& f = result.forecasts[i];
    const Vector eta = PrivatizeQuery(Vector::Zero(t), f.label, result.noise,
                                      DeriveSeed(options.seed, i));
    const Vector residual_released = f.residual.mean + eta;
    f.log_released =
        residual_released + Eigen::Map<const Vector>(f.seasonal.data(), t);
    f.released = FromLogResidual(
        std::span<const double>(residual_released.data(), t), f.seasonal);
    const Vector sd = (f.residual.covariance +
                       result.noise.Find(f.label).covariance)
                          .diagonal()
                          .cwiseMax(0.0)
                          .cwiseSqrt();
    f.lower95.resize(t);
    f.upper95.resize(t);
    for (int s = 0; s < t; ++s) {
      f.lower95[s] = std::exp(f.log_released[s] - kZ95 * sd[s]);
      f.upper95[s] = std::exp(f.log_released[s] + kZ95 * sd[s]);
    }
  }

  if (!options.epsilons.empty()) {
    result.curve = EpsilonDeltaCurve(result.ensemble, result.noise,
                                     options.epsilons, options.mc);
  }
  return result;
}

std::string ForecastToCsv(const ClassForecast& forecast) {
  std::ostringstream out;
  out << "step,mean,released,lower95,upper95\n";
  for (size_t s = 0; s < forecast.plain.size(); ++s) {
    out << s + 1 << "," << FormatDouble(forecast.plain[s]) << ","
        << FormatDouble(forecast.released.empty() ? forecast.plain[s]
                                                  : forecast.released[s])
        << ","
        << FormatDouble(forecast.lower95.empty() ? forecast.plain[s]
                                                 : forecast.lower95[s])
        << ","
        << FormatDouble(forecast.upper95.empty() ? forecast.plain[s]
                                                 : forecast.upper95[s])
        << "\n";
  }
  return out.str();
}

}  // namespace classdp
