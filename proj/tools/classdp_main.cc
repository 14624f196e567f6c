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

// Command-line front end: scenario generation, clustering, ARMA fitting and
// forecasting, noise design, privacy curves and query release.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "classdp/arma_forecast.h"
#include "classdp/errors.h"
#include "classdp/experiments.h"
#include "classdp/forecast_pipeline.h"
#include "classdp/gaussian_ensemble.h"
#include "classdp/io_util.h"
#include "classdp/noise_optimizer.h"
#include "classdp/noise_spec.h"
#include "classdp/privacy_analysis.h"
#include "classdp/timeseries_io.h"

namespace {

using namespace classdp;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string config_path;
  std::string out_dir = ".";
};

std::string OutPath(const Globals& g, const std::string& name) {
  std::filesystem::create_directories(g.out_dir);
  return (std::filesystem::path(g.out_dir) / name).string();
}

ScenarioConfig LoadConfig(const Globals& g) {
  ScenarioConfig config;
  if (!g.config_path.empty()) {
    config = ScenarioConfigFromJson(ReadTextFile(g.config_path));
  }
  if (g.seed_set) config.seed = g.seed;
  return config;
}

std::vector<double> ParseList(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size() && item.find_first_not_of(" \t", used) !=
                                     std::string::npos) {
        throw std::invalid_argument(item);
      }
    } catch (const std::exception&) {
      throw ConfigError("not a number: \"" + item + "\"");
    }
  }
  return out;
}

void Report(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class-conditional Gaussian differential privacy toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option_function<std::uint64_t>(
      "--seed", [&](const std::uint64_t& s) { g.seed = s, g.seed_set = true; },
      "Root random seed");
  app.add_option("--config", g.config_path, "Scenario config (JSON)");
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate the synthetic ensemble");
  std::optional<int> synth_classes, synth_dim;
  synth->add_option("--classes", synth_classes, "Number of classes");
  synth->add_option("--dim", synth_dim, "Query dimension");

  // cluster
  auto* cluster = app.add_subcommand("cluster", "k-means over load series");
  std::vector<std::string> cluster_inputs;
  int cluster_k = 6;
  std::optional<int> cluster_period;
  cluster->add_option("inputs", cluster_inputs, "Series CSV files")->required();
  cluster->add_option("-k,--clusters", cluster_k, "Cluster count")
      ->capture_default_str();
  cluster->add_option("--period", cluster_period, "Seasonal period");

  // fit
  auto* fit = app.add_subcommand("fit", "Fit ARMA(m,n) to log-seasonal residuals");
  std::string fit_input;
  std::optional<int> fit_m, fit_n, fit_period;
  fit->add_option("input", fit_input, "Series CSV")->required();
  fit->add_option("-m", fit_m, "AR order");
  fit->add_option("-n", fit_n, "MA order");
  fit->add_option("--period", fit_period, "Seasonal period");

  // forecast
  auto* forecast = app.add_subcommand("forecast", "Plain ARMA forecast");
  std::string fc_input, fc_model;
  std::optional<int> fc_m, fc_n, fc_period, fc_history, fc_horizon;
  forecast->add_option("input", fc_input, "Series CSV")->required();
  forecast->add_option("--model", fc_model, "Model JSON from `fit`");
  forecast->add_option("-m", fc_m, "AR order when fitting");
  forecast->add_option("-n", fc_n, "MA order when fitting");
  forecast->add_option("--period", fc_period, "Seasonal period");
  forecast->add_option("--history", fc_history, "Conditioning length K");
  forecast->add_option("--horizon", fc_horizon, "Forecast length T");

  // design-noise
  auto* design = app.add_subcommand("design-noise", "Optimize class noise");
  std::string dn_ensemble;
  double dn_rho = 1.0;
  design->add_option("--ensemble", dn_ensemble, "Ensemble JSON")->required();
  design->add_option("--rho", dn_rho, "Accuracy budget")->capture_default_str();

  // curve
  auto* curve = app.add_subcommand(
      "curve", "(eps, delta) curves; full experiment without --ensemble");
  std::string cv_ensemble, cv_noise, cv_eps;
  std::optional<std::int64_t> cv_samples;
  curve->add_option("--ensemble", cv_ensemble, "Ensemble JSON");
  curve->add_option("--noise", cv_noise, "Noise spec JSON");
  curve->add_option("--epsilons", cv_eps, "Comma-separated epsilon grid");
  curve->add_option("--samples", cv_samples, "Monte Carlo samples");

  // privatize
  auto* privatize = app.add_subcommand("privatize", "Release q + eta");
  std::string pv_noise, pv_label, pv_query;
  privatize->add_option("--noise", pv_noise, "Noise spec JSON")->required();
  privatize->add_option("--label", pv_label, "Class label")->required();
  privatize->add_option("--query", pv_query, "Comma-separated query")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth) {
      ScenarioConfig config = LoadConfig(g);
      if (synth_classes) config.classes = *synth_classes;
      if (synth_dim) config.dim = *synth_dim;
      const ClassEnsemble ensemble =
          GenSyntheticScenario(config.classes, config.dim, config.seed);
      WriteEnsembleFile(OutPath(g, "ensemble.json"), ensemble);
    } else if (*cluster) {
      const ScenarioConfig config = LoadConfig(g);
      const int period = cluster_period.value_or(config.period);
      std::vector<Vector> features;
      size_t length = SIZE_MAX;
      std::vector<std::vector<double>> series;
      for (const auto& path : cluster_inputs) {
        series.push_back(ReadTimeSeriesCsv(path).values);
        length = std::min(length, series.back().size());
      }
      for (auto& s : series) {
        s.resize(length);
        features.push_back(ClusterFeatures(s, period));
      }
      const KMeansResult km = KMeansCluster(features, cluster_k, config.seed);
      std::ostringstream csv;
      csv << "path,cluster\n";
      for (size_t i = 0; i < cluster_inputs.size(); ++i) {
        csv << cluster_inputs[i] << "," << km.assignment[i] << "\n";
      }
      WriteTextFile(OutPath(g, "clusters.csv"), csv.str());
      std::cout << "objective " << FormatDouble(km.objective.back())
                << " after " << km.iterations << " iterations\n";
    } else if (*fit) {
      const ScenarioConfig config = LoadConfig(g);
      const TimeSeries ts = ReadTimeSeriesCsv(fit_input);
      const SeasonalLogSeries logs =
          ToLogResidual(ts.values, fit_period.value_or(config.period));
      const ArmaModel model = FitArma(logs.residuals, fit_m.value_or(config.arma_m),
                                      fit_n.value_or(config.arma_n));
      const std::string text = ArmaModelToJson(model).dump(2) + "\n";
      WriteTextFile(OutPath(g, "model.json"), text);
      std::cout << text;
    } else if (*forecast) {
      const ScenarioConfig config = LoadConfig(g);
      const int period = fc_period.value_or(config.period);
      ClassSeries series;
      series.label = "series";
      series.values = ReadTimeSeriesCsv(fc_input).values;
      if (!fc_model.empty()) {
        series.model = ArmaModelFromJson(nlohmann::json::parse(ReadTextFile(fc_model)));
      } else {
        const SeasonalLogSeries logs = ToLogResidual(series.values, period);
        series.model = FitArma(logs.residuals, fc_m.value_or(config.arma_m),
                               fc_n.value_or(config.arma_n));
      }
      ClassForecast f = ForecastClass(series, fc_history.value_or(config.history),
                                      fc_horizon.value_or(config.horizon), period);
      f.released = f.plain;
      for (int s = 0; s < f.residual.horizon; ++s) {
        const double sd = std::sqrt(std::max(0.0, f.residual.covariance(s, s)));
        f.lower95.push_back(std::exp(f.log_mean[s] - 1.959963984540054 * sd));
        f.upper95.push_back(std::exp(f.log_mean[s] + 1.959963984540054 * sd));
      }
      WriteTextFile(OutPath(g, "forecast.csv"), ForecastToCsv(f));
    } else if (*design) {
      const ClassEnsemble ensemble = ReadEnsembleFile(dn_ensemble);
      const NoiseDesign result = DesignNoise(ensemble, AccuracyBudget(dn_rho));
      Report(result.warnings);
      WriteTextFile(OutPath(g, "noise_spec.json"), NoiseSpecToJson(result.spec));
      WriteTextFile(OutPath(g, "trace.csv"),
                    DescentTraceToCsv(result.optimization.trace));
      std::cout << "J " << FormatDouble(result.optimization.initial_cost)
                << " -> " << FormatDouble(result.optimization.final_cost)
                << " (" << result.optimization.trace.termination << ")\n";
    } else if (*curve) {
      ScenarioConfig config = LoadConfig(g);
      if (!cv_eps.empty()) config.epsilons = ParseList(cv_eps);
      if (cv_samples) config.mc_samples = *cv_samples;
      if (cv_ensemble.empty()) {
        if (!cv_noise.empty()) {
          throw ConfigError("--noise requires --ensemble");
        }
        const ExperimentResult result = RunCurveExperiment(config, g.out_dir);
        for (const auto& cell : result.cells) Report(cell.warnings);
      } else {
        ValidateConfig(config);
        const ClassEnsemble ensemble = ReadEnsembleFile(cv_ensemble);
        MonteCarloOptions mc;
        mc.samples = config.mc_samples;
        mc.partitions = config.mc_partitions;
        mc.seed = DeriveSeed(config.seed, 1);
        const PrivacyCurve pc =
            cv_noise.empty()
                ? EpsilonDeltaCurve(ensemble, config.epsilons, mc)
                : EpsilonDeltaCurve(ensemble,
                                    NoiseSpecFromJson(ReadTextFile(cv_noise)),
                                    config.epsilons, mc);
        WriteTextFile(OutPath(g, "curve.csv"), PrivacyCurveToCsv(pc));
      }
    } else if (*privatize) {
      const NoiseSpec noise = NoiseSpecFromJson(ReadTextFile(pv_noise));
      const std::vector<double> q = ParseList(pv_query);
      const Vector released =
          PrivatizeQuery(Eigen::Map<const Vector>(q.data(), q.size()), pv_label,
                         noise, g.seed_set ? g.seed : 0);
      std::ostringstream csv;
      csv << "index,query,released\n";
      for (size_t i = 0; i < q.size(); ++i) {
        csv << i << "," << FormatDouble(q[i]) << ","
            << FormatDouble(released[i]) << "\n";
      }
      WriteTextFile(OutPath(g, "released.csv"), csv.str());
      std::cout << csv.str();
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
