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

#include "classdp/experiments.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "classdp/errors.h"
#include "classdp/io_util.h"
#include "classdp/svg_plot.h"
#include "classdp/timeseries_io.h"

#ifndef CLASSDP_VERSION
#define CLASSDP_VERSION "unknown"
#endif

namespace classdp {
namespace {

using nlohmann::json;

std::string PaddedLabel(const std::string& prefix, int i, int count) {
  const int width = static_cast<int>(std::to_string(std::max(count - 1, 0)).size());
  std::string digits = std::to_string(i);
  return prefix + std::string(width - digits.size(), '0') + digits;
}

double SquaredDistance(const Vector& a, const Vector& b) {
  return (a - b).squaredNorm();
}

// Runs `fn`, records its wall time and prefixes any error with `stage`.
template <typename F>
void RunStage(const std::string& stage, std::vector<StageTiming>& timings,
              F&& fn) {
  const auto start = std::chrono::steady_clock::now();
  try {
    fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + stage + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError("stage " + stage + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("stage " + stage + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error("stage " + stage + ": " + e.what());
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  timings.push_back({stage, elapsed.count()});
}

template <typename T>
T Get(const json& j, const char* key, const T& fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key \"") + key + "\": " + e.what());
  }
}

}  // namespace

ClassEnsemble GenSyntheticScenario(int count, int k, std::uint64_t seed) {
  if (count < 2) throw std::invalid_argument("need at least two classes");
  if (k < 1) throw std::invalid_argument("dimension must be at least 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const Vector u = Vector::Ones(k) / std::sqrt(static_cast<double>(k));
  std::vector<ClassGaussian> classes;
  std::vector<Label> labels;
  for (int i = 0; i < count; ++i) {
    Matrix cov;
    do {
      Matrix g(k, k);
      for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) g(r, c) = normal(rng);
      }
      cov = g * g.transpose();
      cov = 0.5 * (cov + cov.transpose());
    } while (!IsPositiveDefinite(cov));
    labels.push_back(PaddedLabel("c", i, count));
    classes.push_back({labels.back(), static_cast<double>(i) * u, cov});
  }
  ClassEnsemble ensemble = MakeEnsemble(std::move(classes), {});
  ensemble.graph = NeighborhoodGraph::Complete(labels);
  return ensemble;
}

KMeansResult KMeansCluster(const std::vector<Vector>& features, int k,
                           std::uint64_t seed, int max_iter) {
  const int n = static_cast<int>(features.size());
  if (n == 0) throw std::invalid_argument("k-means needs at least one point");
  if (k < 1 || k > n) throw std::invalid_argument("k must be in [1, #points]");
  for (const auto& f : features) {
    if (f.size() != features[0].size()) {
      throw std::invalid_argument("k-means features differ in length");
    }
  }
  std::mt19937_64 rng(seed);
  KMeansResult out;

  // k-means++ seeding.
  std::uniform_int_distribution<int> first(0, n - 1);
  out.centroids.push_back(features[first(rng)]);
  std::vector<double> d2(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& centroid : out.centroids) {
        best = std::min(best, SquaredDistance(features[i], centroid));
      }
      d2[i] = best;
      total += best;
    }
    int pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> uni(0.0, total);
      double target = uni(rng);
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        target -= d2[i];
        if (target < 0.0 && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);
    }
    out.centroids.push_back(features[pick]);
  }

  out.assignment.assign(n, -1);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double objective = 0.0;
    std::vector<double> dist(n);
    for (int i = 0; i < n; ++i) {
      int best_c = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = SquaredDistance(features[i], out.centroids[c]);
        if (d < best) best = d, best_c = c;
      }
      if (out.assignment[i] != best_c) changed = true;
      out.assignment[i] = best_c;
      dist[i] = best;
      objective += best;
    }
    out.objective.push_back(objective);
    out.iterations = iter + 1;
    if (!changed && iter > 0) break;

    std::vector<Vector> sums(k, Vector::Zero(features[0].size()));
    std::vector<int> counts(k, 0);
    for (int i = 0; i < n; ++i) {
      sums[out.assignment[i]] += features[i];
      ++counts[out.assignment[i]];
    }
    std::vector<bool> taken(n, false);
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        out.centroids[c] = sums[c] / counts[c];
        continue;
      }
      int worst = -1;
      for (int i = 0; i < n; ++i) {
        if (!taken[i] && (worst < 0 || dist[i] > dist[worst])) worst = i;
      }
      taken[worst] = true;
      out.centroids[c] = features[worst];
    }
  }
  return out;
}

Vector ClusterFeatures(std::span<const double> p, int period) {
  if (period < 1) throw std::invalid_argument("period must be >= 1");
  if (static_cast<int>(p.size()) < period) {
    throw std::invalid_argument("series shorter than the period");
  }
  const SeasonalLogSeries logs = ToLogResidual(p, period);
  return Eigen::Map<const Vector>(logs.seasonal_means.data(), period);
}

std::vector<double> LinearGrid(double lo, double hi, int count) {
  if (count < 1) throw std::invalid_argument("grid needs at least one point");
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[i] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
  }
  return grid;
}

void ValidateConfig(const ScenarioConfig& c) {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (c.mode != "synthetic" && c.mode != "timeseries") {
    fail("mode must be \"synthetic\" or \"timeseries\"");
  }
  if (c.classes < 2) fail("classes must be >= 2");
  if (c.dim < 1) fail("dim must be >= 1");
  if (c.rhos.empty()) fail("rho list is empty");
  for (double r : c.rhos) {
    if (!(r > 0.0) || !std::isfinite(r)) fail("rho values must be > 0");
  }
  if (c.epsilons.empty()) fail("epsilon grid is empty");
  for (size_t i = 1; i < c.epsilons.size(); ++i) {
    if (!(c.epsilons[i] > c.epsilons[i - 1])) fail("epsilon grid must ascend");
  }
  if (c.mc_samples < 1000) fail("mc_samples must be >= 1000");
  if (c.mc_partitions < 1) fail("mc_partitions must be >= 1");
  if (c.arma_m < 0 || c.arma_n < 0) fail("ARMA orders must be >= 0");
  if (c.period < 1) fail("period must be >= 1");
  if (c.clusters < 2) fail("clusters must be >= 2");
  if (c.history < 1 || c.horizon < 1) fail("history and horizon must be >= 1");
  if (c.mode == "timeseries" &&
      static_cast<int>(c.inputs.size()) < c.clusters) {
    fail("timeseries mode needs at least `clusters` input series");
  }
}

ScenarioConfig ScenarioConfigFromJson(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "mode",    "classes", "dim",        "rho",           "epsilons",
      "epsilon_grid", "mc_samples", "mc_partitions", "seed", "arma",
      "period",  "clusters", "history",   "horizon",       "inputs"};
  for (const auto& item : j.items()) {
    if (!kKnown.count(item.key())) {
      throw ConfigError("unknown config key \"" + item.key() + "\"");
    }
  }
  ScenarioConfig c;
  c.mode = Get(j, "mode", c.mode);
  c.classes = Get(j, "classes", c.classes);
  c.dim = Get(j, "dim", c.dim);
  if (j.contains("rho")) {
    c.rhos = j.at("rho").is_array() ? Get(j, "rho", c.rhos)
                                    : std::vector<double>{Get(j, "rho", 0.0)};
  }
  if (j.contains("epsilons") && j.contains("epsilon_grid")) {
    throw ConfigError("give either epsilons or epsilon_grid, not both");
  }
  c.epsilons = Get(j, "epsilons", c.epsilons);
  if (j.contains("epsilon_grid")) {
    const json& g = j.at("epsilon_grid");
    if (!g.is_object()) throw ConfigError("epsilon_grid must be an object");
    c.epsilons = LinearGrid(Get(g, "start", 0.1), Get(g, "stop", 1.0),
                            std::max(1, Get(g, "count", 20)));
  }
  c.mc_samples = Get(j, "mc_samples", c.mc_samples);
  c.mc_partitions = Get(j, "mc_partitions", c.mc_partitions);
  c.seed = Get(j, "seed", c.seed);
  if (j.contains("arma")) {
    const json& a = j.at("arma");
    if (!a.is_object()) throw ConfigError("arma must be an object {m, n}");
    c.arma_m = Get(a, "m", c.arma_m);
    c.arma_n = Get(a, "n", c.arma_n);
  }
  c.period = Get(j, "period", c.period);
  c.clusters = Get(j, "clusters", c.clusters);
  c.history = Get(j, "history", c.history);
  c.horizon = Get(j, "horizon", c.horizon);
  c.inputs = Get(j, "inputs", c.inputs);
  ValidateConfig(c);
  return c;
}

std::string ScenarioConfigToJson(const ScenarioConfig& c) {
  json j;
  j["mode"] = c.mode;
  j["classes"] = c.classes;
  j["dim"] = c.dim;
  j["rho"] = c.rhos;
  j["epsilons"] = c.epsilons;
  j["mc_samples"] = c.mc_samples;
  j["mc_partitions"] = c.mc_partitions;
  j["seed"] = c.seed;
  j["arma"] = {{"m", c.arma_m}, {"n", c.arma_n}};
  j["period"] = c.period;
  j["clusters"] = c.clusters;
  j["history"] = c.history;
  j["horizon"] = c.horizon;
  j["inputs"] = c.inputs;
  return j.dump(2);
}

TimeseriesScenario BuildTimeseriesScenario(const ScenarioConfig& config) {
  TimeseriesScenario out;
  out.paths = config.inputs;
  std::vector<std::vector<double>> series;
  size_t length = std::numeric_limits<size_t>::max();
  for (const auto& path : config.inputs) {
    series.push_back(ReadTimeSeriesCsv(path).values);
    length = std::min(length, series.back().size());
  }
  std::vector<Vector> features;
  for (auto& s : series) {
    s.resize(length);
    features.push_back(ClusterFeatures(s, config.period));
  }
  out.clustering = KMeansCluster(features, config.clusters, config.seed);

  std::vector<Label> labels;
  for (int c = 0; c < config.clusters; ++c) {
    std::vector<double> log_sum(length, 0.0);
    int members = 0;
    for (size_t i = 0; i < series.size(); ++i) {
      if (out.clustering.assignment[i] != c) continue;
      ++members;
      for (size_t t = 0; t < length; ++t) log_sum[t] += std::log(series[i][t]);
    }
    if (members == 0) continue;
    ClassSeries cls;
    cls.label = PaddedLabel("cluster", c, config.clusters);
    cls.values.resize(length);
    for (size_t t = 0; t < length; ++t) {
      cls.values[t] = std::exp(log_sum[t] / members);
    }
    const SeasonalLogSeries logs = ToLogResidual(cls.values, config.period);
    cls.model = FitArma(logs.residuals, config.arma_m, config.arma_n);
    labels.push_back(cls.label);
    out.classes.push_back(std::move(cls));
  }
  if (labels.size() < 2) {
    throw NumericError("clustering produced fewer than two classes");
  }
  std::vector<ClassGaussian> gaussians;
  for (const auto& cls : out.classes) {
    const ClassForecast f =
        ForecastClass(cls, config.history, config.horizon, config.period);
    gaussians.push_back({cls.label, f.log_mean, f.residual.covariance});
  }
  out.ensemble = MakeEnsemble(std::move(gaussians), {});
  out.ensemble.graph = NeighborhoodGraph::Complete(labels);
  return out;
}

std::string CurvesCsv(const MechanismCurves& cell) {
  std::ostringstream out;
  out << "epsilon,delta_none,se_none,delta_white,se_white,delta_optimized,"
         "se_optimized\n";
  for (size_t i = 0; i < cell.none.epsilons.size(); ++i) {
    out << FormatDouble(cell.none.epsilons[i]) << ","
        << FormatDouble(cell.none.deltas[i]) << ","
        << FormatDouble(cell.none.std_errors[i]) << ","
        << FormatDouble(cell.white.deltas[i]) << ","
        << FormatDouble(cell.white.std_errors[i]) << ","
        << FormatDouble(cell.optimized.deltas[i]) << ","
        << FormatDouble(cell.optimized.std_errors[i]) << "\n";
  }
  return out.str();
}

std::string VersionString() { return CLASSDP_VERSION; }

ExperimentResult RunCurveExperiment(const ScenarioConfig& config,
                                    const std::optional<std::string>& out_dir) {
  ValidateConfig(config);
  const auto wall_start = std::chrono::steady_clock::now();
  ExperimentResult result;
  auto& timings = result.timings;

  std::optional<TimeseriesScenario> timeseries;
  RunStage("scenario", timings, [&] {
    if (config.mode == "synthetic") {
      result.ensemble =
          GenSyntheticScenario(config.classes, config.dim, config.seed);
    } else {
      timeseries = BuildTimeseriesScenario(config);
      result.ensemble = timeseries->ensemble;
    }
    RequireValidEnsemble(result.ensemble);
  });

  MonteCarloOptions mc;
  mc.samples = config.mc_samples;
  mc.partitions = config.mc_partitions;
  mc.seed = DeriveSeed(config.seed, 1);
  const std::vector<Label> labels = result.ensemble.Labels();
  const int k = result.ensemble.dim();

  PrivacyCurve none;
  RunStage("curve none", timings, [&] {
    none = EpsilonDeltaCurve(result.ensemble, config.epsilons, mc);
  });
  for (double rho : config.rhos) {
    MechanismCurves cell;
    cell.rho = rho;
    cell.none = none;
    const std::string tag = FormatShort(rho);
    RunStage("curve white rho=" + tag, timings, [&] {
      cell.white = EpsilonDeltaCurve(result.ensemble,
                                     WhiteNoiseSpec(labels, k, rho),
                                     config.epsilons, mc);
    });
    RunStage("design-noise rho=" + tag, timings, [&] {
      NoiseDesign design = DesignNoise(result.ensemble, AccuracyBudget(rho));
      cell.optimized_spec = std::move(design.spec);
      cell.optimization = std::move(design.optimization);
      cell.warnings = std::move(design.warnings);
    });
    RunStage("curve optimized rho=" + tag, timings, [&] {
      cell.optimized = EpsilonDeltaCurve(result.ensemble, cell.optimized_spec,
                                         config.epsilons, mc);
    });
    result.cells.push_back(std::move(cell));
  }

  if (!out_dir.has_value()) return result;

  RunStage("write outputs", timings, [&] {
    std::filesystem::create_directories(*out_dir);
    auto write = [&](const std::string& name, const std::string& contents) {
      WriteTextFile((std::filesystem::path(*out_dir) / name).string(), contents);
      result.outputs.push_back(name);
    };
    write("ensemble.json", EnsembleToJson(result.ensemble));
    std::vector<PlotPanel> panels;
    for (size_t i = 0; i < result.cells.size(); ++i) {
      const MechanismCurves& cell = result.cells[i];
      const std::string tag = FormatShort(cell.rho);
      write("curves_" + tag + ".csv", CurvesCsv(cell));
      write("noise_spec_" + tag + ".json", NoiseSpecToJson(cell.optimized_spec));
      write("trace_" + tag + ".csv",
            DescentTraceToCsv(cell.optimization.trace));
      if (i == 0) {
        write("noise_spec.json", NoiseSpecToJson(cell.optimized_spec));
        write("trace.csv", DescentTraceToCsv(cell.optimization.trace));
      }
      panels.push_back({"rho = " + tag,
                        "epsilon",
                        "delta",
                        {{"no noise", cell.none.epsilons, cell.none.deltas},
                         {"white noise", cell.white.epsilons, cell.white.deltas},
                         {"optimized", cell.optimized.epsilons,
                          cell.optimized.deltas}}});
    }
    write("curves.svg", RenderSvg(panels));
    if (timeseries.has_value()) {
      std::ostringstream clusters;
      clusters << "path,cluster\n";
      for (size_t i = 0; i < timeseries->paths.size(); ++i) {
        clusters << timeseries->paths[i] << ","
                 << timeseries->clustering.assignment[i] << "\n";
      }
      write("clusters.csv", clusters.str());
    }
  });

  json manifest;
  manifest["version"] = VersionString();
  manifest["seed"] = config.seed;
  manifest["config"] = json::parse(ScenarioConfigToJson(config));
  manifest["mc_samples"] = config.mc_samples;
  json cells = json::array();
  for (const auto& cell : result.cells) {
    cells.push_back({{"rho", cell.rho},
                     {"initial_cost", cell.optimization.initial_cost},
                     {"final_cost", cell.optimization.final_cost},
                     {"iterations", cell.optimization.trace.records.size() - 1},
                     {"termination", cell.optimization.trace.termination},
                     {"warnings", cell.warnings}});
  }
  manifest["cells"] = cells;
  json stages = json::array();
  for (const auto& t : timings) {
    stages.push_back({{"stage", t.stage}, {"seconds", t.seconds}});
  }
  manifest["timings"] = stages;
  const std::chrono::duration<double> total =
      std::chrono::steady_clock::now() - wall_start;
  manifest["total_seconds"] = total.count();
  result.outputs.push_back("manifest.json");
  manifest["outputs"] = result.outputs;
  WriteTextFile((std::filesystem::path(*out_dir) / "manifest.json").string(),
                manifest.dump(2) + "\n");
  return result;
}

}  // namespace classdp
