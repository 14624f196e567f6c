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

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "classdp/privacy_analysis.h"

namespace classdp {
namespace {

void CheckInputs(std::span<const double> epsilons,
                 const MonteCarloOptions& options) {
  if (options.samples < 1000) {
    throw std::invalid_argument("Monte Carlo needs at least 1000 samples");
  }
  if (options.partitions < 1) {
    throw std::invalid_argument("partition count must be positive");
  }
  if (!std::is_sorted(epsilons.begin(), epsilons.end())) {
    throw std::invalid_argument("epsilon grid must be ascending");
  }
}

std::int64_t PartitionSize(const MonteCarloOptions& options, int p) {
  const std::int64_t base = options.samples / options.partitions;
  return base + (p < options.samples % options.partitions ? 1 : 0);
}

// Histogram of sampled losses over the epsilon grid: bin j counts samples
// whose loss L satisfies eps[j-1] < L <= eps[j] (bin 0: L <= eps[0], last
// bin: L > eps.back()). Integer counts make the merge order-independent.
std::vector<std::int64_t> LossHistogram(const PairGeometry& geom,
                                        std::span<const double> epsilons,
                                        std::int64_t count,
                                        std::uint64_t seed) {
  const int k = geom.dim();
  std::vector<double> quad(k), lin(k);
  double constant = -0.5 * geom.LogDetGamma();
  for (int i = 0; i < k; ++i) {
    const double g = geom.eigvals[i];
    const double m = geom.mean_offset[i];
    quad[i] = 0.5 * (g - 1.0);
    lin[i] = -g * m;
    constant += 0.5 * g * m * m;
  }
  std::vector<std::int64_t> hist(epsilons.size() + 1, 0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::int64_t s = 0; s < count; ++s) {
    double loss = constant;
    for (int i = 0; i < k; ++i) {
      const double z = normal(rng);
      loss += (quad[i] * z + lin[i]) * z;
    }
    const auto bin =
        std::lower_bound(epsilons.begin(), epsilons.end(), loss) -
        epsilons.begin();
    ++hist[bin];
  }
  return hist;
}

DeltaEstimate Summarize(const std::vector<std::int64_t>& hist,
                        std::span<const double> epsilons,
                        const MonteCarloOptions& options) {
  DeltaEstimate est;
  est.epsilons.assign(epsilons.begin(), epsilons.end());
  est.samples = options.samples;
  est.seed = options.seed;
  const double n = static_cast<double>(options.samples);
  std::int64_t above = 0;
  est.deltas.assign(epsilons.size(), 0.0);
  est.std_errors.assign(epsilons.size(), 0.0);
  for (size_t j = epsilons.size(); j-- > 0;) {
    above += hist[j + 1];
    const double d = static_cast<double>(above) / n;
    est.deltas[j] = d;
    est.std_errors[j] = std::sqrt(d * (1.0 - d) / n);
  }
  return est;
}

}  // namespace

DeltaEstimate DeltaMonteCarlo(const PairGeometry& geom,
                              std::span<const double> epsilons,
                              const MonteCarloOptions& options) {
  CheckInputs(epsilons, options);
  const int parts = options.partitions;
  std::vector<std::vector<std::int64_t>> partial(parts);
#pragma omp parallel for schedule(dynamic, 1)
  for (int p = 0; p < parts; ++p) {
    partial[p] = LossHistogram(geom, epsilons, PartitionSize(options, p),
                               DeriveSeed(options.seed, p));
  }
  std::vector<std::int64_t> hist(epsilons.size() + 1, 0);
  for (const auto& h : partial) {
    for (size_t j = 0; j < h.size(); ++j) hist[j] += h[j];
  }
  return Summarize(hist, epsilons, options);
}

DeltaEstimate DeltaMonteCarloSerial(const PairGeometry& geom,
                                    std::span<const double> epsilons,
                                    const MonteCarloOptions& options) {
  CheckInputs(epsilons, options);
  std::vector<std::int64_t> hist(epsilons.size() + 1, 0);
  for (int p = 0; p < options.partitions; ++p) {
    const auto h = LossHistogram(geom, epsilons, PartitionSize(options, p),
                                 DeriveSeed(options.seed, p));
    for (size_t j = 0; j < h.size(); ++j) hist[j] += h[j];
  }
  return Summarize(hist, epsilons, options);
}

DeltaEstimate DeltaMonteCarlo(const ClassGaussian& x,
                              const ClassGaussian& x_prime,
                              std::span<const double> epsilons,
                              const MonteCarloOptions& options) {
  return DeltaMonteCarlo(ComputePairGeometry(x, x_prime), epsilons, options);
}

}  // namespace classdp
