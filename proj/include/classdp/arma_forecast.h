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

#ifndef CLASSDP_ARMA_FORECAST_H_
#define CLASSDP_ARMA_FORECAST_H_

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "classdp/linalg.h"

namespace classdp {

// x[k] = -sum_{i=1..m} a_i x[k-i] + sum_{j=0..n} b_j xi[k-j], with xi unit
// variance white noise. `ar` holds a_1..a_m, `ma` holds b_0..b_n.
struct ArmaModel {
  Vector ar;
  Vector ma = Vector::Ones(1);

  int ar_order() const { return static_cast<int>(ar.size()); }
  int ma_order() const { return static_cast<int>(ma.size()) - 1; }
};

// Roots of z^m + a_1 z^{m-1} + ... + a_m, from the companion matrix.
std::vector<std::complex<double>> ArRoots(const Vector& ar);

// All AR roots strictly inside the unit disc and every coefficient finite.
bool IsStationary(const ArmaModel& model);

// h[k] = b_k 1{k <= n} - sum_{i=1..min(k,m)} a_i h[k-i]. Throws NumericError
// for a non-stationary model and std::invalid_argument for length < 1.
Vector ImpulseResponse(const ArmaModel& model, int length);

inline constexpr double kImpulseDecay = 1e-10;
inline constexpr int kImpulseCap = 4096;

// r[tau] = sum_i h[i] h[i+tau] for tau = 0..max_lag. The impulse response is
// truncated once |h| stays below 1e-10 max|h|; NumericError if that has not
// happened within 4096 taps.
Vector Autocovariance(const ArmaModel& model, int max_lag);

// Symmetric Toeplitz matrix with first column r[0..size-1].
Matrix ToeplitzCovariance(const Vector& r, int size);

struct ForecastDistribution {
  Vector mean;        // length T
  Matrix covariance;  // T x T
  int history = 0;    // K
  int horizon = 0;    // T
};

// Gaussian conditioning of the last T coordinates on the first K = |observed|:
//   mean = mu^f + S^fo (S^o)^{-1} (x^o - mu^o)
//   cov  = S^f  - S^fo (S^o)^{-1} S^of
// NumericError when S^o is singular.
ForecastDistribution ConditionalForecast(const Matrix& joint_cov,
                                         const Vector& joint_mean,
                                         const Vector& observed);

// Zero-mean ARMA forecast of `horizon` steps from the last K values of
// `history`.
ForecastDistribution ForecastArma(const ArmaModel& model,
                                  std::span<const double> history,
                                  int horizon);

// Hannan-Rissanen estimate. Long AR of order max(20, 2(m+n)) by least
// squares gives innovation proxies, then x[t] is regressed on m lags of x and
// n lags of the proxies. The innovation scale is folded into b so that xi has
// unit variance, and AR roots outside the unit disc are reflected inside.
// m = n = 0 yields b_0 = sample standard deviation.
ArmaModel FitArma(std::span<const double> x, int m, int n);

std::vector<double> SimulateArma(const ArmaModel& model, int length,
                                 std::uint64_t seed, int burn_in = 500);

// x[k] = log p[k] - mu[k mod P], mu the per-phase mean of log p.
struct SeasonalLogSeries {
  std::vector<double> residuals;
  std::vector<double> seasonal_means;  // indexed by phase, size P
  int original_length = 0;
  int period = 1;

  // mu for absolute indices start .. start+count-1.
  std::vector<double> MeansFor(int start, int count) const;
};

SeasonalLogSeries ToLogResidual(std::span<const double> p, int period);

// p[k] = exp(xhat[k] + mu[k]).
std::vector<double> FromLogResidual(std::span<const double> xhat,
                                    std::span<const double> mu);

nlohmann::json ArmaModelToJson(const ArmaModel& model);
ArmaModel ArmaModelFromJson(const nlohmann::json& j);

}  // namespace classdp

#endif  // CLASSDP_ARMA_FORECAST_H_
