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

#include "classdp/arma_forecast.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <nlohmann/json.hpp>

#include "classdp/errors.h"
#include "classdp/io_util.h"

namespace classdp {
namespace {

void RequireStationary(const ArmaModel& model) {
  if (model.ma.size() < 1) {
    throw std::invalid_argument("ARMA model needs b_0");
  }
  if (!IsStationary(model)) {
    throw NumericError("ARMA model is not stationary");
  }
}

// Least squares with a rank check.
Vector SolveRegression(const Matrix& design, const Vector& target) {
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  if (qr.rank() < design.cols()) {
    throw NumericError("rank-deficient regression in ARMA fit");
  }
  return qr.solve(target);
}

// Regress x[t] on x[t-1..t-p] for t in [start, N). Returns phi.
Vector FitAr(std::span<const double> x, int p, int start) {
  const int rows = static_cast<int>(x.size()) - start;
  Matrix design(rows, p);
  Vector target(rows);
  for (int r = 0; r < rows; ++r) {
    const int t = start + r;
    target[r] = x[t];
    for (int i = 0; i < p; ++i) design(r, i) = x[t - 1 - i];
  }
  return SolveRegression(design, target);
}

// Monic polynomial coefficients (z^m + c_1 z^{m-1} + ... + c_m) from roots.
Vector PolyFromRoots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> c{1.0};
  for (const auto& z : roots) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (size_t i = 0; i < c.size(); ++i) {
      next[i] += c[i];
      next[i + 1] -= z * c[i];
    }
    c = std::move(next);
  }
  Vector out(static_cast<int>(roots.size()));
  for (size_t i = 1; i < c.size(); ++i) out[i - 1] = c[i].real();
  return out;
}

Vector ReflectUnstableRoots(const Vector& ar) {
  if (ar.size() == 0) return ar;
  auto roots = ArRoots(ar);
  bool changed = false;
  for (auto& z : roots) {
    if (std::abs(z) >= 1.0) {
      z = 1.0 / std::conj(z);
      changed = true;
    }
    if (std::abs(z) > 0.9999) z *= 0.9999 / std::abs(z);
  }
  return changed ? PolyFromRoots(roots) : ar;
}

}  // namespace

std::vector<std::complex<double>> ArRoots(const Vector& ar) {
  const int m = static_cast<int>(ar.size());
  if (m == 0) return {};
  Matrix companion = Matrix::Zero(m, m);
  companion.row(0) = -ar.transpose();
  for (int i = 1; i < m; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Matrix> solver(companion, false);
  std::vector<std::complex<double>> roots;
  for (int i = 0; i < m; ++i) roots.push_back(solver.eigenvalues()[i]);
  return roots;
}

bool IsStationary(const ArmaModel& model) {
  if (!model.ar.allFinite() || !model.ma.allFinite()) return false;
  for (const auto& z : ArRoots(model.ar)) {
    if (!(std::abs(z) < 1.0)) return false;
  }
  return true;
}

Vector ImpulseResponse(const ArmaModel& model, int length) {
  if (length < 1) throw std::invalid_argument("impulse length must be >= 1");
  RequireStationary(model);
  const int m = model.ar_order();
  const int n = model.ma_order();
  Vector h = Vector::Zero(length);
  for (int k = 0; k < length; ++k) {
    double v = k <= n ? model.ma[k] : 0.0;
    for (int i = 1; i <= std::min(k, m); ++i) v -= model.ar[i - 1] * h[k - i];
    h[k] = v;
  }
  return h;
}

Vector Autocovariance(const ArmaModel& model, int max_lag) {
  if (max_lag < 0) throw std::invalid_argument("max lag must be >= 0");
  RequireStationary(model);
  const Vector full = ImpulseResponse(model, kImpulseCap);
  const int m = model.ar_order();
  const int n = model.ma_order();
  const int run_needed = std::max(m, 1);
  double peak = 0.0;
  int run = 0;
  int length = -1;
  for (int k = 0; k < kImpulseCap; ++k) {
    peak = std::max(peak, std::abs(full[k]));
    if (k > n && std::abs(full[k]) < kImpulseDecay * peak) {
      if (++run >= run_needed) {
        length = k + 1;
        break;
      }
    } else {
      run = 0;
    }
  }
  if (length < 0) {
    throw NumericError("impulse response did not decay within 4096 taps");
  }
  const Vector h = full.head(length);
  Vector r = Vector::Zero(max_lag + 1);
  for (int tau = 0; tau <= max_lag && tau < length; ++tau) {
    r[tau] = h.head(length - tau).dot(h.tail(length - tau));
  }
  if (!(r[0] > 0.0)) throw NumericError("ARMA model has zero variance");
  return r;
}

Matrix ToeplitzCovariance(const Vector& r, int size) {
  if (size < 1 || r.size() < size) {
    throw std::invalid_argument("Toeplitz size exceeds autocovariance length");
  }
  Matrix t(size, size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) t(i, j) = r[std::abs(i - j)];
  }
  return t;
}

ForecastDistribution ConditionalForecast(const Matrix& joint_cov,
                                         const Vector& joint_mean,
                                         const Vector& observed) {
  const int total = static_cast<int>(joint_cov.rows());
  const int k = static_cast<int>(observed.size());
  const int t = total - k;
  if (joint_cov.cols() != total || joint_mean.size() != total) {
    throw std::invalid_argument("joint covariance and mean sizes differ");
  }
  if (k < 1 || t < 1) {
    throw std::invalid_argument("history and horizon must both be >= 1");
  }
  const Matrix s_o = joint_cov.topLeftCorner(k, k);
  const Matrix s_fo = joint_cov.bottomLeftCorner(t, k);
  const Matrix s_f = joint_cov.bottomRightCorner(t, t);
  Eigen::LLT<Matrix> llt(s_o);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-14)) {
    throw NumericError("observed-block covariance is singular");
  }
  ForecastDistribution out;
  out.history = k;
  out.horizon = t;
  out.mean = joint_mean.tail(t) + s_fo * llt.solve(observed - joint_mean.head(k));
  Matrix cov = s_f - s_fo * llt.solve(s_fo.transpose());
  out.covariance = 0.5 * (cov + cov.transpose());
  return out;
}

ForecastDistribution ForecastArma(const ArmaModel& model,
                                  std::span<const double> history,
                                  int horizon) {
  const int k = static_cast<int>(history.size());
  if (k < 1 || horizon < 1) {
    throw std::invalid_argument("history and horizon must both be >= 1");
  }
  const Vector r = Autocovariance(model, k + horizon - 1);
  const Matrix joint = ToeplitzCovariance(r, k + horizon);
  const Vector observed = Eigen::Map<const Vector>(history.data(), k);
  return ConditionalForecast(joint, Vector::Zero(k + horizon), observed);
}

ArmaModel FitArma(std::span<const double> x, int m, int n) {
  if (m < 0 || n < 0) throw std::invalid_argument("ARMA orders must be >= 0");
  const int len = static_cast<int>(x.size());
  if (len < 10 * (m + n + 1)) {
    throw std::invalid_argument("insufficient data for ARMA fit");
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample");
  }
  ArmaModel model;
  if (m == 0 && n == 0) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / len;
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    model.ma = Vector::Constant(1, std::sqrt(ss / (len - 1)));
    return model;
  }

  std::vector<double> innov;
  int start = m;
  if (n > 0) {
    // Long AR order, reduced on short series so each stage keeps enough rows.
    const int p = std::max(m + n, std::min(std::max(20, 2 * (m + n)),
                                           (len - n) / 3));
    const Vector phi_long = FitAr(x, p, p);
    innov.assign(len, 0.0);
    for (int t = p; t < len; ++t) {
      double pred = 0.0;
      for (int i = 0; i < p; ++i) pred += phi_long[i] * x[t - 1 - i];
      innov[t] = x[t] - pred;
    }
    start = std::max(m, p + n);
  }

  const int rows = len - start;
  const int cols = m + n;
  Matrix design(rows, cols);
  Vector target(rows);
  for (int r = 0; r < rows; ++r) {
    const int t = start + r;
    target[r] = x[t];
    for (int i = 0; i < m; ++i) design(r, i) = x[t - 1 - i];
    for (int j = 0; j < n; ++j) design(r, m + j) = innov[t - 1 - j];
  }
  const Vector coef = SolveRegression(design, target);
  const Vector resid = target - design * coef;
  const double sigma = std::sqrt(resid.squaredNorm() / (rows - cols));
  const double scale = std::sqrt(target.squaredNorm() / rows);
  if (!(sigma > 1e-12 * scale) || !std::isfinite(sigma)) {
    throw NumericError("degenerate innovation variance in ARMA fit");
  }

  model.ar = ReflectUnstableRoots(-coef.head(m));
  model.ma.resize(n + 1);
  model.ma[0] = sigma;
  for (int j = 0; j < n; ++j) model.ma[j + 1] = coef[m + j] * sigma;
  return model;
}

std::vector<double> SimulateArma(const ArmaModel& model, int length,
                                 std::uint64_t seed, int burn_in) {
  if (length < 0 || burn_in < 0) {
    throw std::invalid_argument("simulation lengths must be >= 0");
  }
  RequireStationary(model);
  const int m = model.ar_order();
  const int n = model.ma_order();
  const int total = length + burn_in;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> xi(total), x(total, 0.0);
  for (auto& v : xi) v = normal(rng);
  for (int k = 0; k < total; ++k) {
    double v = 0.0;
    for (int i = 1; i <= m && i <= k; ++i) v -= model.ar[i - 1] * x[k - i];
    for (int j = 0; j <= n && j <= k; ++j) v += model.ma[j] * xi[k - j];
    x[k] = v;
  }
  return {x.begin() + burn_in, x.end()};
}

std::vector<double> SeasonalLogSeries::MeansFor(int start, int count) const {
  if (start < 0 || count < 0) throw std::invalid_argument("negative index");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = seasonal_means[(start + i) % period];
  return out;
}

SeasonalLogSeries ToLogResidual(std::span<const double> p, int period) {
  if (period < 1) throw std::invalid_argument("period must be >= 1");
  const int len = static_cast<int>(p.size());
  if (len < period) throw std::invalid_argument("series shorter than period");
  SeasonalLogSeries out;
  out.period = period;
  out.original_length = len;
  std::vector<double> logs(len);
  std::vector<double> sums(period, 0.0);
  std::vector<int> counts(period, 0);
  for (int k = 0; k < len; ++k) {
    if (!(p[k] > 0.0) || !std::isfinite(p[k])) {
      throw std::invalid_argument("series must be finite and positive");
    }
    logs[k] = std::log(p[k]);
    sums[k % period] += logs[k];
    ++counts[k % period];
  }
  out.seasonal_means.resize(period);
  for (int ph = 0; ph < period; ++ph) out.seasonal_means[ph] = sums[ph] / counts[ph];
  out.residuals.resize(len);
  for (int k = 0; k < len; ++k) {
    out.residuals[k] = logs[k] - out.seasonal_means[k % period];
  }
  return out;
}

std::vector<double> FromLogResidual(std::span<const double> xhat,
                                    std::span<const double> mu) {
  if (xhat.size() != mu.size()) {
    throw std::invalid_argument("forecast and seasonal means differ in length");
  }
  std::vector<double> out(xhat.size());
  for (size_t k = 0; k < xhat.size(); ++k) out[k] = std::exp(xhat[k] + mu[k]);
  return out;
}

nlohmann::json ArmaModelToJson(const ArmaModel& model) {
  return {{"ar", VectorToJson(model.ar)}, {"ma", VectorToJson(model.ma)}};
}

ArmaModel ArmaModelFromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("ma")) {
    throw ConfigError("ARMA model JSON needs an \"ma\" array");
  }
  ArmaModel model;
  model.ar = j.contains("ar") ? VectorFromJson(j.at("ar")) : Vector();
  model.ma = VectorFromJson(j.at("ma"));
  if (model.ma.size() < 1) throw ConfigError("ARMA model needs b_0");
  return model;
}

}  // namespace classdp
