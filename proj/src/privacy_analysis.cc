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

#include "classdp/privacy_analysis.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "classdp/errors.h"
#include "classdp/io_util.h"

namespace classdp {
namespace {

void RequireSameDim(const ClassGaussian& x, const ClassGaussian& x_prime) {
  if (x.dim() != x_prime.dim() || x.covariance.rows() != x.dim() ||
      x_prime.covariance.rows() != x_prime.dim()) {
    throw std::invalid_argument("class pair " + x.label + ", " +
                                x_prime.label + " has mismatched dimensions");
  }
}

}  // namespace

PairGeometry ComputePairGeometry(const ClassGaussian& x,
                                 const ClassGaussian& x_prime) {
  RequireSameDim(x, x_prime);
  const Matrix sqrt_x = MatrixSqrtSym(x.covariance);
  const Matrix inv_sqrt_x = InverseSqrtSym(x.covariance);
  const Matrix inv_xp = InverseSym(x_prime.covariance);
  Matrix product = sqrt_x * inv_xp * sqrt_x;
  product = 0.5 * (product + product.transpose());

  const SymmetricEigen eig = EigenSym(product);
  const int k = x.dim();
  PairGeometry geom;
  geom.eigvals.resize(k);
  geom.eigvecs.resize(k, k);
  for (int i = 0; i < k; ++i) {
    // Ascending -> descending.
    geom.eigvals[i] = eig.values[k - 1 - i];
    Vector v = eig.vectors.col(k - 1 - i);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0) v = -v;
    geom.eigvecs.col(i) = v;
  }
  if (geom.eigvals.minCoeff() <= 0.0) {
    throw NumericError("pair geometry has a non-positive eigenvalue");
  }
  geom.gamma_max = geom.eigvals[0];
  geom.whitening = geom.eigvecs.transpose() * inv_sqrt_x;
  geom.mean_offset = geom.whitening * (x_prime.mean - x.mean);
  return geom;
}

double PrivacyLoss(const Vector& q, const ClassGaussian& x,
                   const ClassGaussian& x_prime) {
  RequireSameDim(x, x_prime);
  if (q.size() != x.dim()) {
    throw std::invalid_argument("query dimension does not match the classes");
  }
  const Matrix inv_x = InverseSym(x.covariance);
  const Matrix inv_xp = InverseSym(x_prime.covariance);
  const Vector centered = q - x.mean;
  const Vector shift = x_prime.mean - x.mean;
  return 0.5 * LogDetSym(x_prime.covariance) - 0.5 * LogDetSym(x.covariance) +
         0.5 * centered.dot((inv_xp - inv_x) * centered) -
         shift.dot(inv_xp * centered) + 0.5 * shift.dot(inv_xp * shift);
}

double PrivacyLossWhitened(const Vector& xi, const PairGeometry& geom) {
  const auto g = geom.eigvals.array();
  const auto m = geom.mean_offset.array();
  const auto z = xi.array();
  return -0.5 * geom.LogDetGamma() + 0.5 * ((g - 1.0) * z * z).sum() -
         (m * g * z).sum() + 0.5 * (m * g * m).sum();
}

double DeltaExactEqualCov(double mean_offset_norm, double epsilon) {
  if (mean_offset_norm < 0.0) {
    throw std::invalid_argument("mean offset norm must be non-negative");
  }
  if (mean_offset_norm == 0.0) return 0.0 > epsilon ? 1.0 : 0.0;
  const double m = mean_offset_norm;
  return GaussianTailQ((epsilon - 0.5 * m * m) / m);
}

double ChernoffLogBound(const PairGeometry& geom, double epsilon, double s) {
  const double s_min = std::max(1.0, geom.gamma_max);
  if (!(s > s_min)) {
    std::ostringstream msg;
    msg << "Chernoff parameter s=" << s << " must exceed max(1, gamma_max)="
        << s_min;
    throw std::invalid_argument(msg.str());
  }
  const int k = geom.dim();
  const double sm1 = s - 1.0;
  double log_det_shift = 0.0;
  double quad = 0.0;
  for (int i = 0; i < k; ++i) {
    const double g = geom.eigvals[i];
    const double m = geom.mean_offset[i];
    log_det_shift += std::log(s - g);
    quad += g * m * m / (s - g);
  }
  return 0.5 * k * std::log(sm1) - geom.LogDetGamma() / (2.0 * sm1) -
         0.5 * log_det_shift - epsilon / sm1 + s / (2.0 * sm1) * quad;
}

ChernoffBound ChernoffDeltaBound(const PairGeometry& geom, double epsilon,
                                 std::optional<double> s) {
  if (s.has_value()) {
    const double lb = ChernoffLogBound(geom, epsilon, *s);
    return {std::min(1.0, std::exp(lb)), *s};
  }
  const double s_min = std::max(1.0, geom.gamma_max);
  auto eval = [&](double t) {
    return ChernoffLogBound(geom, epsilon, s_min + std::exp(t));
  };
  // Golden-section on t = log(s - s_min).
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(1e-6), hi = std::log(1e3);
  double best_t = lo, best = eval(lo);
  if (const double f_hi = eval(hi); f_hi < best) best = f_hi, best_t = hi;
  double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
  double fc = eval(c), fd = eval(d);
  for (int iter = 0; iter < 200 && hi - lo > 1e-10; ++iter) {
    if (fc < fd) {
      hi = d, d = c, fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = eval(c);
    } else {
      lo = c, c = d, fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = eval(d);
    }
    if (fc < best) best = fc, best_t = c;
    if (fd < best) best = fd, best_t = d;
  }
  return {std::min(1.0, std::exp(best)), s_min + std::exp(best_t)};
}

SensitivityResult GaussianSensitivity(const ClassEnsemble& released) {
  const auto edges = released.graph.OrderedEdges();
  if (edges.empty()) {
    throw std::invalid_argument("Gaussian sensitivity needs at least one edge");
  }
  SensitivityResult result;
  result.value = -std::numeric_limits<double>::infinity();
  for (const auto& pair : edges) {
    const PairGeometry geom = ComputePairGeometry(released.Find(pair.first),
                                                  released.Find(pair.second));
    const auto g = geom.eigvals.array();
    const auto m = geom.mean_offset.array();
    const double value = 0.5 * (m * g * m).sum() - 0.5 * geom.LogDetGamma();
    if (value > result.value) result = {value, pair};
  }
  return result;
}

SensitivityResult GaussianSensitivity(const ClassEnsemble& ensemble,
                                      const NoiseSpec& noise) {
  return GaussianSensitivity(ReleasedEnsemble(ensemble, noise));
}

namespace {

PrivacyCurve CurveOf(const ClassEnsemble& released,
                     std::span<const double> epsilons,
                     const MonteCarloOptions& options) {
  RequireValidEnsemble(released);
  const auto edges = released.graph.OrderedEdges();
  if (edges.empty()) {
    throw std::invalid_argument("privacy curve needs at least one edge");
  }
  PrivacyCurve curve;
  curve.epsilons.assign(epsilons.begin(), epsilons.end());
  curve.mc_samples = options.samples;
  curve.seed = options.seed;
  curve.deltas.assign(epsilons.size(), -1.0);
  curve.std_errors.assign(epsilons.size(), 0.0);
  for (size_t e = 0; e < edges.size(); ++e) {
    MonteCarloOptions edge_options = options;
    edge_options.seed = DeriveSeed(options.seed, e);
    const DeltaEstimate est =
        DeltaMonteCarlo(released.Find(edges[e].first),
                        released.Find(edges[e].second), epsilons, edge_options);
    for (size_t i = 0; i < epsilons.size(); ++i) {
      if (est.deltas[i] > curve.deltas[i]) {
        curve.deltas[i] = est.deltas[i];
        curve.std_errors[i] = est.std_errors[i];
      }
    }
    curve.per_edge.push_back({edges[e], est.deltas, est.std_errors});
  }
  return curve;
}

}  // namespace

PrivacyCurve EpsilonDeltaCurve(const ClassEnsemble& ensemble,
                               std::span<const double> epsilons,
                               const MonteCarloOptions& options) {
  return CurveOf(ensemble, epsilons, options);
}

PrivacyCurve EpsilonDeltaCurve(const ClassEnsemble& ensemble,
                               const NoiseSpec& noise,
                               std::span<const double> epsilons,
                               const MonteCarloOptions& options) {
  return CurveOf(ReleasedEnsemble(ensemble, noise), epsilons, options);
}

std::string PrivacyCurveToCsv(const PrivacyCurve& curve) {
  std::ostringstream out;
  out << "epsilon,delta,std_err";
  for (const auto& edge : curve.per_edge) {
    out << ",delta_" << edge.pair.first << "_" << edge.pair.second;
  }
  out << "\n";
  for (size_t i = 0; i < curve.epsilons.size(); ++i) {
    out << FormatDouble(curve.epsilons[i]) << ","
        << FormatDouble(curve.deltas[i]) << ","
        << FormatDouble(curve.std_errors[i]);
    for (const auto& edge : curve.per_edge) {
      out << "," << FormatDouble(edge.deltas[i]);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace classdp
