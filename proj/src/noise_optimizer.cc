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

#include "classdp/noise_optimizer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "classdp/io_util.h"

namespace classdp {
namespace {

// J with the per-class log-determinants computed once.
CostResult EvaluateCost(const OptimizerState& state,
                        const std::vector<OrderedPair>& edges) {
  std::vector<double> log_det(state.inv_cov.size());
  for (size_t i = 0; i < state.inv_cov.size(); ++i) {
    log_det[i] = LogDetSym(state.inv_cov[i]);
  }
  CostResult best;
  best.value = -std::numeric_limits<double>::infinity();
  for (const auto& pair : edges) {
    const int x = state.IndexOf(pair.first);
    const int xp = state.IndexOf(pair.second);
    const Vector v = state.means[xp] - state.means[x];
    const double g =
        v.dot(state.inv_cov[xp] * v) - log_det[xp] + log_det[x];
    if (g > best.value) best = {g, pair};
  }
  return best;
}

}  // namespace

int OptimizerState::IndexOf(const Label& label) const {
  const auto it = std::lower_bound(labels.begin(), labels.end(), label);
  if (it == labels.end() || *it != label) {
    throw std::invalid_argument("optimizer state has no label " + label);
  }
  return static_cast<int>(it - labels.begin());
}

OptimizerState WhiteInitState(const ClassEnsemble& ensemble,
                              const AccuracyBudget& budget) {
  const int k = ensemble.dim();
  OptimizerState state;
  std::vector<const ClassGaussian*> sorted;
  for (const auto& c : ensemble.classes) sorted.push_back(&c);
  std::sort(sorted.begin(), sorted.end(),
            [](const ClassGaussian* a, const ClassGaussian* b) {
              return a->label < b->label;
            });
  for (const ClassGaussian* c : sorted) {
    state.labels.push_back(c->label);
    state.inv_cov.push_back(InverseSym(
        c->covariance + (budget.rho() / k) * Matrix::Identity(k, k)));
    state.means.push_back(c->mean);
  }
  return state;
}

double SurrogateCostG(const Matrix& a_x, const Matrix& a_x_prime,
                      const Vector& mu_x, const Vector& mu_x_prime) {
  const Vector v = mu_x_prime - mu_x;
  return v.dot(a_x_prime * v) - LogDetSym(a_x_prime) + LogDetSym(a_x);
}

CostResult CostJ(const OptimizerState& state, const NeighborhoodGraph& graph) {
  const auto edges = graph.OrderedEdges();
  if (edges.empty()) {
    throw std::invalid_argument("cost J needs at least one edge");
  }
  return EvaluateCost(state, edges);
}

StepBound StepSizeBound(const OptimizerState& state,
                        const NeighborhoodGraph& graph,
                        const OrderedPair& pair) {
  StepBound out;
  out.updated = pair.second;
  const int u = state.IndexOf(pair.second);
  const Matrix& a_u = state.inv_cov[u];
  const Matrix a_u_inv = InverseSym(a_u);
  const double trace_inv_sq = a_u_inv.squaredNorm();
  const double ld_u = LogDetSym(a_u);

  double lowest = std::numeric_limits<double>::infinity();
  for (const Label& neighbor : graph.Neighbors(pair.second)) {
    const int x = state.IndexOf(neighbor);
    const Matrix& a_x = state.inv_cov[x];
    const double ld_x = LogDetSym(a_x);
    const Vector v = state.means[u] - state.means[x];
    const double v_au_v = v.dot(a_u * v);
    const double v_ax_v = v.dot(a_x * v);
    const double v_auinv_v = v.dot(a_u_inv * v);
    const double vv = v.squaredNorm();

    StepBoundTerm term;
    term.neighbor = neighbor;
    term.b = (v_au_v - v_ax_v + ld_u + ld_x - 2.0 * ld_u) /
             (trace_inv_sq - v_auinv_v);
    term.d = (v_au_v + ld_u - ld_x) / (v_auinv_v - trace_inv_sq - vv * vv);
    out.terms.push_back(term);
    if (std::isnan(term.b) || std::isnan(term.d)) {
      lowest = 0.0;
      continue;
    }
    lowest = std::min({lowest, term.b, term.d});
  }
  out.alpha = std::isfinite(lowest) ? std::max(0.0, lowest) : 0.0;
  return out;
}

OptimizationResult OptimizeInverseCovariances(const ClassEnsemble& ensemble,
                                              const AccuracyBudget& budget,
                                              const OptimizerOptions& options) {
  RequireValidEnsemble(ensemble);
  const auto edges = ensemble.graph.OrderedEdges();
  if (edges.empty()) {
    throw std::invalid_argument("noise design needs at least one edge");
  }

  OptimizationResult result;
  result.state = WhiteInitState(ensemble, budget);
  CostResult cost = EvaluateCost(result.state, edges);
  result.initial_cost = cost.value;
  std::vector<double> accepted_costs{cost.value};
  DescentTrace& trace = result.trace;

  auto try_step = [&](int u, const Matrix& grad, double alpha,
                      OptimizerState& candidate, CostResult& candidate_cost) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) return false;
    const Matrix stepped = PsdProject(result.state.inv_cov[u] - alpha * grad);
    if (!IsPositiveDefinite(stepped)) return false;
    candidate = result.state;
    candidate.inv_cov[u] = stepped;
    candidate_cost = EvaluateCost(candidate, edges);
    return std::isfinite(candidate_cost.value) &&
           candidate_cost.value < cost.value;
  };

  int t = 0;
  for (;; ++t) {
    if (!std::isfinite(cost.value)) {
      throw NumericError("surrogate cost became non-finite at iteration " +
                         std::to_string(t));
    }
    if (t >= options.max_iterations) {
      trace.termination = "iteration limit";
      break;
    }
    const int x = result.state.IndexOf(cost.pair.first);
    const int u = result.state.IndexOf(cost.pair.second);
    const Vector v = result.state.means[u] - result.state.means[x];
    const Matrix grad =
        v * v.transpose() - InverseSym(result.state.inv_cov[u]);

    DescentRecord record{t, cost.pair, cost.value, 0.0, false};
    OptimizerState candidate;
    CostResult candidate_cost;
    bool accepted = false;
    const StepBound bound = StepSizeBound(result.state, ensemble.graph,
                                          cost.pair);
    if (bound.alpha > options.alpha_floor &&
        try_step(u, grad, bound.alpha, candidate, candidate_cost)) {
      accepted = true;
      record.alpha = bound.alpha;
    }
    double alpha = options.backtrack_initial;
    for (int h = 0; !accepted && h <= options.max_halvings; ++h, alpha *= 0.5) {
      if (try_step(u, grad, alpha, candidate, candidate_cost)) {
        accepted = true;
        record.alpha = alpha;
        record.backtracked = true;
      }
    }
    trace.records.push_back(record);
    if (!accepted || record.alpha <= options.alpha_floor) {
      trace.termination = "no descent step";
      break;
    }
    result.state = std::move(candidate);
    cost = candidate_cost;
    accepted_costs.push_back(cost.value);
    const size_t w = static_cast<size_t>(options.stall_window);
    if (accepted_costs.size() > w) {
      const double before = accepted_costs[accepted_costs.size() - 1 - w];
      const double gain = (before - cost.value) /
                          std::max(std::abs(before), 1e-300);
      if (gain < options.relative_tolerance) {
        ++t;
        trace.termination = "relative improvement below tolerance";
        break;
      }
    }
  }
  trace.records.push_back({t, cost.pair, cost.value, 0.0, false});
  result.final_cost = cost.value;
  return result;
}

Matrix ExtractNoiseCovariance(const Matrix& a_star, const Matrix& sigma_x,
                              double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  if (a_star.rows() != sigma_x.rows() || a_star.cols() != sigma_x.cols()) {
    throw std::invalid_argument("A* and Sigma_X dimensions differ");
  }
  const Matrix projected = PsdProject(InverseSym(a_star) - sigma_x);
  const double trace = projected.trace();
  if (!(trace > 1e-14 * std::max(1.0, sigma_x.trace()))) {
    throw ZeroTraceError("no PSD direction in A*^{-1} - Sigma_X");
  }
  Matrix noise = (rho / trace) * projected;
  return 0.5 * (noise + noise.transpose());
}

NoiseSpec WhiteNoiseSpec(const std::vector<Label>& labels, int k, double rho) {
  if (k < 1) throw std::invalid_argument("dimension must be at least 1");
  NoiseSpec spec;
  spec.budget = AccuracyBudget(rho);
  for (const auto& l : labels) {
    spec.classes.push_back(
        {l, Vector::Zero(k), (rho / k) * Matrix::Identity(k, k)});
  }
  return spec;
}

NoiseDesign DesignNoise(const ClassEnsemble& ensemble,
                        const AccuracyBudget& budget,
                        const OptimizerOptions& options, bool white_fallback) {
  NoiseDesign design;
  design.optimization = OptimizeInverseCovariances(ensemble, budget, options);
  design.spec.budget = budget;
  const int k = ensemble.dim();
  const OptimizerState& state = design.optimization.state;
  for (size_t i = 0; i < state.labels.size(); ++i) {
    const ClassGaussian& c = ensemble.Find(state.labels[i]);
    ClassNoise noise{c.label, Vector::Zero(k), Matrix()};
    try {
      noise.covariance =
          ExtractNoiseCovariance(state.inv_cov[i], c.covariance, budget.rho());
    } catch (const ZeroTraceError&) {
      if (!white_fallback) throw;
      noise.covariance = (budget.rho() / k) * Matrix::Identity(k, k);
      design.warnings.push_back("class " + c.label +
                                ": zero-trace extraction, using white noise");
    }
    design.spec.classes.push_back(std::move(noise));
  }
  return design;
}

Vector PrivatizeQuery(const Vector& q, const Label& label,
                      const NoiseSpec& noise, std::uint64_t seed) {
  const ClassNoise& n = noise.Find(label);
  if (n.covariance.rows() != q.size()) {
    throw std::invalid_argument("query and noise dimensions differ");
  }
  std::mt19937_64 rng(seed);
  const Vector mean = n.mean.size() == q.size() ? n.mean : Vector::Zero(q.size());
  return q + SampleGaussian(mean, PsdFactor(n.covariance), rng);
}

std::string DescentTraceToCsv(const DescentTrace& trace) {
  std::ostringstream out;
  out << "t,pair,J,alpha\n";
  for (const auto& r : trace.records) {
    out << r.t << "," << r.pair.first << "->" << r.pair.second << ","
        << FormatDouble(r.cost) << "," << FormatDouble(r.alpha) << "\n";
  }
  return out.str();
}

}  // namespace classdp
