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

#include "classdp/gaussian_ensemble.h"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "classdp/errors.h"
#include "classdp/io_util.h"
#include "json.hpp"

namespace classdp {

void NeighborhoodGraph::AddEdge(const Label& a, const Label& b) {
  edges_.insert(a < b ? std::make_pair(a, b) : std::make_pair(b, a));
}

bool NeighborhoodGraph::HasEdge(const Label& a, const Label& b) const {
  return edges_.count(a < b ? std::make_pair(a, b) : std::make_pair(b, a)) > 0;
}

std::vector<OrderedPair> NeighborhoodGraph::OrderedEdges() const {
  std::vector<OrderedPair> out;
  out.reserve(2 * edges_.size());
  for (const auto& [a, b] : edges_) {
    if (a == b) continue;
    out.emplace_back(a, b);
    out.emplace_back(b, a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Label> NeighborhoodGraph::Neighbors(const Label& label) const {
  std::vector<Label> out;
  for (const auto& [a, b] : edges_) {
    if (a == b) continue;
    if (a == label) out.push_back(b);
    if (b == label) out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

NeighborhoodGraph NeighborhoodGraph::Complete(
    const std::vector<Label>& labels) {
  NeighborhoodGraph graph;
  for (const auto& l : labels) graph.AddLabel(l);
  for (size_t i = 0; i < labels.size(); ++i) {
    for (size_t j = i + 1; j < labels.size(); ++j) {
      graph.AddEdge(labels[i], labels[j]);
    }
  }
  return graph;
}

const ClassGaussian& ClassEnsemble::Find(const Label& label) const {
  const int i = IndexOf(label);
  if (i < 0) throw std::invalid_argument("unknown class label: " + label);
  return classes[i];
}

int ClassEnsemble::IndexOf(const Label& label) const {
  for (size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

std::vector<Label> ClassEnsemble::Labels() const {
  std::vector<Label> out;
  for (const auto& c : classes) out.push_back(c.label);
  return out;
}

ClassEnsemble MakeEnsemble(std::vector<ClassGaussian> classes,
                           const std::vector<std::pair<Label, Label>>& edges) {
  ClassEnsemble ensemble;
  std::sort(classes.begin(), classes.end(),
            [](const ClassGaussian& a, const ClassGaussian& b) {
              return a.label < b.label;
            });
  for (const auto& c : classes) ensemble.graph.AddLabel(c.label);
  for (const auto& [a, b] : edges) ensemble.graph.AddEdge(a, b);
  ensemble.classes = std::move(classes);
  return ensemble;
}

bool ValidationReport::Has(ViolationKind kind) const {
  return std::any_of(violations.begin(), violations.end(),
                     [kind](const Violation& v) { return v.kind == kind; });
}

std::string ValidationReport::Summary() const {
  std::ostringstream out;
  for (size_t i = 0; i < violations.size(); ++i) {
    if (i) out << "; ";
    out << violations[i].message;
  }
  return out.str();
}

ValidationReport ValidateEnsemble(const ClassEnsemble& ensemble) {
  ValidationReport report;
  auto add = [&report](ViolationKind kind, std::string msg) {
    report.violations.push_back({kind, std::move(msg)});
  };
  if (ensemble.classes.empty()) {
    add(ViolationKind::kEmpty, "ensemble has no classes");
    return report;
  }
  const int k = ensemble.classes.front().dim();
  if (k < 1) add(ViolationKind::kDimensionMismatch, "dimension must be >= 1");

  std::set<Label> seen;
  for (const auto& c : ensemble.classes) {
    if (!seen.insert(c.label).second) {
      add(ViolationKind::kDuplicateLabel, "duplicate label " + c.label);
    }
    if (c.dim() != k || c.covariance.rows() != k || c.covariance.cols() != k) {
      add(ViolationKind::kDimensionMismatch,
          "class " + c.label + " has inconsistent dimensions");
      continue;
    }
    if (!c.mean.allFinite() || !c.covariance.allFinite()) {
      add(ViolationKind::kNonFinite, "class " + c.label + " has non-finite values");
      continue;
    }
    if (!IsSymmetric(c.covariance)) {
      add(ViolationKind::kAsymmetricCovariance,
          "covariance of " + c.label + " is not symmetric");
      continue;
    }
    if (!IsPositiveDefinite(c.covariance)) {
      add(ViolationKind::kNotPositiveDefinite,
          "covariance of " + c.label + " is not positive definite");
    }
  }
  for (const auto& l : ensemble.graph.labels()) {
    if (!seen.count(l)) {
      add(ViolationKind::kMissingClass, "graph label " + l + " has no class");
    }
  }
  for (const auto& l : seen) {
    if (!ensemble.graph.labels().count(l)) {
      add(ViolationKind::kMissingClass, "class " + l + " is not in the graph");
    }
  }
  for (const auto& [a, b] : ensemble.graph.edges()) {
    if (a == b) {
      add(ViolationKind::kSelfLoop, "self-loop on " + a);
      continue;
    }
    if (!seen.count(a) || !seen.count(b)) {
      add(ViolationKind::kDanglingEdge,
          "edge (" + a + ", " + b + ") references an unknown label");
    }
  }
  return report;
}

void RequireValidEnsemble(const ClassEnsemble& ensemble) {
  const ValidationReport report = ValidateEnsemble(ensemble);
  if (!report.ok()) throw ConfigError("invalid ensemble: " + report.Summary());
}

std::string EnsembleToJson(const ClassEnsemble& ensemble) {
  nlohmann::json doc;
  doc["classes"] = nlohmann::json::array();
  for (const auto& c : ensemble.classes) {
    doc["classes"].push_back({{"label", c.label},
                              {"mean", VectorToJson(c.mean)},
                              {"covariance", MatrixToJson(c.covariance)}});
  }
  doc["edges"] = nlohmann::json::array();
  for (const auto& [a, b] : ensemble.graph.edges()) {
    doc["edges"].push_back({a, b});
  }
  return doc.dump(2);
}

ClassEnsemble EnsembleFromJson(const std::string& text) {
  try {
    const nlohmann::json doc = nlohmann::json::parse(text);
    std::vector<ClassGaussian> classes;
    for (const auto& c : doc.at("classes")) {
      ClassGaussian g;
      g.label = c.at("label").get<std::string>();
      g.mean = VectorFromJson(c.at("mean"));
      g.covariance = MatrixFromJson(c.at("covariance"));
      classes.push_back(std::move(g));
    }
    std::vector<std::pair<Label, Label>> edges;
    if (doc.contains("edges")) {
      for (const auto& e : doc.at("edges")) {
        if (!e.is_array() || e.size() != 2) {
          throw ConfigError("edge must be a two-element array");
        }
        edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
      }
    }
    return MakeEnsemble(std::move(classes), edges);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ensemble JSON: ") + e.what());
  }
}

void WriteEnsembleFile(const std::string& path, const ClassEnsemble& ensemble) {
  WriteTextFile(path, EnsembleToJson(ensemble) + "\n");
}

ClassEnsemble ReadEnsembleFile(const std::string& path) {
  return EnsembleFromJson(ReadTextFile(path));
}

}  // namespace classdp
