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

#ifndef CLASSDP_GAUSSIAN_ENSEMBLE_H_
#define CLASSDP_GAUSSIAN_ENSEMBLE_H_

#include <iosfwd>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "classdp/linalg.h"

namespace classdp {

using Label = std::string;
using OrderedPair = std::pair<Label, Label>;

// Query distribution N(mean, covariance) observed when the hidden label is
// `label`.
struct ClassGaussian {
  Label label;
  Vector mean;
  Matrix covariance;

  int dim() const { return static_cast<int>(mean.size()); }
};

// Undirected indistinguishability graph over class labels. Edges are stored
// as unordered pairs (smaller label first), so undirectedness is structural.
// Dangling edges and self-loops are representable; ValidateEnsemble reports
// them.
class NeighborhoodGraph {
 public:
  NeighborhoodGraph() = default;

  void AddLabel(const Label& label) { labels_.insert(label); }
  void AddEdge(const Label& a, const Label& b);

  const std::set<Label>& labels() const { return labels_; }
  const std::set<std::pair<Label, Label>>& edges() const { return edges_; }
  bool HasEdge(const Label& a, const Label& b) const;

  // Both orientations of every edge, lexicographically ordered.
  std::vector<OrderedPair> OrderedEdges() const;

  // Neighbors of `label`, lexicographically ordered.
  std::vector<Label> Neighbors(const Label& label) const;

  static NeighborhoodGraph Complete(const std::vector<Label>& labels);

 private:
  std::set<Label> labels_;
  std::set<std::pair<Label, Label>> edges_;
};

// One ClassGaussian per graph label, all of a common dimension. Classes are
// kept sorted by label.
struct ClassEnsemble {
  std::vector<ClassGaussian> classes;
  NeighborhoodGraph graph;

  int dim() const { return classes.empty() ? 0 : classes.front().dim(); }
  const ClassGaussian& Find(const Label& label) const;
  int IndexOf(const Label& label) const;
  std::vector<Label> Labels() const;
};

// Builds an ensemble, sorting classes by label and registering every label
// in the graph.
ClassEnsemble MakeEnsemble(std::vector<ClassGaussian> classes,
                           const std::vector<std::pair<Label, Label>>& edges);

enum class ViolationKind {
  kAsymmetricCovariance,
  kNotPositiveDefinite,
  kDanglingEdge,
  kSelfLoop,
  kDimensionMismatch,
  kDuplicateLabel,
  kMissingClass,
  kNonFinite,
  kEmpty,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool Has(ViolationKind kind) const;
  std::string Summary() const;
};

ValidationReport ValidateEnsemble(const ClassEnsemble& ensemble);

// Throws ConfigError carrying the report summary if the ensemble is invalid.
void RequireValidEnsemble(const ClassEnsemble& ensemble);

// JSON document {classes:[{label, mean, covariance}], edges:[[a,b],...]},
// matrices row-major.
std::string EnsembleToJson(const ClassEnsemble& ensemble);
ClassEnsemble EnsembleFromJson(const std::string& text);
void WriteEnsembleFile(const std::string& path, const ClassEnsemble& ensemble);
ClassEnsemble ReadEnsembleFile(const std::string& path);

}  // namespace classdp

#endif  // CLASSDP_GAUSSIAN_ENSEMBLE_H_
