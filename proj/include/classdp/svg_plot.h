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

#ifndef CLASSDP_SVG_PLOT_H_
#define CLASSDP_SVG_PLOT_H_

#include <string>
#include <vector>

namespace classdp {

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotPanel {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

// Panels side by side, each with axes, ticks and a legend. Coordinates are
// printed with fixed precision so output is byte-stable.
std::string RenderSvg(const std::vector<PlotPanel>& panels);

}  // namespace classdp

#endif  // CLASSDP_SVG_PLOT_H_
