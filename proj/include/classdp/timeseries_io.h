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

#ifndef CLASSDP_TIMESERIES_IO_H_
#define CLASSDP_TIMESERIES_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace classdp {

struct TimeSeries {
  std::vector<double> values;
  std::vector<std::int64_t> timestamps;  // epoch seconds, empty if headerless
  std::optional<std::int64_t> spacing;   // seconds between samples
};

// Seconds since 1970-01-01T00:00:00Z for "YYYY-MM-DDTHH:MM[:SS][Z]" (a space
// may replace the T). Throws ConfigError on malformed input.
std::int64_t ParseIsoTimestamp(const std::string& text);

// Either a `timestamp,value` CSV with strictly increasing, uniformly spaced
// timestamps, or a headerless single numeric column.
TimeSeries ParseTimeSeriesCsv(const std::string& text);
TimeSeries ReadTimeSeriesCsv(const std::string& path);

}  // namespace classdp

#endif  // CLASSDP_TIMESERIES_IO_H_
