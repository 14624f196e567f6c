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

#include "classdp/timeseries_io.h"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "classdp/errors.h"
#include "classdp/io_util.h"

namespace classdp {
namespace {

std::string Trim(const std::string& s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool ParseNumber(const std::string& s, double& out) {
  if (s.empty()) return false;
  size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

// Days since 1970-01-01 of a proleptic Gregorian date.
std::int64_t DaysFromCivil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

}  // namespace

std::int64_t ParseIsoTimestamp(const std::string& raw) {
  const std::string text = Trim(raw);
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  int consumed = 0;
  const int fields = std::sscanf(text.c_str(), "%4d-%2d-%2d%c%2d:%2d%n", &y,
                                 &mo, &d, &sep, &h, &mi, &consumed);
  if (fields < 6 || (sep != 'T' && sep != ' ')) {
    throw ConfigError("malformed ISO-8601 timestamp: " + text);
  }
  std::string rest = text.substr(consumed);
  if (!rest.empty() && rest[0] == ':') {
    int more = 0;
    if (std::sscanf(rest.c_str(), ":%2d%n", &s, &more) != 1) {
      throw ConfigError("malformed ISO-8601 seconds: " + text);
    }
    rest = rest.substr(more);
  }
  if (!(rest.empty() || rest == "Z")) {
    throw ConfigError("unsupported timestamp suffix: " + text);
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
    throw ConfigError("timestamp out of range: " + text);
  }
  return DaysFromCivil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

TimeSeries ParseTimeSeriesCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    line = Trim(line);
    if (!line.empty()) lines.push_back(line);
  }
  if (lines.empty()) throw ConfigError("time series is empty");

  TimeSeries out;
  double v = 0.0;
  if (ParseNumber(lines[0], v)) {
    for (size_t i = 0; i < lines.size(); ++i) {
      if (!ParseNumber(lines[i], v) || !std::isfinite(v)) {
        throw ConfigError("line " + std::to_string(i + 1) + ": not a number");
      }
      out.values.push_back(v);
    }
    return out;
  }

  std::string header = lines[0];
  for (auto& c : header) c = static_cast<char>(std::tolower(c));
  if (header.find(',') == std::string::npos ||
      Trim(header.substr(0, header.find(','))) != "timestamp" ||
      Trim(header.substr(header.find(',') + 1)) != "value") {
    throw ConfigError("expected header `timestamp,value`");
  }
  for (size_t i = 1; i < lines.size(); ++i) {
    const size_t comma = lines[i].find(',');
    if (comma == std::string::npos) {
      throw ConfigError("line " + std::to_string(i + 1) + ": missing comma");
    }
    const std::int64_t ts = ParseIsoTimestamp(lines[i].substr(0, comma));
    if (!ParseNumber(Trim(lines[i].substr(comma + 1)), v) || !std::isfinite(v)) {
      throw ConfigError("line " + std::to_string(i + 1) + ": bad value");
    }
    if (!out.timestamps.empty()) {
      const std::int64_t step = ts - out.timestamps.back();
      if (step <= 0) {
        throw ConfigError("line " + std::to_string(i + 1) +
                          ": timestamps must be strictly increasing");
      }
      if (out.spacing.has_value() && step != *out.spacing) {
        throw ConfigError("line " + std::to_string(i + 1) +
                          ": non-uniform sample spacing");
      }
      out.spacing = step;
    }
    out.timestamps.push_back(ts);
    out.values.push_back(v);
  }
  if (out.values.empty()) throw ConfigError("time series has no samples");
  return out;
}

TimeSeries ReadTimeSeriesCsv(const std::string& path) {
  try {
    return ParseTimeSeriesCsv(ReadTextFile(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace classdp
