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

#ifndef CLASSDP_IO_UTIL_H_
#define CLASSDP_IO_UTIL_H_

#include <string>

#include "classdp/linalg.h"
#include <nlohmann/json.hpp>

namespace classdp {

nlohmann::json VectorToJson(const Vector& v);
nlohmann::json MatrixToJson(const Matrix& m);
Vector VectorFromJson(const nlohmann::json& j);
// Rows must all have equal length.
Matrix MatrixFromJson(const nlohmann::json& j);

// Shortest round-tripping form is not required anywhere; CSV output uses 17
// significant digits throughout.
std::string FormatDouble(double v);

// Compact label for file names, e.g. 0.5 -> "0.5", 2 -> "2".
std::string FormatShort(double v);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& contents);

}  // namespace classdp

#endif  // CLASSDP_IO_UTIL_H_
