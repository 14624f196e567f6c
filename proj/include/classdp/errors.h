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

#ifndef CLASSDP_ERRORS_H_
#define CLASSDP_ERRORS_H_

#include <stdexcept>
#include <string>

namespace classdp {

// Raised when a numerical precondition fails at run time: a matrix that must
// be positive definite is not, a regression is rank deficient, a cost turns
// non-finite. Precondition violations on plain arguments use
// std::invalid_argument instead.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration or input files. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace classdp

#endif  // CLASSDP_ERRORS_H_
