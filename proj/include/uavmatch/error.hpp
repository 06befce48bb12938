// Copyright 2026 The uavmatch Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace uavmatch {

enum class ErrorKind {
  kDegenerateGeometry,
  kInvalidDemand,
  kConfiguration,
  kValidation,
  kParse,
  kTerminationCap,
  kInstanceTooLarge,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDegenerateGeometry: return "degenerate-geometry";
    case ErrorKind::kInvalidDemand: return "invalid-demand";
    case ErrorKind::kConfiguration: return "configuration";
    case ErrorKind::kValidation: return "validation";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kTerminationCap: return "termination-cap";
    case ErrorKind::kInstanceTooLarge: return "instance-too-large";
  }
  return "unknown";
}

// Base error for the library. Every thrown error carries a kind so callers
// (notably the CLI) can map failures onto exit codes without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit status for a failure of the given kind: 1 for bad input,
// 2 when an engine fails to settle, 3 when the oracle refuses an instance.
constexpr int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kTerminationCap: return 2;
    case ErrorKind::kInstanceTooLarge: return 3;
    default: return 1;
  }
}

}  // namespace uavmatch
