//
// Copyright 2026 The Trajanon Authors
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

#ifndef TRAJANON_ERROR_HPP_
#define TRAJANON_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace trajanon {

enum class ErrorCode {
  kInvalidGrid,
  kTreeMismatch,
  kNotAncestor,
  kInvalidLabel,
  kEmptyDataset,
  kIngest,
  kParse,
  kInfeasibleK,
  kInvalidArgument,
  kInconsistentStructure,
  kSizeLimit,
  kInternal,
};

inline std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidGrid: return "invalid-grid";
    case ErrorCode::kTreeMismatch: return "tree-mismatch";
    case ErrorCode::kNotAncestor: return "not-an-ancestor";
    case ErrorCode::kInvalidLabel: return "invalid-label";
    case ErrorCode::kEmptyDataset: return "empty-dataset";
    case ErrorCode::kIngest: return "ingest";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kInfeasibleK: return "infeasible-k";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInconsistentStructure: return "inconsistent-structure";
    case ErrorCode::kSizeLimit: return "size-limit";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

// All library failures are reported through this exception type; `code()`
// distinguishes the category so callers (notably the CLI) can map it to an
// exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace trajanon

#endif  // TRAJANON_ERROR_HPP_
