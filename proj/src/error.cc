// Copyright 2026 The TabStruct Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "tabstruct/error.h"

#include <fmt/format.h>

namespace tabstruct {

std::string_view CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInput:
      return "input";
    case ErrorCategory::kMode:
      return "mode";
    case ErrorCategory::kConsistency:
      return "consistency";
    case ErrorCategory::kGeometry:
      return "geometry";
    case ErrorCategory::kParse:
      return "parse";
    case ErrorCategory::kSchema:
      return "schema";
    case ErrorCategory::kEmptyStructure:
      return "empty-structure";
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kNumerical:
      return "numerical";
    case ErrorCategory::kCorpus:
      return "corpus";
    case ErrorCategory::kIo:
      return "io";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t offset, const std::string& message)
    : Error(ErrorCategory::kParse,
            fmt::format("at byte {}: {}", offset, message)),
      offset_(offset) {}

}  // namespace tabstruct
