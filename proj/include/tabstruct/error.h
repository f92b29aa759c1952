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
#ifndef TABSTRUCT_ERROR_H_
#define TABSTRUCT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tabstruct {

// Coarse failure categories. The CLI maps each one to a distinct exit code.
enum class ErrorCategory {
  kInput,
  kMode,
  kConsistency,
  kGeometry,
  kParse,
  kSchema,
  kEmptyStructure,
  kConfig,
  kNumerical,
  kCorpus,
  kIo,
};

std::string_view CategoryName(ErrorCategory category);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// HTML parse failure; offset is the byte position in the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& message);

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace tabstruct

#endif  // TABSTRUCT_ERROR_H_
