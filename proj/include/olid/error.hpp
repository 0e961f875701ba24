// Copyright 2026 The olidkit Authors.
//
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

namespace olid {

/// Failure classes surfaced to callers and, one-to-one, to the CLI exit line.
enum class ErrorCategory {
  parse,       // malformed input bytes or rows
  validation,  // well-formed input violating a domain invariant
  join,        // mismatched ids between paired files
  config,      // illegal hyperparameters or options
  data,        // data unusable for the requested operation
  dimension,   // shape mismatch at prediction time
  io,          // filesystem failures
};

std::string_view to_string(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory c, const std::string& message) {
  throw Error(c, message);
}

inline void require(bool cond, ErrorCategory c, const std::string& message) {
  if (!cond) throw Error(c, message);
}

}  // namespace olid
