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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "olid/artifact.hpp"
#include "olid/textprep.hpp"

namespace olid {

/// Token inventory ordered by descending frequency, ties broken by token,
/// so the index assignment is a pure function of the corpus.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Keeps tokens seen at least `min_count` times.
  static Vocabulary build(std::span<const TokenSeq> corpus, std::int64_t min_count);
  /// From (token, frequency) pairs already in index order.
  static Vocabulary from_entries(std::vector<std::pair<std::string, std::int64_t>> entries);

  std::optional<std::int32_t> find(const std::string& token) const;
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  std::int64_t frequency(std::size_t i) const { return freqs_[i]; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  /// [[token, frequency, index], ...]
  Json to_json() const;
  static Vocabulary from_json(const Json& j);

  bool operator==(const Vocabulary& o) const { return tokens_ == o.tokens_ && freqs_ == o.freqs_; }

 private:
  std::vector<std::string> tokens_;
  std::vector<std::int64_t> freqs_;
  std::unordered_map<std::string, std::int32_t> index_;
};

}  // namespace olid
