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

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "olid/corpus.hpp"

namespace olid {

/// Punctuation kept by normalization; each occurrence becomes its own token.
inline constexpr std::string_view kAllowedPunctuation = ".,!?'\":;()-#@_/";

bool is_allowed_punctuation(char c) noexcept;

struct TokenSeq {
  std::vector<std::string> tokens;
  std::string source_id;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  bool operator==(const TokenSeq&) const = default;
};

/// Lowercase contraction -> expansion words. Keys may contain apostrophes;
/// expansions may not.
class ContractionTable {
 public:
  ContractionTable() = default;
  /// Validation error on duplicate keys or apostrophes in an expansion.
  explicit ContractionTable(std::vector<std::pair<std::string, std::string>> entries);

  static ContractionTable parse(std::string_view contents);
  static ContractionTable load(const std::filesystem::path& path);

  /// Table shipped in data/contractions.tsv, compiled in.
  static const ContractionTable& builtin();

  std::size_t size() const noexcept { return map_.size(); }
  const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return map_; }
  std::size_t max_key_length() const noexcept { return max_key_len_; }

 private:
  std::map<std::string, std::string, std::less<>> map_;
  std::size_t max_key_len_ = 0;
};

/// Lowercases, keeps only ASCII letters/digits/whitespace/allowed punctuation,
/// expands contractions (longest match, word-bounded; ' and U+2019 both
/// count as apostrophes) and collapses whitespace. Total and idempotent.
std::string normalize(std::string_view raw, const ContractionTable& table);

/// Splits on spaces; every punctuation character becomes a token of its own.
TokenSeq tokenize(std::string_view normalized, std::string source_id = {});

std::vector<TokenSeq> preprocess_corpus(const Dataset& d, const ContractionTable& table);

/// Token list serialized one tweet per line: `id<TAB>tok tok tok`.
std::string format_token_file(const std::vector<TokenSeq>& seqs);
std::vector<TokenSeq> parse_token_file(std::string_view contents);

}  // namespace olid
