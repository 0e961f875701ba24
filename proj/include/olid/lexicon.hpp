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

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "olid/textprep.hpp"

namespace olid {

enum class LexiconName { hate, positive, negative };

LexiconName parse_lexicon_name(std::string_view s);
std::string_view to_string(LexiconName n) noexcept;

struct Lexicon {
  LexiconName name = LexiconName::hate;
  std::unordered_set<std::string> words;
  std::size_t dropped_multi_token = 0;  // entries that normalized to several tokens

  bool contains(const std::string& token) const { return words.count(token) != 0; }
};

/// One word per line, '#' comments and blank lines ignored; entries are
/// normalized like tweet text. Data error if nothing survives.
Lexicon parse_lexicon(std::string_view contents, LexiconName name);
Lexicon load_lexicon(const std::filesystem::path& path, LexiconName name);

/// Demo lexicons compiled from data/lexicons/.
const Lexicon& builtin_lexicon(LexiconName name);

struct LexiconSet {
  Lexicon hate;
  Lexicon positive;
  Lexicon negative;
};

LexiconSet builtin_lexicons();

inline constexpr std::size_t kLexiconFeatureCount = 6;

struct LexiconFeatures {
  std::size_t hate_count = 0;
  std::size_t pos_count = 0;
  std::size_t neg_count = 0;
  double hate_norm = 0.0;
  double pos_norm = 0.0;
  double neg_norm = 0.0;

  /// [hate_count, pos_count, neg_count, hate_norm, pos_norm, neg_norm]
  std::array<double, kLexiconFeatureCount> flatten() const;
};

/// Exact-token occurrence counts (with multiplicity), normalized by
/// max(1, token count including punctuation).
LexiconFeatures extract_features(const TokenSeq& t, const Lexicon& hate, const Lexicon& pos,
                                 const Lexicon& neg);
LexiconFeatures extract_features(const TokenSeq& t, const LexiconSet& lex);

}  // namespace olid
