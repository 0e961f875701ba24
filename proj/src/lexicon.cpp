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

#include "olid/lexicon.hpp"

#include <algorithm>

#include "olid/artifact.hpp"
#include "olid/builtin_data.hpp"
#include "olid/error.hpp"
#include "olid/utf8.hpp"

namespace olid {

LexiconName parse_lexicon_name(std::string_view s) {
  if (s == "hate") return LexiconName::hate;
  if (s == "positive" || s == "pos") return LexiconName::positive;
  if (s == "negative" || s == "neg") return LexiconName::negative;
  fail(ErrorCategory::config,
       "unknown lexicon '" + std::string(s) + "' (expected hate, positive or negative)");
}

std::string_view to_string(LexiconName n) noexcept {
  switch (n) {
    case LexiconName::hate: return "hate";
    case LexiconName::positive: return "positive";
    case LexiconName::negative: return "negative";
  }
  return "?";
}

Lexicon parse_lexicon(std::string_view contents, LexiconName name) {
  if (const auto bad = utf8::first_invalid(contents))
    fail(ErrorCategory::parse, std::string(to_string(name)) +
                                   " lexicon: invalid UTF-8 at byte " + std::to_string(*bad));
  static const ContractionTable no_contractions;
  Lexicon lex;
  lex.name = name;
  std::size_t start = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    const std::string_view line = contents.substr(start, end - start);
    start = end + 1;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') continue;
    auto tokens = tokenize(normalize(line, no_contractions)).tokens;
    if (tokens.empty()) continue;
    if (tokens.size() > 1) {
      ++lex.dropped_multi_token;
      continue;
    }
    lex.words.insert(std::move(tokens.front()));
  }
  if (lex.words.empty())
    fail(ErrorCategory::data, std::string(to_string(name)) + " lexicon has no usable entries");
  return lex;
}

Lexicon load_lexicon(const std::filesystem::path& path, LexiconName name) {
  return parse_lexicon(read_file(path), name);
}

const Lexicon& builtin_lexicon(LexiconName name) {
  static const Lexicon hate = parse_lexicon(builtin_data::kHateLexicon, LexiconName::hate);
  static const Lexicon pos = parse_lexicon(builtin_data::kPositiveLexicon, LexiconName::positive);
  static const Lexicon neg = parse_lexicon(builtin_data::kNegativeLexicon, LexiconName::negative);
  switch (name) {
    case LexiconName::hate: return hate;
    case LexiconName::positive: return pos;
    case LexiconName::negative: return neg;
  }
  return hate;
}

LexiconSet builtin_lexicons() {
  return {builtin_lexicon(LexiconName::hate), builtin_lexicon(LexiconName::positive),
          builtin_lexicon(LexiconName::negative)};
}

std::array<double, kLexiconFeatureCount> LexiconFeatures::flatten() const {
  return {static_cast<double>(hate_count), static_cast<double>(pos_count),
          static_cast<double>(neg_count), hate_norm, pos_norm, neg_norm};
}

LexiconFeatures extract_features(const TokenSeq& t, const Lexicon& hate, const Lexicon& pos,
                                 const Lexicon& neg) {
  LexiconFeatures f;
  for (const auto& tok : t.tokens) {
    f.hate_count += hate.contains(tok);
    f.pos_count += pos.contains(tok);
    f.neg_count += neg.contains(tok);
  }
  const double len = static_cast<double>(std::max<std::size_t>(1, t.tokens.size()));
  f.hate_norm = static_cast<double>(f.hate_count) / len;
  f.pos_norm = static_cast<double>(f.pos_count) / len;
  f.neg_norm = static_cast<double>(f.neg_count) / len;
  return f;
}

LexiconFeatures extract_features(const TokenSeq& t, const LexiconSet& lex) {
  return extract_features(t, lex.hate, lex.positive, lex.negative);
}

}  // namespace olid
