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

#include "olid/textprep.hpp"

#include <algorithm>

#include "olid/artifact.hpp"
#include "olid/builtin_data.hpp"
#include "olid/error.hpp"
#include "olid/utf8.hpp"

namespace olid {

namespace {

bool is_alnum(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

bool is_word_char(char c) noexcept { return is_alnum(c) || c == '\''; }

bool is_unicode_space(char32_t cp) noexcept {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Lowercase and filter to the allowed alphabet; whitespace becomes ' '.
std::string clean(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  std::size_t pos = 0;
  while (pos < raw.size()) {
    char32_t cp = utf8::next(raw, pos);
    if (cp == 0x2019 || cp == 0x2018) cp = U'\'';
    if (cp >= U'A' && cp <= U'Z') cp += U'a' - U'A';
    if (cp < 0x80) {
      const char c = static_cast<char>(cp);
      if (is_alnum(c) || is_allowed_punctuation(c)) {
        out.push_back(c);
        continue;
      }
    }
    if (is_unicode_space(cp)) out.push_back(' ');
  }
  return out;
}

std::string expand_contractions(const std::string& s, const ContractionTable& table) {
  if (table.size() == 0) return s;
  const auto& map = table.entries();
  std::string out;
  out.reserve(s.size() + s.size() / 4);
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_char(s[i])) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t end = i;
    while (end < s.size() && is_word_char(s[end])) ++end;
    const std::string_view run(s.data() + i, end - i);

    // Try the whole run, then without trailing quotes, then without leading ones.
    std::string_view core = run;
    while (!core.empty() && core.back() == '\'') core.remove_suffix(1);
    std::size_t lead = 0;
    auto hit = map.find(core);
    if (hit == map.end()) {
      while (lead < core.size() && core[lead] == '\'') ++lead;
      hit = map.find(core.substr(lead));
    }
    if (hit == map.end() || core.size() - lead == 0) {
      out.append(run);
    } else {
      out.append(run.substr(0, lead));
      out.append(hit->second);
      out.append(run.substr(core.size()));
    }
    i = end;
  }
  return out;
}

std::string collapse_spaces(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == ' ') {
      if (!out.empty() && out.back() != ' ') out.push_back(' ');
    } else {
      out.push_back(c);
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

}  // namespace

bool is_allowed_punctuation(char c) noexcept {
  return kAllowedPunctuation.find(c) != std::string_view::npos;
}

ContractionTable::ContractionTable(std::vector<std::pair<std::string, std::string>> entries) {
  for (auto& [key, expansion] : entries) {
    if (key.empty()) fail(ErrorCategory::validation, "contraction table: empty key");
    if (!std::all_of(key.begin(), key.end(), is_word_char))
      fail(ErrorCategory::validation, "contraction table: key '" + key +
                                          "' must be lowercase letters, digits and apostrophes");
    if (expansion.find('\'') != std::string::npos)
      fail(ErrorCategory::validation,
           "contraction table: expansion of '" + key + "' contains an apostrophe");
    max_key_len_ = std::max(max_key_len_, key.size());
    if (!map_.emplace(key, expansion).second)
      fail(ErrorCategory::validation, "contraction table: duplicate key '" + key + "'");
  }
  // Expansions must not reintroduce keys, otherwise normalize would not be idempotent.
  for (const auto& [key, expansion] : map_) {
    for (const auto& word : tokenize(expansion).tokens)
      if (map_.count(word))
        fail(ErrorCategory::validation, "contraction table: expansion of '" + key +
                                            "' contains the key '" + word + "'");
  }
}

ContractionTable ContractionTable::parse(std::string_view contents) {
  if (const auto bad = utf8::first_invalid(contents))
    fail(ErrorCategory::parse, "contraction table: invalid UTF-8 at byte " + std::to_string(*bad));
  std::vector<std::pair<std::string, std::string>> entries;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string_view::npos || line[first] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      fail(ErrorCategory::parse, "contraction table line " + std::to_string(line_no) +
                                     ": expected contraction<TAB>expansion");
    // Keys and expansions go through the same cleaning as tweets.
    std::string key = collapse_spaces(clean(line.substr(0, tab)));
    std::string expansion = collapse_spaces(clean(line.substr(tab + 1)));
    if (expansion.empty())
      fail(ErrorCategory::parse, "contraction table line " + std::to_string(line_no) +
                                     ": empty expansion");
    entries.emplace_back(std::move(key), std::move(expansion));
  }
  return ContractionTable(std::move(entries));
}

ContractionTable ContractionTable::load(const std::filesystem::path& path) {
  return parse(read_file(path));
}

const ContractionTable& ContractionTable::builtin() {
  static const ContractionTable table = parse(builtin_data::kContractions);
  return table;
}

std::string normalize(std::string_view raw, const ContractionTable& table) {
  return collapse_spaces(expand_contractions(clean(raw), table));
}

TokenSeq tokenize(std::string_view normalized, std::string source_id) {
  TokenSeq seq;
  seq.source_id = std::move(source_id);
  std::string current;
  auto flush = [&] {
    if (!current.empty()) seq.tokens.push_back(std::move(current));
    current.clear();
  };
  for (char c : normalized) {
    if (is_alnum(c)) {
      current.push_back(c);
    } else {
      flush();
      if (is_allowed_punctuation(c)) seq.tokens.emplace_back(1, c);
    }
  }
  flush();
  return seq;
}

std::vector<TokenSeq> preprocess_corpus(const Dataset& d, const ContractionTable& table) {
  std::vector<TokenSeq> out;
  out.reserve(d.size());
  for (const auto& r : d.records()) out.push_back(tokenize(normalize(r.raw_text, table), r.id));
  return out;
}

std::string format_token_file(const std::vector<TokenSeq>& seqs) {
  std::string out;
  for (const auto& s : seqs) {
    out += s.source_id;
    out += '\t';
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out += ' ';
      out += s.tokens[i];
    }
    out += '\n';
  }
  return out;
}

std::vector<TokenSeq> parse_token_file(std::string_view contents) {
  std::vector<TokenSeq> out;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    const std::string_view line = contents.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos)
      fail(ErrorCategory::parse, "token file line " + std::to_string(line_no) + ": missing tab");
    TokenSeq seq;
    seq.source_id = std::string(line.substr(0, tab));
    std::string_view rest = line.substr(tab + 1);
    while (!rest.empty()) {
      const auto sp = rest.find(' ');
      const auto tok = rest.substr(0, sp);
      if (!tok.empty()) seq.tokens.emplace_back(tok);
      if (sp == std::string_view::npos) break;
      rest.remove_prefix(sp + 1);
    }
    out.push_back(std::move(seq));
  }
  return out;
}

}  // namespace olid
