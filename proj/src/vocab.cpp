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

#include "olid/vocab.hpp"

#include <algorithm>

#include "olid/error.hpp"

namespace olid {

Vocabulary Vocabulary::build(std::span<const TokenSeq> corpus, std::int64_t min_count) {
  std::unordered_map<std::string, std::int64_t> counts;
  for (const auto& seq : corpus)
    for (const auto& tok : seq.tokens) ++counts[tok];
  std::vector<std::pair<std::string, std::int64_t>> entries;
  for (auto& [tok, n] : counts)
    if (n >= min_count) entries.emplace_back(tok, n);
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return from_entries(std::move(entries));
}

Vocabulary Vocabulary::from_entries(std::vector<std::pair<std::string, std::int64_t>> entries) {
  Vocabulary v;
  v.tokens_.reserve(entries.size());
  v.freqs_.reserve(entries.size());
  for (auto& [tok, n] : entries) {
    const auto idx = static_cast<std::int32_t>(v.tokens_.size());
    if (!v.index_.emplace(tok, idx).second)
      fail(ErrorCategory::validation, "vocabulary: duplicate token '" + tok + "'");
    v.tokens_.push_back(std::move(tok));
    v.freqs_.push_back(n);
  }
  return v;
}

std::optional<std::int32_t> Vocabulary::find(const std::string& token) const {
  const auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Json Vocabulary::to_json() const {
  Json out = Json::array();
  for (std::size_t i = 0; i < tokens_.size(); ++i)
    out.push_back(Json::array({tokens_[i], freqs_[i], i}));
  return out;
}

Vocabulary Vocabulary::from_json(const Json& j) {
  std::vector<std::pair<std::string, std::int64_t>> entries;
  entries.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (!e.is_array() || e.size() != 3 || e[2].get<std::size_t>() != i)
      fail(ErrorCategory::parse, "vocabulary entry " + std::to_string(i) + " is malformed");
    entries.emplace_back(e[0].get<std::string>(), e[1].get<std::int64_t>());
  }
  return from_entries(std::move(entries));
}

}  // namespace olid
