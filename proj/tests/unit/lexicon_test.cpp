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

#include <gtest/gtest.h>

#include "olid/error.hpp"
#include "olid/lexicon.hpp"
#include "olid/random.hpp"

namespace olid {
namespace {

Lexicon lex(LexiconName n, std::initializer_list<const char*> words) {
  Lexicon l;
  l.name = n;
  for (const char* w : words) l.words.insert(w);
  return l;
}

TokenSeq seq(std::vector<std::string> t) { return TokenSeq{std::move(t), ""}; }

TEST(LoadLexicon, CaseFoldsAndDedupes) {
  const auto l = parse_lexicon("Idiot\nidiot\nscum\n", LexiconName::hate);
  EXPECT_EQ(l.words.size(), 2u);
  EXPECT_TRUE(l.contains("idiot"));
  EXPECT_TRUE(l.contains("scum"));
}

TEST(LoadLexicon, OnlyCommentsIsError) {
  EXPECT_THROW(parse_lexicon("# a\n# b\n\n", LexiconName::hate), Error);
}

TEST(LoadLexicon, MultiTokenEntryDropped) {
  const auto l = parse_lexicon("piece of work\nbad\n", LexiconName::negative);
  EXPECT_EQ(l.dropped_multi_token, 1u);
  EXPECT_EQ(l.words.size(), 1u);
}

TEST(LoadLexicon, BuiltinsNonEmpty) {
  const auto set = builtin_lexicons();
  EXPECT_FALSE(set.hate.words.empty());
  EXPECT_FALSE(set.positive.words.empty());
  EXPECT_FALSE(set.negative.words.empty());
  EXPECT_EQ(parse_lexicon_name("positive"), LexiconName::positive);
}

TEST(ExtractFeatures, HandEnumeratedExample) {
  const auto f = extract_features(seq({"you", "are", "an", "idiot"}),
                                  lex(LexiconName::hate, {"idiot"}),
                                  lex(LexiconName::positive, {"good"}),
                                  lex(LexiconName::negative, {"idiot", "bad"}))
                     .flatten();
  const std::array<double, 6> want{1, 0, 1, 0.25, 0, 0.25};
  EXPECT_EQ(f, want);
}

TEST(ExtractFeatures, EmptyTweetIsZero) {
  const auto f = extract_features(seq({}), builtin_lexicons()).flatten();
  for (const double v : f) EXPECT_EQ(v, 0.0);
}

TEST(ExtractFeatures, CountsMultiplicity) {
  const auto f = extract_features(seq({"bad", "bad"}), lex(LexiconName::hate, {"x"}),
                                  lex(LexiconName::positive, {"y"}),
                                  lex(LexiconName::negative, {"bad"}));
  EXPECT_EQ(f.neg_count, 2u);
  EXPECT_EQ(f.neg_norm, 1.0);
}

TEST(ExtractFeatures, PunctuationCountsTowardLength) {
  const auto f = extract_features(seq({"bad", "!", "!", "!"}), lex(LexiconName::hate, {"x"}),
                                  lex(LexiconName::positive, {"y"}),
                                  lex(LexiconName::negative, {"bad"}));
  EXPECT_DOUBLE_EQ(f.neg_norm, 0.25);
}

class LexiconProperties : public ::testing::Test {
 protected:
  LexiconSet set = builtin_lexicons();
  std::vector<std::string> pool{"idiot", "good", "bad", "the", "!", "scum", "love", "awful", "x"};

  TokenSeq random_seq(Rng& rng) {
    TokenSeq t;
    const auto n = uniform_index(rng, 15);
    for (std::uint64_t i = 0; i < n; ++i) t.tokens.push_back(pool[uniform_index(rng, pool.size())]);
    return t;
  }
};

TEST_F(LexiconProperties, PermutationInvariant) {
  auto rng = make_rng(5);
  for (int i = 0; i < 500; ++i) {
    auto t = random_seq(rng);
    const auto a = extract_features(t, set).flatten();
    olid::shuffle(t.tokens.begin(), t.tokens.end(), rng);
    EXPECT_EQ(extract_features(t, set).flatten(), a);
  }
}

TEST_F(LexiconProperties, ConcatenationAddsCountsAndAveragesNorms) {
  auto rng = make_rng(6);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_seq(rng), b = random_seq(rng);
    TokenSeq ab = a;
    ab.tokens.insert(ab.tokens.end(), b.tokens.begin(), b.tokens.end());
    const auto fa = extract_features(a, set).flatten(), fb = extract_features(b, set).flatten(),
               fab = extract_features(ab, set).flatten();
    for (int k = 0; k < 3; ++k) EXPECT_EQ(fab[k], fa[k] + fb[k]);
    if (ab.empty()) continue;
    const double la = static_cast<double>(a.size()), lb = static_cast<double>(b.size());
    for (int k = 3; k < 6; ++k)
      EXPECT_NEAR(fab[k], (fa[k] * la + fb[k] * lb) / (la + lb), 1e-12);
  }
}

TEST_F(LexiconProperties, NormsWithinUnitInterval) {
  auto rng = make_rng(7);
  for (int i = 0; i < 500; ++i) {
    const auto t = random_seq(rng);
    const auto f = extract_features(t, set);
    for (const double v : {f.hate_norm, f.pos_norm, f.neg_norm}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_LE(f.hate_count, t.size());
  }
}

}  // namespace
}  // namespace olid
