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

#include <functional>

#include "olid/error.hpp"
#include "olid/metrics.hpp"
#include "olid/random.hpp"

namespace olid {
namespace {

const std::vector<std::string> kAB{"NOT", "OFF"};
const std::vector<std::string> kABC{"IND", "GRP", "OTH"};

std::vector<std::string> names_for(int k) {
  return k == 2 ? kAB : std::vector<std::string>(kABC.begin(), kABC.begin() + k);
}

/// Per-class F1 straight from the label lists, averaged over gold-present classes.
double brute_macro_f1(const std::vector<int>& gold, const std::vector<int>& pred, int k) {
  double sum = 0;
  int present = 0;
  for (int c = 0; c < k; ++c) {
    int tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      if (gold[i] == c && pred[i] == c) ++tp;
      if (gold[i] != c && pred[i] == c) ++fp;
      if (gold[i] == c && pred[i] != c) ++fn;
    }
    if (tp + fn == 0) continue;
    ++present;
    const double p = tp + fp ? double(tp) / (tp + fp) : 0.0;
    const double r = double(tp) / (tp + fn);
    sum += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  return sum / present;
}

TEST(Confusion, DirectCount) {
  const auto cm = confusion(std::vector<int>{0, 1}, std::vector<int>{0, 0}, kAB);
  EXPECT_EQ(cm.counts, (std::vector<std::vector<std::int64_t>>{{1, 0}, {1, 0}}));
  EXPECT_EQ(cm.total(), 2);
}

TEST(Confusion, IdentityIsDiagonal) {
  const std::vector<int> y{0, 1, 2, 2, 1, 0, 0};
  const auto cm = confusion(y, y, kABC);
  for (std::size_t g = 0; g < 3; ++g)
    for (std::size_t p = 0; p < 3; ++p)
      if (g != p) EXPECT_EQ(cm.counts[g][p], 0);
}

TEST(Confusion, Errors) {
  EXPECT_THROW(confusion(std::vector<int>{}, std::vector<int>{}, kAB), Error);
  EXPECT_THROW(confusion(std::vector<int>{0}, std::vector<int>{0, 1}, kAB), Error);
  EXPECT_THROW(confusion(std::vector<int>{0}, std::vector<int>{2}, kAB), Error);
}

TEST(MacroF1, PerfectIsOne) {
  for (const int k : {2, 3}) {
    std::vector<int> y;
    for (int i = 0; i < 9; ++i) y.push_back(i % k);
    EXPECT_EQ(macro_f1(confusion(y, y, names_for(k))), 1.0);
  }
}

TEST(MacroF1, MajorityOnlyHandCase) {
  std::vector<int> gold(8, 0);
  gold.push_back(1);
  gold.push_back(1);
  const std::vector<int> pred(10, 0);
  // F1(NOT) = 2 * 0.8 * 1 / 1.8, F1(OFF) = 0.
  const double oracle = (2 * 0.8 / 1.8 + 0.0) / 2;
  EXPECT_NEAR(macro_f1(confusion(gold, pred, kAB)), oracle, 1e-12);
  EXPECT_NEAR(macro_f1(confusion(gold, pred, kAB)), 0.4444, 1e-4);
  const auto rep = report(gold, pred, kAB);
  EXPECT_NEAR(rep.accuracy, 0.8, 1e-12);
  EXPECT_NEAR(rep.macro_f1, 0.4444, 1e-4);
}

TEST(MacroF1, GoldAbsentClassExcluded) {
  // OTH only predicted, never gold: contributes no F1 term.
  const std::vector<int> gold{0, 0, 1, 1}, pred{0, 2, 1, 1};
  const auto cm = confusion(gold, pred, kABC);
  EXPECT_EQ(cm.counts[0][2], 1);
  EXPECT_NEAR(macro_f1(cm), brute_macro_f1(gold, pred, 3), 1e-15);
}

TEST(MacroF1, ExhaustiveSmallOracle) {
  // Every (gold, pred) pair: K=2 up to length 7, K=3 up to length 4.
  for (const int k : {2, 3}) {
    const int max_len = k == 2 ? 7 : 4;
    for (int n = 1; n <= max_len; ++n) {
      std::vector<int> gold(n), pred(n);
      std::function<void(int)> rec = [&](int pos) {
        if (pos == 2 * n) {
          const double got = macro_f1(confusion(gold, pred, names_for(k)));
          ASSERT_NEAR(got, brute_macro_f1(gold, pred, k), 1e-12);
          return;
        }
        auto& slot = pos < n ? gold[pos] : pred[pos - n];
        for (int c = 0; c < k; ++c) {
          slot = c;
          rec(pos + 1);
        }
      };
      rec(0);
    }
  }
}

TEST(MacroF1, RandomOracleUpToLength12) {
  auto rng = make_rng(12);
  for (int trial = 0; trial < 20000; ++trial) {
    const int k = 2 + static_cast<int>(uniform_index(rng, 2));
    const int n = 1 + static_cast<int>(uniform_index(rng, 12));
    std::vector<int> gold(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gold[i] = static_cast<int>(uniform_index(rng, k));
      pred[i] = static_cast<int>(uniform_index(rng, k));
    }
    const double got = macro_f1(confusion(gold, pred, names_for(k)));
    ASSERT_NEAR(got, brute_macro_f1(gold, pred, k), 1e-12);
    ASSERT_GE(got, 0.0);
    ASSERT_LE(got, 1.0);
  }
}

TEST(MacroF1, OneIffDiagonalWithAllGoldClasses) {
  auto rng = make_rng(13);
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 8));
    std::vector<int> gold(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gold[i] = static_cast<int>(uniform_index(rng, 3));
      pred[i] = uniform01(rng) < 0.8 ? gold[i] : static_cast<int>(uniform_index(rng, 3));
    }
    const auto cm = confusion(gold, pred, kABC);
    bool diagonal = true;
    for (std::size_t g = 0; g < 3; ++g)
      for (std::size_t p = 0; p < 3; ++p)
        if (g != p && cm.counts[g][p] != 0) diagonal = false;
    EXPECT_EQ(macro_f1(cm) == 1.0, diagonal);
  }
}

TEST(MacroF1, InvariantUnderClassPermutation) {
  auto rng = make_rng(14);
  const std::vector<std::vector<int>> perms{{0, 1, 2}, {2, 0, 1}, {1, 2, 0}, {2, 1, 0}};
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 12));
    std::vector<int> gold(n), pred(n);
    for (int i = 0; i < n; ++i) {
      gold[i] = static_cast<int>(uniform_index(rng, 3));
      pred[i] = static_cast<int>(uniform_index(rng, 3));
    }
    const double base = macro_f1(confusion(gold, pred, kABC));
    for (const auto& perm : perms) {
      std::vector<int> g2(n), p2(n);
      std::vector<std::string> names(3);
      for (int c = 0; c < 3; ++c) names[perm[c]] = kABC[c];
      for (int i = 0; i < n; ++i) {
        g2[i] = perm[gold[i]];
        p2[i] = perm[pred[i]];
      }
      EXPECT_NEAR(macro_f1(confusion(g2, p2, names)), base, 1e-12);
    }
  }
}

TEST(Report, AccuracyMatchesRawLists) {
  auto rng = make_rng(15);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + static_cast<int>(uniform_index(rng, 30));
    std::vector<int> gold(n), pred(n);
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      gold[i] = static_cast<int>(uniform_index(rng, 3));
      pred[i] = static_cast<int>(uniform_index(rng, 3));
      hits += gold[i] == pred[i];
    }
    EXPECT_NEAR(report(gold, pred, kABC).accuracy, double(hits) / n, 1e-15);
  }
}

TEST(Report, PerfectTwoClass) {
  const std::vector<int> y{0, 1, 1, 0};
  const auto rep = report(y, y, kAB);
  EXPECT_EQ(rep.accuracy, 1.0);
  EXPECT_EQ(rep.macro_f1, 1.0);
  EXPECT_EQ(rep.confusion.counts[0][1], 0);
  EXPECT_EQ(rep.confusion.counts[1][0], 0);
}

TEST(Report, RendersTextJsonCsv) {
  const auto rep = report(std::vector<int>{0, 1, 1}, std::vector<int>{0, 1, 0}, kAB);
  EXPECT_NE(rep.to_text().find("OFF"), std::string::npos);
  const auto j = rep.to_json();
  EXPECT_EQ(j.at("class_names"), Json(kAB));
  EXPECT_NEAR(j.at("macro_f1").get<double>(), rep.macro_f1, 1e-15);
  EXPECT_EQ(rep.confusion_csv().substr(0, rep.confusion_csv().find('\n')), "gold\\pred,NOT,OFF");
}

TEST(Majority, BaselineAndTieBreak) {
  EXPECT_EQ(majority_class(std::vector<int>{1, 1, 0}, 2), 1);
  EXPECT_EQ(majority_class(std::vector<int>{1, 0}, 2), 0);
  std::vector<int> gold(8, 0);
  gold.push_back(1);
  gold.push_back(1);
  EXPECT_NEAR(majority_baseline_f1(gold, 0, kAB), 0.4444, 1e-4);
}

}  // namespace
}  // namespace olid
