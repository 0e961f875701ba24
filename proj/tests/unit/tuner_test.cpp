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

#include <algorithm>
#include <cmath>
#include <set>

#include "olid/error.hpp"
#include "olid/tuner.hpp"

namespace olid {
namespace {

ParamSpace dim_space() {
  ParamSpace s;
  s.params["dim"] = ParamDist::categorical({32, 64});
  return s;
}

TEST(Sample, DegenerateRangesAlwaysReturnTheirValue) {
  ParamSpace s;
  s.params["only"] = ParamDist::categorical({"x"});
  s.params["fixed"] = ParamDist::int_uniform(3, 3);
  for (std::uint64_t t = 0; t < 20; ++t) {
    const auto c = sample(s, 9, t);
    EXPECT_EQ(c.at("only"), "x");
    EXPECT_EQ(c.at("fixed"), 3);
  }
}

TEST(Sample, WithinBoundsAndTyped) {
  ParamSpace s;
  s.params["n"] = ParamDist::int_uniform(1, 4);
  s.params["r"] = ParamDist::real_uniform(-1, 1);
  s.params["lr"] = ParamDist::log_uniform(0.05, 1.0);
  std::set<std::int64_t> ints;
  for (std::uint64_t t = 0; t < 500; ++t) {
    const auto c = sample(s, 1, t);
    ASSERT_TRUE(c.at("n").is_number_integer());
    const auto n = c.at("n").get<std::int64_t>();
    EXPECT_GE(n, 1);
    EXPECT_LE(n, 4);
    ints.insert(n);
    EXPECT_GE(c.at("r").get<double>(), -1);
    EXPECT_LE(c.at("r").get<double>(), 1);
    EXPECT_GE(c.at("lr").get<double>(), 0.05);
    EXPECT_LE(c.at("lr").get<double>(), 1.0);
  }
  EXPECT_EQ(ints.size(), 4u);
}

TEST(Sample, LogUniformCoversDecades) {
  ParamSpace s;
  s.params["lr"] = ParamDist::log_uniform(1e-4, 1.0);
  int below = 0;
  for (std::uint64_t t = 0; t < 2000; ++t) below += sample(s, 2, t).at("lr").get<double>() < 1e-2;
  // Half the log range lies below 1e-2.
  EXPECT_NEAR(below / 2000.0, 0.5, 0.05);
}

TEST(Sample, Deterministic) {
  const auto s = default_ngram_space();
  for (std::uint64_t t = 0; t < 10; ++t) EXPECT_EQ(sample(s, 5, t), sample(s, 5, t));
  EXPECT_NE(sample(s, 5, 0), sample(s, 6, 0));
}

TEST(Space, ValidationAndJson) {
  ParamSpace bad;
  bad.params["x"] = ParamDist::int_uniform(5, 2);
  EXPECT_THROW(bad.validate(), Error);
  bad.params["x"] = ParamDist::log_uniform(0.0, 1.0);
  EXPECT_THROW(bad.validate(), Error);
  bad.params["x"] = ParamDist::categorical({});
  EXPECT_THROW(bad.validate(), Error);

  const auto s = default_ngram_space();
  EXPECT_EQ(ParamSpace::from_json(s.to_json()).to_json(), s.to_json());
  EXPECT_THROW(ParamSpace::from_json(Json::parse(R"({"x": {"type": "weird"}})")), Error);
}

TEST(RandomSearch, FindsPlantedOptimum) {
  const auto r = random_search(dim_space(), 50, [](const Json& c) {
    return c.at("dim") == 64 ? 1.0 : 0.5;
  }, 42);
  EXPECT_EQ(r.best.config.at("dim"), 64);
  EXPECT_DOUBLE_EQ(r.best.macro_f1, 1.0);
  EXPECT_EQ(r.trials.size(), 50u);
}

TEST(RandomSearch, SingleTrial) {
  const auto r = random_search(dim_space(), 1, [](const Json&) { return 0.3; }, 1);
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_EQ(r.best.index, 0u);
  EXPECT_THROW(random_search(dim_space(), 0, [](const Json&) { return 0.3; }, 1), Error);
}

TEST(RandomSearch, FailedTrialScoresZeroAndSearchContinues) {
  int calls = 0;
  const auto r = random_search(dim_space(), 6, [&](const Json&) -> double {
    ++calls;
    if (calls == 2) throw Error(ErrorCategory::data, "boom");
    if (calls == 3) return 1.5;
    return 0.1 * calls;
  }, 3);
  EXPECT_EQ(calls, 6);
  EXPECT_TRUE(r.trials[1].failed);
  EXPECT_EQ(r.trials[1].macro_f1, 0.0);
  EXPECT_NE(r.trials[1].note.find("boom"), std::string::npos);
  EXPECT_TRUE(r.trials[2].failed);
  EXPECT_EQ(r.best.index, 5u);
}

TEST(RandomSearch, BestIsFirstMaximum) {
  const std::vector<double> scores{0.2, 0.7, 0.4, 0.7, 0.1};
  const auto r = random_search(dim_space(), 5, [&, i = 0](const Json&) mutable {
    return scores[static_cast<std::size_t>(i++)];
  }, 4);
  EXPECT_EQ(r.best.index, 1u);
  for (const auto& t : r.trials) EXPECT_LE(t.macro_f1, r.best.macro_f1);
}

TEST(RandomSearch, ProbabilisticCoverageOfSmallGrid) {
  // Four configurations, 60 trials: the chance of never drawing the best
  // one is (3/4)^60, about 3e-8.
  ParamSpace s;
  s.params["a"] = ParamDist::categorical({0, 1});
  s.params["b"] = ParamDist::categorical({0, 1});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = random_search(s, 60, [](const Json& c) {
      return 0.25 * (c.at("a").get<int>() + 2 * c.at("b").get<int>()) + 0.2;
    }, seed);
    EXPECT_DOUBLE_EQ(r.best.macro_f1, 0.95);
  }
}

TEST(RandomSearch, CsvHasOneRowPerTrial) {
  const auto space = dim_space();
  const auto r = random_search(space, 4, [](const Json&) { return 0.5; }, 7);
  const auto csv = r.to_csv(space);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "trial_index,dim,macro_f1,seconds,status,note");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

}  // namespace
}  // namespace olid
