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

#include "olid/corpus.hpp"
#include "olid/error.hpp"
#include "synthetic.hpp"

namespace olid {
namespace {

constexpr const char* kHeader = "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n";

template <class F>
ErrorCategory category_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.category();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCategory::io;
}

template <class F>
std::string message_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

TEST(TrainingFile, MapsFieldsDirectly) {
  const auto d = parse_olid_training(std::string(kHeader) + "t1\tyou are all awful\tOFF\tTIN\tGRP\n");
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].id, "t1");
  EXPECT_EQ(d[0].raw_text, "you are all awful");
  EXPECT_EQ(d[0].labels->task_a, OffenseLabel::OFF);
  EXPECT_EQ(d[0].labels->task_b, TargetLabel::TIN);
  EXPECT_EQ(d[0].labels->task_c, TargetType::GRP);
}

TEST(TrainingFile, NullMeansAbsentInAnyCase) {
  const auto d = parse_olid_training(std::string(kHeader) +
                                     "t2\tnice day\tNOT\tNULL\tNULL\n"
                                     "t3\tok\tNOT\tnull\tNull\n");
  ASSERT_EQ(d.size(), 2u);
  for (const auto& r : d.records()) {
    EXPECT_EQ(r.labels->task_a, OffenseLabel::NOT);
    EXPECT_FALSE(r.labels->task_b);
    EXPECT_FALSE(r.labels->task_c);
  }
}

TEST(TrainingFile, WrongColumnCountReportsLine) {
  const auto bad = std::string(kHeader) + "t1\tfine\tNOT\tNULL\tNULL\nt2\tbroken\tNOT\n";
  EXPECT_EQ(category_of([&] { parse_olid_training(bad); }), ErrorCategory::parse);
  EXPECT_NE(message_of([&] { parse_olid_training(bad); }).find("line 3"), std::string::npos);
}

TEST(TrainingFile, HierarchyViolationNamesRecord) {
  const auto bad = std::string(kHeader) + "t7\tnice\tNOT\tTIN\tNULL\n";
  EXPECT_EQ(category_of([&] { parse_olid_training(bad); }), ErrorCategory::validation);
  EXPECT_NE(message_of([&] { parse_olid_training(bad); }).find("t7"), std::string::npos);
  const auto bad_c = std::string(kHeader) + "t8\tx\tOFF\tUNT\tIND\n";
  EXPECT_EQ(category_of([&] { parse_olid_training(bad_c); }), ErrorCategory::validation);
}

TEST(TrainingFile, DuplicateIdsRejected) {
  const auto bad = std::string(kHeader) + "t1\ta\tNOT\tNULL\tNULL\nt1\tb\tNOT\tNULL\tNULL\n";
  EXPECT_EQ(category_of([&] { parse_olid_training(bad); }), ErrorCategory::validation);
}

TEST(TrainingFile, InvalidUtf8IsParseError) {
  const auto bad = std::string(kHeader) + "t1\tbad \xC3\x28 byte\tNOT\tNULL\tNULL\n";
  EXPECT_EQ(category_of([&] { parse_olid_training(bad); }), ErrorCategory::parse);
}

TEST(TrainingFile, MissingHeaderRejected) {
  EXPECT_EQ(category_of([] { parse_olid_training("t1\ta\tNOT\tNULL\tNULL\n"); }),
            ErrorCategory::parse);
  EXPECT_EQ(category_of([] { parse_olid_training(""); }), ErrorCategory::parse);
}

TEST(TrainingFile, ParsingIsDeterministic) {
  const auto tsv = testing::to_training_tsv(testing::synthetic_olid(200, 5, "p"));
  EXPECT_EQ(parse_olid_training(tsv), parse_olid_training(tsv));
}

TEST(TrainingFile, SyntheticRoundTrip) {
  const auto d = testing::synthetic_olid(300, 9, "r");
  const auto back = parse_olid_training(testing::to_training_tsv(d));
  EXPECT_EQ(back.records(), d.records());
}

TEST(TrainingFile, HierarchyCountsHold) {
  const auto d = testing::synthetic_olid(1000, 3, "h");
  std::size_t off = 0, b = 0, tin = 0, c = 0;
  for (const auto& r : d.records()) {
    off += r.labels->task_a == OffenseLabel::OFF;
    b += r.labels->task_b.has_value();
    tin += r.labels->task_b == TargetLabel::TIN;
    c += r.labels->task_c.has_value();
  }
  EXPECT_LE(b, off);
  EXPECT_LE(c, tin);
}

TEST(TestSet, SingleJoin) {
  const auto d = parse_test_set("id\ttweet\nx1\thi\n", "x1,NOT\n", Task::A);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d.split(), SplitTag::test);
  EXPECT_EQ(d[0].labels->task_a, OffenseLabel::NOT);
}

TEST(TestSet, MissingTweetIsJoinErrorNamingId) {
  const auto f = [] { parse_test_set("id\ttweet\nx1\thi\n", "x1,NOT\nx9,OFF\n", Task::A); };
  EXPECT_EQ(category_of(f), ErrorCategory::join);
  EXPECT_NE(message_of(f).find("x9"), std::string::npos);
}

TEST(TestSet, MissingLabelIsJoinError) {
  const auto f = [] { parse_test_set("id\ttweet\nx1\thi\nx2\tyo\n", "x1,NOT\n", Task::A); };
  EXPECT_EQ(category_of(f), ErrorCategory::join);
  EXPECT_NE(message_of(f).find("x2"), std::string::npos);
}

TEST(TestSet, ProjectsOntoNamedTask) {
  const auto d = parse_test_set("id\ttweet\nx1\ta\nx2\tb\n", "x1,TIN\nx2,UNT\n", Task::B);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].labels->task_b, TargetLabel::TIN);
  EXPECT_EQ(d[1].labels->task_b, TargetLabel::UNT);
  EXPECT_FALSE(d[0].labels->task_a);
  EXPECT_FALSE(d[0].labels->task_c);
  EXPECT_EQ(gold_labels(d, Task::B), (std::vector<int>{0, 1}));
}

TEST(TestSet, LabelOutsideTaskRejected) {
  EXPECT_EQ(category_of([] { parse_test_set("id\ttweet\nx1\ta\n", "x1,GRP\n", Task::A); }),
            ErrorCategory::parse);
}

TEST(FilterForTask, KeepsRecordsLabeledForTheTask) {
  std::vector<TweetRecord> recs;
  for (int i = 0; i < 10; ++i) {
    TaskLabel l;
    l.task_a = i < 4 ? OffenseLabel::OFF : OffenseLabel::NOT;
    if (i < 4) l.task_b = TargetLabel::TIN;
    recs.push_back({"r" + std::to_string(i), "x", l});
  }
  const Dataset d(recs, SplitTag::train);
  EXPECT_EQ(filter_for_task(d, Task::B).size(), 4u);
  EXPECT_EQ(filter_for_task(d, Task::A), d);
  EXPECT_TRUE(filter_for_task(d, Task::C).empty());
}

TEST(FilterForTask, AllNotYieldsEmptyB) {
  const Dataset d({{"a", "x", TaskLabel{OffenseLabel::NOT, {}, {}}},
                   {"b", "y", TaskLabel{OffenseLabel::NOT, {}, {}}}},
                  SplitTag::train);
  EXPECT_TRUE(filter_for_task(d, Task::B).empty());
}

TEST(FilterForTask, Idempotent) {
  const auto d = testing::synthetic_olid(400, 11, "f");
  for (const auto t : {Task::A, Task::B, Task::C}) {
    const auto once = filter_for_task(d, t);
    EXPECT_EQ(filter_for_task(once, t), once);
  }
}

TEST(Labels, ClassOrders) {
  EXPECT_EQ(class_names(Task::A), (std::vector<std::string>{"NOT", "OFF"}));
  EXPECT_EQ(class_names(Task::B), (std::vector<std::string>{"TIN", "UNT"}));
  EXPECT_EQ(class_names(Task::C), (std::vector<std::string>{"IND", "GRP", "OTH"}));
  EXPECT_EQ(parse_task("b"), Task::B);
  EXPECT_EQ(category_of([] { parse_task("D"); }), ErrorCategory::config);
}

}  // namespace
}  // namespace olid
