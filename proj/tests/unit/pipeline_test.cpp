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
#include "olid/metrics.hpp"
#include "olid/pipeline.hpp"
#include "synthetic.hpp"

namespace olid {
namespace {

RunConfig fast_config(ModelKind model, FeatureKind features, Task task = Task::A) {
  RunConfig c;
  c.task = task;
  c.model = model;
  c.features = features;
  c.embedding.dim = 16;
  c.embedding.epochs = 3;
  c.embedding.min_count = 1;
  c.ngram.dim = 20;
  c.ngram.buckets = 10'000;
  c.ngram.epochs = 10;
  c.ngram.word_ngrams = 2;
  c.cnn.max_len = 24;
  c.cnn.embed_dim = 16;
  c.cnn.filters_per_size = 8;
  c.cnn.adam_lr = 1e-3;
  c.cnn.max_epochs = 10;
  c.cnn.patience = 3;
  c.stack_folds = 3;
  c.classifiers = Json{{"random_forest", {{"n_trees", 20}}},
                       {"gradient_boosting", {{"n_stages", 20}}},
                       {"mlp", {{"max_epochs", 50}}}};
  return c;
}

struct Data {
  Dataset train = testing::synthetic_olid(600, 1, "t");
  Dataset val = testing::synthetic_olid(200, 2, "v");
};

const Data& data() {
  static const Data d;
  return d;
}

double val_f1(const Pipeline& p, Task task) {
  const auto val = filter_for_task(data().val, task);
  return macro_f1(confusion(gold_labels(val, task), p.predict(val), class_names(task)));
}

TEST(ModelKind, ParseAndPrint) {
  EXPECT_EQ(parse_model_kind("rf"), ModelKind::random_forest);
  EXPECT_EQ(parse_model_kind("gb"), ModelKind::gradient_boosting);
  EXPECT_EQ(to_string(parse_model_kind("stack")), "stack");
  EXPECT_THROW(parse_model_kind("svm"), Error);
  EXPECT_THROW(parse_feature_kind("bert"), Error);
  EXPECT_FALSE(uses_features(ModelKind::ngram));
  EXPECT_TRUE(uses_features(ModelKind::vote));
}

TEST(RunConfig, JsonRoundTripAndSeed) {
  auto c = fast_config(ModelKind::stack, FeatureKind::w2v, Task::C);
  c.paths["train"] = "x.tsv";
  c.set_seed(7);
  EXPECT_EQ(c.embedding.seed, 7u);
  EXPECT_EQ(c.ngram.seed, 7u);
  EXPECT_EQ(c.cnn.seed, 7u);
  EXPECT_EQ(c.classifier_spec(ClassifierKind::mlp).seed, 7u);
  EXPECT_EQ(RunConfig::from_json(c.to_json()).to_json(), c.to_json());
}

TEST(RunConfig, Errors) {
  auto j = fast_config(ModelKind::logreg, FeatureKind::naive).to_json();
  j["colour"] = "blue";
  try {
    RunConfig::from_json(j);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::config);
  }
  auto c = fast_config(ModelKind::logreg, FeatureKind::naive);
  c.paths["weights"] = "w";
  EXPECT_THROW(c.validate(), Error);
  c = fast_config(ModelKind::logreg, FeatureKind::naive);
  c.classifiers["random_forest"]["n_trees"] = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Pipeline, FeatureWidths) {
  const auto naive = Pipeline::train(fast_config(ModelKind::logreg, FeatureKind::naive),
                                     data().train, nullptr);
  const auto seqs = naive.preprocess(data().val);
  EXPECT_EQ(naive.features(seqs).cols(), 6);
  auto cfg = fast_config(ModelKind::logreg, FeatureKind::fused);
  cfg.pooling = PoolingKind::max_concat_min;
  const auto fused = Pipeline::train(cfg, data().train, nullptr);
  EXPECT_EQ(fused.features(seqs).cols(), 6 + 32);
}

class EveryModel : public ::testing::TestWithParam<std::pair<ModelKind, FeatureKind>> {};

TEST_P(EveryModel, BeatsMajorityBaselineAndSurvivesReload) {
  const auto [model, features] = GetParam();
  const auto cfg = fast_config(model, features);
  TrainSummary s;
  const auto p = Pipeline::train(cfg, data().train, &data().val, &s);
  ASSERT_TRUE(s.validation.has_value());
  ASSERT_TRUE(s.majority_baseline_f1.has_value());
  EXPECT_GT(s.validation->macro_f1, *s.majority_baseline_f1);
  EXPECT_DOUBLE_EQ(val_f1(p, Task::A), s.validation->macro_f1);

  const auto dir = testing::fresh_dir("pipeline_" + std::string(to_string(model)) + "_" +
                                      std::string(to_string(features)));
  p.save(dir, Provenance{"h", cfg.seed, "v"});
  const auto back = Pipeline::load(dir);
  EXPECT_EQ(back.config().to_json(), cfg.to_json());
  EXPECT_EQ(back.predict_proba(data().val), p.predict_proba(data().val));
}

INSTANTIATE_TEST_SUITE_P(
    Models, EveryModel,
    ::testing::Values(std::pair{ModelKind::logreg, FeatureKind::naive},
                      std::pair{ModelKind::mlp, FeatureKind::w2v},
                      std::pair{ModelKind::random_forest, FeatureKind::fused},
                      std::pair{ModelKind::gradient_boosting, FeatureKind::fused},
                      std::pair{ModelKind::vote, FeatureKind::fused},
                      std::pair{ModelKind::stack, FeatureKind::naive},
                      std::pair{ModelKind::ngram, FeatureKind::fused},
                      std::pair{ModelKind::cnn, FeatureKind::fused}),
    [](const auto& info) {
      return std::string(to_string(info.param.first)) + "_" + std::string(to_string(info.param.second));
    });

TEST(Pipeline, EnsembleKeepsThreeMembers) {
  TrainSummary s;
  Pipeline::train(fast_config(ModelKind::vote, FeatureKind::naive), data().train, &data().val, &s);
  EXPECT_EQ(s.member_scores.size(), 4u);
}

TEST(Pipeline, SubtasksUseTheirOwnRecords) {
  for (const auto task : {Task::B, Task::C}) {
    TrainSummary s;
    const auto p = Pipeline::train(fast_config(ModelKind::logreg, FeatureKind::naive, task),
                                   data().train, &data().val, &s);
    EXPECT_EQ(p.class_names(), class_names(task));
    EXPECT_EQ(s.validation->confusion.total(),
              static_cast<std::int64_t>(filter_for_task(data().val, task).size()));
  }
}

TEST(Pipeline, CnnNeedsValidation) {
  EXPECT_THROW(Pipeline::train(fast_config(ModelKind::cnn, FeatureKind::fused), data().train,
                               nullptr),
               Error);
}

TEST(Pipeline, DeterministicPredictions) {
  const auto cfg = fast_config(ModelKind::mlp, FeatureKind::fused);
  const auto a = Pipeline::train(cfg, data().train, &data().val);
  const auto b = Pipeline::train(cfg, data().train, &data().val);
  EXPECT_EQ(a.predict_proba(data().val), b.predict_proba(data().val));
}

}  // namespace
}  // namespace olid
