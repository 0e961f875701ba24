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

// End-to-end text classifier: preprocessing, featurization and model,
// trained and persisted as one unit.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "olid/artifact.hpp"
#include "olid/classic.hpp"
#include "olid/cnn.hpp"
#include "olid/corpus.hpp"
#include "olid/embeddings.hpp"
#include "olid/lexicon.hpp"
#include "olid/metrics.hpp"
#include "olid/ngram.hpp"
#include "olid/textprep.hpp"

namespace olid {

enum class ModelKind { logreg, mlp, random_forest, gradient_boosting, vote, stack, ngram, cnn };
enum class FeatureKind { naive, w2v, fused };

ModelKind parse_model_kind(std::string_view s);
std::string_view to_string(ModelKind k) noexcept;
FeatureKind parse_feature_kind(std::string_view s);
std::string_view to_string(FeatureKind k) noexcept;
bool uses_features(ModelKind k) noexcept;

/// Everything that determines a trained pipeline. JSON schema:
///   task, model, features, pooling, seed, stack_folds,
///   embedding {EmbeddingConfig}, ngram {NgramConfig}, cnn {CnnConfig},
///   classifiers {<logreg|mlp|random_forest|gradient_boosting>: {hyperparameters}},
///   paths {train, trial, test, test_labels, contractions, hate, positive, negative}
/// `seed` overrides the seeds of every nested config.
struct RunConfig {
  Task task = Task::A;
  ModelKind model = ModelKind::logreg;
  FeatureKind features = FeatureKind::fused;
  PoolingKind pooling = PoolingKind::mean;
  std::uint64_t seed = 42;
  int stack_folds = 5;
  EmbeddingConfig embedding;
  NgramConfig ngram;
  CnnConfig cnn;
  Json classifiers = Json::object();
  std::map<std::string, std::string> paths;

  /// Sets the run seed and every nested seed.
  void set_seed(std::uint64_t s);
  /// Classifier spec of one member kind with the configured overrides and seed.
  ClassifierSpec classifier_spec(ClassifierKind kind) const;
  void validate() const;
  Json to_json() const;
  /// Missing keys keep their defaults; unknown top-level keys are config errors.
  static RunConfig from_json(const Json& j);
};

struct TrainSummary {
  std::optional<EvalReport> validation;           // when a validation set was given
  std::optional<double> majority_baseline_f1;     // on the validation set
  std::optional<TrainTrace> cnn_trace;
  std::optional<EmbeddingTrainLog> embedding_log;
  std::vector<std::pair<std::string, double>> member_scores;  // ensemble member selection
};

class Pipeline {
 public:
  /// Trains on `train` (all records feed the embeddings; records labeled for
  /// the task feed the classifier). `val` is used for ensemble member
  /// selection, CNN early stopping and the summary; required for cnn.
  static Pipeline train(const RunConfig& cfg, const Dataset& train, const Dataset* val,
                        TrainSummary* summary = nullptr);

  const RunConfig& config() const noexcept { return cfg_; }
  const std::vector<std::string>& class_names() const { return class_names(cfg_.task); }

  std::vector<TokenSeq> preprocess(const Dataset& d) const;
  /// Lexicon / embedding feature matrix; only for feature-based models.
  MatrixD features(std::span<const TokenSeq> texts) const;
  MatrixD predict_proba(const Dataset& d) const;
  std::vector<int> predict(const Dataset& d) const;

  void save(const std::filesystem::path& dir, const Provenance& prov) const;
  static Pipeline load(const std::filesystem::path& dir);

 private:
  static const std::vector<std::string>& class_names(Task t) { return olid::class_names(t); }

  RunConfig cfg_;
  ContractionTable table_;
  LexiconSet lexicons_;
  std::optional<EmbeddingModel> embeddings_;
  std::shared_ptr<const Model> classifier_;
  std::shared_ptr<const NgramModel> ngram_;
  std::shared_ptr<const CnnModel> cnn_;
};

/// Contraction table and lexicons named in cfg.paths, else the built-in ones.
ContractionTable resolve_contractions(const RunConfig& cfg);
LexiconSet resolve_lexicons(const RunConfig& cfg);

}  // namespace olid
