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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "olid/artifact.hpp"
#include "olid/dense.hpp"

namespace olid {

/// Design matrix with integer class labels.
struct LabeledMatrix {
  MatrixD features;  // n x d
  std::vector<int> labels;
  std::vector<std::string> class_names;

  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::size_t rows() const noexcept { return labels.size(); }
  /// n >= 1, labels in range, features finite, shapes consistent.
  void validate() const;
  LabeledMatrix subset(std::span<const std::size_t> rows) const;
};

// Hyperparameter records. Defaults mirror the usual library defaults.

struct LogRegParams {
  double l2 = 1.0;  // weight of 0.5*||W||^2 against the summed cross-entropy
  int max_iter = 1000;
  double tol = 1e-5;  // gradient infinity-norm, on the per-example objective
};

struct MlpParams {
  int hidden = 100;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int batch_size = 200;
  int max_epochs = 200;
  double tol = 1e-4;
  int n_iter_no_change = 10;
};

struct ForestParams {
  int n_trees = 100;
  int max_features = 0;  // 0 = floor(sqrt(d))
  bool bootstrap = true;
  int min_samples_split = 2;
  int max_depth = 0;  // 0 = unlimited
};

struct BoostingParams {
  int n_stages = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  int min_samples_split = 2;
};

enum class ClassifierKind { logreg, mlp, random_forest, gradient_boosting };

ClassifierKind parse_classifier_kind(std::string_view s);
std::string_view to_string(ClassifierKind k) noexcept;

using Hyperparameters = std::variant<LogRegParams, MlpParams, ForestParams, BoostingParams>;

struct ClassifierSpec {
  Hyperparameters hyper;
  std::uint64_t seed = 42;

  ClassifierKind kind() const noexcept { return static_cast<ClassifierKind>(hyper.index()); }
  static ClassifierSpec defaults(ClassifierKind kind, std::uint64_t seed = 42);
  /// Throws config error for out-of-range values.
  void validate() const;
  Json to_json() const;
  static ClassifierSpec from_json(const Json& j);
};

/// Per-column z-score; zero-variance columns keep scale 1.
struct Standardizer {
  VectorD mean;
  VectorD scale;

  static Standardizer fit(const MatrixD& x);
  MatrixD apply(const MatrixD& x) const;
};

struct LogRegState {
  Standardizer standardizer;
  MatrixD weights;  // K x d
  VectorD bias;     // K
};

struct MlpWeights {
  MatrixD w1;  // d x H
  VectorD b1;
  MatrixD w2;  // H x K
  VectorD b2;
};

struct MlpState {
  Standardizer standardizer;
  MlpWeights weights;
  std::vector<double> loss_curve;
};

/// Flat binary tree. Leaves have feature == -1; `value` holds K class
/// fractions (classification) or a single output (regression) per node.
struct Tree {
  std::vector<std::int32_t> feature;
  std::vector<double> threshold;  // go left when x[feature] <= threshold
  std::vector<std::int32_t> left;
  std::vector<std::int32_t> right;
  MatrixD value;  // nodes x outputs

  std::size_t node_count() const noexcept { return feature.size(); }
  /// Leaf index reached by one feature row.
  std::int32_t leaf(const double* x) const;
};

struct ForestState {
  std::vector<Tree> trees;
};

struct BoostingState {
  VectorD init;                          // K prior log-odds
  std::vector<std::vector<Tree>> stages;  // stages x K regression trees
  double learning_rate = 0.1;
  std::vector<double> train_loss;  // mean log-loss after init and after each stage
};

class Model;

struct VoteState {
  std::vector<Model> members;
};

struct StackState {
  std::vector<Model> members;
  std::shared_ptr<const Model> meta;  // logreg over concatenated member probabilities
};

/// Trained classifier with a uniform probability interface. Immutable.
class Model {
 public:
  using State =
      std::variant<LogRegState, MlpState, ForestState, BoostingState, VoteState, StackState>;

  Model(State state, std::vector<std::string> class_names, int num_features);

  /// "logreg", "mlp", "random_forest", "gradient_boosting", "vote" or "stack".
  std::string_view kind_name() const noexcept;
  const std::vector<std::string>& class_names() const noexcept { return class_names_; }
  std::size_t num_classes() const noexcept { return class_names_.size(); }
  int num_features() const noexcept { return num_features_; }
  const State& state() const noexcept { return state_; }

  /// n x K, rows are distributions in class_names order. Dimension error on width mismatch.
  MatrixD predict_proba(const MatrixD& features) const;
  std::vector<int> predict(const MatrixD& features) const;

 private:
  State state_;
  std::vector<std::string> class_names_;
  int num_features_ = 0;
};

/// Single-class data and non-finite features are data errors.
Model train(const ClassifierSpec& spec, const LabeledMatrix& data);

/// Unweighted mean of member probability matrices.
MatrixD soft_vote(std::span<const Model> models, const MatrixD& features);

/// Soft-voting ensemble wrapped as a Model.
Model make_vote(std::vector<Model> members);

/// Stratified out-of-fold stacking with a logistic-regression meta-learner.
Model train_stacked(std::span<const ClassifierSpec> member_specs, const LabeledMatrix& data,
                    int folds, std::uint64_t seed);

/// Stratified fold assignment (seeded shuffle within each class, dealt
/// round-robin). Data error if some class has fewer than `folds` examples.
std::vector<int> stratified_folds(std::span<const int> labels, std::size_t num_classes,
                                  int folds, std::uint64_t seed);

/// Row argmax of a probability matrix.
std::vector<int> argmax_rows(const MatrixD& proba);

void save_model(const Model& m, const std::filesystem::path& dir, const Provenance& prov);
Model load_model(const std::filesystem::path& dir);

namespace logreg {
/// Objective (mean cross-entropy + 0.5*l2/n*||W||^2) and its gradient.
double objective(const MatrixD& x, std::span<const int> y, const MatrixD& w, const VectorD& b,
                 double l2, MatrixD* grad_w, VectorD* grad_b);
}  // namespace logreg

namespace mlp {
/// Mean cross-entropy of a one-hidden-layer ReLU network; fills `grad` when non-null.
double loss(const MlpWeights& w, const MatrixD& x, std::span<const int> y, MlpWeights* grad);
}  // namespace mlp

namespace trees {
/// Gini classification tree on the (possibly repeated) rows in `sample`.
Tree grow_classifier(const MatrixD& x, std::span<const int> y, std::size_t num_classes,
                     std::vector<std::size_t> sample, const ForestParams& p, std::uint64_t seed);
}  // namespace trees

}  // namespace olid
