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

// Kim-style sentence CNN: trainable embeddings, parallel 1-D convolutions of
// several widths, ReLU, global max-pool, inverted dropout, dense softmax.
// Templated on the scalar so the same code trains in float and is
// gradient-checked in double.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "olid/artifact.hpp"
#include "olid/dense.hpp"
#include "olid/random.hpp"
#include "olid/vocab.hpp"

namespace olid {

struct CnnConfig {
  int max_len = 100;
  int embed_dim = 256;
  std::vector<int> filter_sizes{3, 4, 5};
  int filters_per_size = 256;  // 768 in total over the three widths
  double dropout = 0.5;
  int batch_size = 30;
  double adam_lr = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_epochs = 100;
  int patience = 10;
  std::uint64_t seed = 42;

  void validate() const;
  Json to_json() const;
  static CnnConfig from_json(const Json& j);
  int feature_width() const noexcept {
    return filters_per_size * static_cast<int>(filter_sizes.size());
  }
};

inline constexpr std::int32_t kPadIndex = 0;
inline constexpr std::int32_t kOovIndex = 1;

template <class T>
struct CnnParams {
  RowMatrix<T> embedding;              // (|vocab| + 2) x embed_dim; row 0 (pad) stays zero
  std::vector<RowMatrix<T>> kernels;   // per width s: filters x (s * embed_dim)
  std::vector<Vector<T>> conv_bias;    // per width: filters
  RowMatrix<T> dense;                  // feature_width x K
  Vector<T> dense_bias;                // K

  /// Flat views over every tensor, in a fixed order.
  std::vector<std::span<T>> tensors();
  std::vector<std::span<const T>> tensors() const;
  std::vector<std::string> tensor_names() const;
  CnnParams zeros_like() const;
  template <class U>
  CnnParams<U> cast() const;
};

template <class T>
struct BasicCnnModel {
  Vocabulary vocab;  // token i of the vocabulary encodes as index i + 2
  CnnConfig config;
  std::vector<std::string> class_names;
  CnnParams<T> params;

  std::size_t num_classes() const noexcept { return class_names.size(); }
  template <class U>
  BasicCnnModel<U> cast() const {
    return {vocab, config, class_names, params.template cast<U>()};
  }
};

using CnnModel = BasicCnnModel<float>;
using TokenIndices = std::vector<std::int32_t>;

/// Right-pads with 0 / truncates to max_len; unknown tokens map to 1.
TokenIndices encode(const TokenSeq& t, const Vocabulary& vocab, int max_len);

/// Random initialization: embeddings U[-0.05, 0.05], Glorot-uniform kernels
/// and dense weights, zero biases.
template <class T>
BasicCnnModel<T> init_cnn(const CnnConfig& cfg, Vocabulary vocab,
                          std::vector<std::string> class_names);

/// Class probabilities for a batch of index sequences (any common length
/// >= the widest filter). `training` enables dropout with a mask drawn from
/// `seed`; `pooled`, when given, receives the concatenated pooled features
/// before dropout.
template <class T>
RowMatrix<T> cnn_forward(const BasicCnnModel<T>& m, std::span<const TokenIndices> batch,
                         bool training, std::uint64_t seed, RowMatrix<T>* pooled = nullptr);

/// Summed cross-entropy over the batch. The summed (not averaged) parameter
/// gradients are added to `grad_sum`, which must be shaped like the model.
/// Dropout is applied when `dropout_rng` is non-null.
template <class T>
T cnn_gradients(const BasicCnnModel<T>& m, std::span<const TokenIndices> batch,
                std::span<const int> labels, CnnParams<T>& grad_sum, Rng* dropout_rng);

/// Adam with bias-corrected moments.
template <class T>
class Adam {
 public:
  Adam(const CnnParams<T>& like, double lr, double beta1, double beta2, double eps);
  /// Uses grads * grad_scale as the gradient.
  void step(CnnParams<T>& params, const CnnParams<T>& grads, double grad_scale = 1.0);
  long long steps() const noexcept { return t_; }

 private:
  CnnParams<T> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  long long t_ = 0;
};

/// Keeps the best score (strict improvement; ties keep the earliest epoch).
class EarlyStopping {
 public:
  explicit EarlyStopping(int patience) : patience_(patience) {}

  /// Records one epoch's score; true if it is a new best.
  bool update(double score);
  bool should_stop() const noexcept { return since_best_ >= patience_; }
  int best_epoch() const noexcept { return best_epoch_; }  // 1-based, 0 before any update
  double best_score() const noexcept { return best_score_; }
  int epochs_seen() const noexcept { return epochs_; }

 private:
  int patience_;
  int epochs_ = 0;
  int best_epoch_ = 0;
  int since_best_ = 0;
  double best_score_ = -1.0;
};

struct TrainTrace {
  std::vector<double> loss;          // mean training loss per epoch
  std::vector<double> val_macro_f1;  // per epoch
  int best_epoch = 0;                // 1-based

  /// `epoch,loss,val_macro_f1`
  std::string to_csv() const;
};

struct CnnData {
  std::span<const TokenSeq> texts;
  std::span<const int> labels;
};

std::pair<CnnModel, TrainTrace> train_cnn(const CnnData& train, const CnnData& val,
                                          const CnnConfig& cfg,
                                          std::vector<std::string> class_names);

MatrixD predict_proba(const CnnModel& m, std::span<const TokenSeq> texts);

struct GradientCheckResult {
  double max_relative_error = 0;
  std::vector<std::pair<std::string, double>> per_tensor;
};

/// Analytic vs central-difference gradients (step 1e-5, 64-bit, dropout off)
/// of the mean batch loss, for every entry of every parameter tensor.
GradientCheckResult gradient_check(const BasicCnnModel<double>& m,
                                   std::span<const TokenIndices> batch,
                                   std::span<const int> labels, double step = 1e-5);

/// Same, on a freshly initialized 64-bit model over `vocab_size` tokens.
GradientCheckResult gradient_check(const CnnConfig& cfg, std::span<const TokenIndices> batch,
                                   std::span<const int> labels, std::size_t vocab_size,
                                   std::size_t num_classes);

void save_cnn(const CnnModel& m, const std::filesystem::path& dir, const Provenance& prov);
CnnModel load_cnn(const std::filesystem::path& dir);

}  // namespace olid
