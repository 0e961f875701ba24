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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "olid/artifact.hpp"
#include "olid/dense.hpp"
#include "olid/lexicon.hpp"
#include "olid/vocab.hpp"

namespace olid {

struct EmbeddingConfig {
  int dim = 128;
  int window = 5;  // max context half-width
  int epochs = 15;
  double initial_lr = 0.025;
  int negatives = 5;
  int min_count = 2;
  std::uint64_t seed = 42;

  void validate() const;
  Json to_json() const;
  /// Missing keys keep their defaults.
  static EmbeddingConfig from_json(const Json& j);
};

struct EmbeddingModel {
  Vocabulary vocab;
  MatrixF input_vectors;   // |V| x dim
  MatrixF output_vectors;  // |V| x dim
  EmbeddingConfig config;

  int dim() const noexcept { return static_cast<int>(input_vectors.cols()); }
};

/// Mean negative-sampling loss per (center, context) pair, one entry per epoch.
struct EmbeddingTrainLog {
  std::vector<double> epoch_loss;
};

/// Skip-gram with negative sampling; single-threaded and deterministic under cfg.seed.
EmbeddingModel train_embeddings(std::span<const TokenSeq> corpus, const EmbeddingConfig& cfg,
                                EmbeddingTrainLog* log = nullptr);

double cosine_similarity(const EmbeddingModel& m, const std::string& a, const std::string& b);

enum class PoolingKind { mean, max, min, max_concat_min, mean_concat_max };

PoolingKind parse_pooling(std::string_view s);
std::string_view to_string(PoolingKind p) noexcept;

/// Width of embed_tweet output for a given embedding dimension.
int pooled_dim(PoolingKind p, int dim) noexcept;

/// Pools the rows of `vectors` (one per in-vocabulary token).
VectorD pool_vectors(const MatrixD& vectors, PoolingKind pool, int dim);

/// OOV tokens are skipped; a tweet with none in vocabulary pools to zeros.
VectorD embed_tweet(const TokenSeq& t, const EmbeddingModel& m, PoolingKind pool);

/// [lexicon six-tuple || embedding]
VectorD fuse(const LexiconFeatures& lex, const VectorD& emb);

void save_embeddings(const EmbeddingModel& m, const std::filesystem::path& dir,
                     const Provenance& prov);
EmbeddingModel load_embeddings(const std::filesystem::path& dir);

namespace sgns {

template <class T>
T log_sigmoid(T x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

template <class T>
T sigmoid(T x) {
  return x >= 0 ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

template <class T>
T dot(const T* a, const T* b, int n) {
  T s = 0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

/// -log s(u_ctx . v) - sum_n log s(-u_n . v)
template <class T>
T loss(const T* center, const T* context, std::span<const T* const> negatives, int dim) {
  T l = -log_sigmoid(dot(context, center, dim));
  for (const T* neg : negatives) l -= log_sigmoid(-dot(neg, center, dim));
  return l;
}

/// Analytic gradient of `loss`. Gradients are accumulated (+=) into the
/// outputs, so a negative drawn twice receives both contributions.
template <class T>
void gradient(const T* center, const T* context, std::span<const T* const> negatives, int dim,
              T* g_center, T* g_context, std::span<T* const> g_negatives) {
  const T gp = sigmoid(dot(context, center, dim)) - T(1);
  for (int i = 0; i < dim; ++i) {
    g_center[i] += gp * context[i];
    g_context[i] += gp * center[i];
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const T gn = sigmoid(dot(negatives[k], center, dim));
    for (int i = 0; i < dim; ++i) {
      g_center[i] += gn * negatives[k][i];
      g_negatives[k][i] += gn * center[i];
    }
  }
}

/// One SGD step on a (center, context, negatives) triple using gradients
/// evaluated at the pre-step parameters. Returns the pre-step loss.
template <class T>
T step(T* center, T* context, std::span<T* const> negatives, int dim, T lr,
       std::vector<T>& scratch) {
  scratch.assign(static_cast<std::size_t>(dim) + negatives.size(), T(0));
  T* g_center = scratch.data();
  T* coeff = g_center + dim;
  const T pos_score = dot(context, center, dim);
  T l = -log_sigmoid(pos_score);
  const T gp = sigmoid(pos_score) - T(1);
  for (int i = 0; i < dim; ++i) g_center[i] += gp * context[i];
  // All coefficients before any update: output rows may alias each other.
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const T s = dot(negatives[k], center, dim);
    l -= log_sigmoid(-s);
    coeff[k] = sigmoid(s);
    for (int i = 0; i < dim; ++i) g_center[i] += coeff[k] * negatives[k][i];
  }
  for (int i = 0; i < dim; ++i) context[i] -= lr * gp * center[i];
  for (std::size_t k = 0; k < negatives.size(); ++k)
    for (int i = 0; i < dim; ++i) negatives[k][i] -= lr * coeff[k] * center[i];
  for (int i = 0; i < dim; ++i) center[i] -= lr * g_center[i];
  return l;
}

}  // namespace sgns

}  // namespace olid
