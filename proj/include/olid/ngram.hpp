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
#include <string>
#include <vector>

#include "olid/artifact.hpp"
#include "olid/dense.hpp"
#include "olid/vocab.hpp"

namespace olid {

struct NgramConfig {
  int dim = 100;
  int word_ngrams = 1;
  int epochs = 5;
  double lr = 0.1;
  int min_count = 1;
  std::int64_t buckets = 2'000'000;  // hash range for n >= 2
  int window = 5;  // accepted and recorded; bag-of-n-grams training does not use it
  std::uint64_t seed = 42;

  void validate() const;
  Json to_json() const;
  static NgramConfig from_json(const Json& j);
};

/// Averaged hashed word-n-gram embeddings into a linear softmax.
///
/// The input table conceptually has |vocab| + buckets rows. Only rows for
/// buckets seen in training are stored; every other bucket row still holds
/// its deterministic initial value, regenerated on demand from (seed, row).
struct NgramModel {
  Vocabulary vocab;
  NgramConfig config;
  std::vector<std::string> class_names;
  MatrixF input;                          // (|vocab| + stored buckets) x dim
  std::vector<std::int64_t> bucket_ids;   // sorted; bucket_ids[j] lives in input row |vocab| + j
  MatrixF output;                         // K x dim

  std::size_t num_classes() const noexcept { return class_names.size(); }
};

/// Unigram ids of in-vocab tokens, then for k = 2..n every contiguous k-gram
/// hashed (FNV-1a over the space-joined tokens) into [|vocab|, |vocab| + buckets).
std::vector<std::int64_t> extract_ngrams(const TokenSeq& t, int n, const Vocabulary& vocab,
                                         std::int64_t buckets);

/// Initial value of input row `row` (uniform in [-1/dim, 1/dim]).
void ngram_initial_row(std::uint64_t seed, std::int64_t row, int dim, float* out);

struct LabeledTokens {
  std::span<const TokenSeq> texts;
  std::span<const int> labels;
};

NgramModel train_supervised(const LabeledTokens& corpus, const NgramConfig& cfg,
                            std::vector<std::string> class_names);

/// Softmax over classes for one tweet.
VectorD predict(const NgramModel& m, const TokenSeq& t);
/// As above; config error unless n equals the trained word_ngrams.
VectorD predict(const NgramModel& m, const TokenSeq& t, int n);
MatrixD predict_proba(const NgramModel& m, std::span<const TokenSeq> texts);

void save_ngram(const NgramModel& m, const std::filesystem::path& dir, const Provenance& prov);
NgramModel load_ngram(const std::filesystem::path& dir);

namespace ngram_kernel {

/// Cross-entropy of softmax(output * mean(rows)) against `label`.
/// Fills grad_output (K x dim) and grad_hidden (dim); each input row's
/// gradient is grad_hidden / rows.size().
template <class T>
T loss_and_gradient(std::span<const T* const> rows, const T* output, int K, int dim, int label,
                    T* grad_output, T* grad_hidden, std::vector<T>& scratch) {
  scratch.assign(static_cast<std::size_t>(dim + K), T(0));
  T* hidden = scratch.data();
  T* prob = hidden + dim;
  if (!rows.empty()) {
    for (const T* r : rows)
      for (int i = 0; i < dim; ++i) hidden[i] += r[i];
    const T inv = T(1) / static_cast<T>(rows.size());
    for (int i = 0; i < dim; ++i) hidden[i] *= inv;
  }
  T mx = -INFINITY;
  for (int k = 0; k < K; ++k) {
    T s = 0;
    for (int i = 0; i < dim; ++i) s += output[k * dim + i] * hidden[i];
    prob[k] = s;
    mx = std::max(mx, s);
  }
  T z = 0;
  for (int k = 0; k < K; ++k) z += std::exp(prob[k] - mx);
  const T loss = -(prob[label] - mx - std::log(z));
  for (int k = 0; k < K; ++k) prob[k] = std::exp(prob[k] - mx) / z;
  if (grad_output || grad_hidden) {
    if (grad_hidden)
      for (int i = 0; i < dim; ++i) grad_hidden[i] = 0;
    for (int k = 0; k < K; ++k) {
      const T g = prob[k] - (k == label ? T(1) : T(0));
      for (int i = 0; i < dim; ++i) {
        if (grad_output) grad_output[k * dim + i] = g * hidden[i];
        if (grad_hidden) grad_hidden[i] += g * output[k * dim + i];
      }
    }
  }
  return loss;
}

/// One SGD step on a single example. Rows may repeat (each occurrence is
/// updated); a featureless example leaves every parameter unchanged.
template <class T>
T sgd_step(std::span<T* const> rows, T* output, int K, int dim, int label, T lr,
           std::vector<T>& scratch, std::vector<T>& grads) {
  grads.assign(static_cast<std::size_t>(K * dim + dim), T(0));
  T* g_out = grads.data();
  T* g_hidden = g_out + K * dim;
  const T loss = loss_and_gradient<T>(
      std::span<const T* const>(const_cast<const T* const*>(rows.data()), rows.size()), output, K,
      dim, label, g_out, g_hidden, scratch);
  for (int j = 0; j < K * dim; ++j) output[j] -= lr * g_out[j];
  if (!rows.empty()) {
    const T scale = lr / static_cast<T>(rows.size());
    for (T* r : rows)
      for (int i = 0; i < dim; ++i) r[i] -= scale * g_hidden[i];
  }
  return loss;
}

}  // namespace ngram_kernel

}  // namespace olid
