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

#include "olid/ngram.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "olid/error.hpp"
#include "olid/random.hpp"

namespace olid {

void NgramConfig::validate() const {
  require(dim >= 1, ErrorCategory::config, "ngram dim must be >= 1");
  require(word_ngrams >= 1 && word_ngrams <= 5, ErrorCategory::config,
          "ngram word_ngrams must be in [1, 5]");
  require(epochs >= 1, ErrorCategory::config, "ngram epochs must be >= 1");
  require(lr > 0 && std::isfinite(lr), ErrorCategory::config, "ngram lr must be positive");
  require(min_count >= 1, ErrorCategory::config, "ngram min_count must be >= 1");
  require(buckets >= 10'000 && buckets <= 2'147'483'647, ErrorCategory::config,
          "ngram buckets must be in [1e4, 2^31)");
  require(window >= 1, ErrorCategory::config, "ngram window must be >= 1");
}

Json NgramConfig::to_json() const {
  return Json{{"dim", dim},         {"word_ngrams", word_ngrams}, {"epochs", epochs},
              {"lr", lr},           {"min_count", min_count},     {"buckets", buckets},
              {"window", window},   {"seed", seed}};
}

NgramConfig NgramConfig::from_json(const Json& j) {
  NgramConfig c;
  c.dim = j.value("dim", c.dim);
  c.word_ngrams = j.value("word_ngrams", c.word_ngrams);
  c.epochs = j.value("epochs", c.epochs);
  c.lr = j.value("lr", c.lr);
  c.min_count = j.value("min_count", c.min_count);
  c.buckets = j.value("buckets", c.buckets);
  c.window = j.value("window", c.window);
  c.seed = j.value("seed", c.seed);
  return c;
}

std::vector<std::int64_t> extract_ngrams(const TokenSeq& t, int n, const Vocabulary& vocab,
                                         std::int64_t buckets) {
  std::vector<std::int64_t> ids;
  for (const auto& tok : t.tokens)
    if (const auto id = vocab.find(tok)) ids.push_back(*id);
  const auto V = static_cast<std::int64_t>(vocab.size());
  const auto len = t.tokens.size();
  std::string joined;
  for (int k = 2; k <= n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    for (std::size_t start = 0; start + kk <= len; ++start) {
      joined = t.tokens[start];
      for (std::size_t j = 1; j < kk; ++j) {
        joined += ' ';
        joined += t.tokens[start + j];
      }
      ids.push_back(V + static_cast<std::int64_t>(fnv1a64(joined) %
                                                  static_cast<std::uint64_t>(buckets)));
    }
  }
  return ids;
}

void ngram_initial_row(std::uint64_t seed, std::int64_t row, int dim, float* out) {
  std::uint64_t state = seed ^ (static_cast<std::uint64_t>(row) * 0xD1B54A32D192ED03ULL);
  splitmix64(state);
  const double bound = 1.0 / dim;
  for (int i = 0; i < dim; ++i) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    out[i] = static_cast<float>(-bound + 2.0 * bound * u);
  }
}

namespace {

// Input row for a feature id, or nullptr for a bucket that was never stored.
const float* stored_row(const NgramModel& m, std::int64_t id) {
  const auto V = static_cast<std::int64_t>(m.vocab.size());
  if (id < V) return m.input.row(id).data();
  const auto it = std::lower_bound(m.bucket_ids.begin(), m.bucket_ids.end(), id - V);
  if (it == m.bucket_ids.end() || *it != id - V) return nullptr;
  return m.input.row(V + (it - m.bucket_ids.begin())).data();
}

}  // namespace

NgramModel train_supervised(const LabeledTokens& corpus, const NgramConfig& cfg,
                            std::vector<std::string> class_names) {
  cfg.validate();
  if (corpus.texts.empty()) fail(ErrorCategory::data, "ngram training corpus is empty");
  if (corpus.texts.size() != corpus.labels.size())
    fail(ErrorCategory::data, "ngram corpus: texts and labels differ in length");
  const auto K = static_cast<int>(class_names.size());
  if (K < 2) fail(ErrorCategory::data, "ngram model needs at least two classes");
  std::vector<bool> present(static_cast<std::size_t>(K), false);
  for (int l : corpus.labels) {
    if (l < 0 || l >= K) fail(ErrorCategory::data, "ngram corpus: label out of range");
    present[static_cast<std::size_t>(l)] = true;
  }
  for (int k = 0; k < K; ++k)
    if (!present[static_cast<std::size_t>(k)])
      fail(ErrorCategory::data, "class " + class_names[static_cast<std::size_t>(k)] +
                                    " has no training example");

  NgramModel m;
  m.config = cfg;
  m.class_names = std::move(class_names);
  m.vocab = Vocabulary::build(corpus.texts, cfg.min_count);
  const auto V = static_cast<std::int64_t>(m.vocab.size());
  const int dim = cfg.dim;

  std::vector<std::vector<std::int64_t>> features;
  features.reserve(corpus.texts.size());
  std::vector<std::int64_t> buckets;
  for (const auto& t : corpus.texts) {
    features.push_back(extract_ngrams(t, cfg.word_ngrams, m.vocab, cfg.buckets));
    for (auto id : features.back())
      if (id >= V) buckets.push_back(id - V);
  }
  std::sort(buckets.begin(), buckets.end());
  buckets.erase(std::unique(buckets.begin(), buckets.end()), buckets.end());
  m.bucket_ids = std::move(buckets);

  const auto rows = V + static_cast<std::int64_t>(m.bucket_ids.size());
  m.input.resize(rows, dim);
  for (std::int64_t r = 0; r < V; ++r) ngram_initial_row(cfg.seed, r, dim, m.input.row(r).data());
  for (std::size_t j = 0; j < m.bucket_ids.size(); ++j)
    ngram_initial_row(cfg.seed, V + m.bucket_ids[j], dim,
                      m.input.row(V + static_cast<std::int64_t>(j)).data());
  m.output = MatrixF::Zero(K, dim);

  // Feature ids -> stored row pointers, resolved once.
  std::vector<std::vector<float*>> example_rows(features.size());
  for (std::size_t e = 0; e < features.size(); ++e) {
    example_rows[e].reserve(features[e].size());
    for (auto id : features[e]) example_rows[e].push_back(const_cast<float*>(stored_row(m, id)));
  }

  Rng rng = make_rng(cfg.seed, 1);
  std::vector<std::size_t> order(features.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const double total = static_cast<double>(cfg.epochs) * static_cast<double>(order.size());
  std::size_t step = 0;
  std::vector<float> scratch, grads;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    olid::shuffle(order.begin(), order.end(), rng);
    for (const auto e : order) {
      const auto lr = static_cast<float>(cfg.lr * (1.0 - static_cast<double>(step++) / total));
      ngram_kernel::sgd_step<float>(example_rows[e], m.output.data(), K, dim, corpus.labels[e], lr,
                                    scratch, grads);
    }
  }
  if (!m.input.allFinite() || !m.output.allFinite())
    fail(ErrorCategory::data, "ngram training diverged (non-finite weights); lower the lr");
  return m;
}

VectorD predict(const NgramModel& m, const TokenSeq& t) {
  const int dim = m.config.dim;
  const auto ids = extract_ngrams(t, m.config.word_ngrams, m.vocab, m.config.buckets);
  VectorD hidden = VectorD::Zero(dim);
  std::vector<float> virtual_row(static_cast<std::size_t>(dim));
  for (auto id : ids) {
    const float* row = stored_row(m, id);
    if (!row) {
      ngram_initial_row(m.config.seed, id, dim, virtual_row.data());
      row = virtual_row.data();
    }
    for (int i = 0; i < dim; ++i) hidden[i] += row[i];
  }
  if (!ids.empty()) hidden /= static_cast<double>(ids.size());
  const VectorD scores = m.output.cast<double>() * hidden;
  return softmax<double>(scores);
}

VectorD predict(const NgramModel& m, const TokenSeq& t, int n) {
  if (n != m.config.word_ngrams)
    fail(ErrorCategory::config, "model was trained with word_ngrams=" +
                                    std::to_string(m.config.word_ngrams) + ", not " +
                                    std::to_string(n));
  return predict(m, t);
}

MatrixD predict_proba(const NgramModel& m, std::span<const TokenSeq> texts) {
  MatrixD out(static_cast<Eigen::Index>(texts.size()), static_cast<Eigen::Index>(m.num_classes()));
  for (std::size_t i = 0; i < texts.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = predict(m, texts[i]).transpose();
  return out;
}

void save_ngram(const NgramModel& m, const std::filesystem::path& dir, const Provenance& prov) {
  ArtifactWriter w(dir, "ngram_linear");
  w.meta()["config"] = m.config.to_json();
  w.meta()["class_names"] = m.class_names;
  w.meta()["provenance"] = to_json(prov);
  w.meta()["vocab"] = m.vocab.to_json();
  w.put("input", m.input);
  w.put("bucket_ids", std::vector<std::int32_t>(m.bucket_ids.begin(), m.bucket_ids.end()));
  w.put("output", m.output);
  w.finish();
}

NgramModel load_ngram(const std::filesystem::path& dir) {
  ArtifactReader r(dir, "ngram_linear");
  NgramModel m;
  m.config = NgramConfig::from_json(r.meta().at("config"));
  m.config.validate();
  m.class_names = r.meta().at("class_names").get<std::vector<std::string>>();
  m.vocab = Vocabulary::from_json(r.meta().at("vocab"));
  m.input = r.matrix_f32("input");
  const auto ids = r.ints("bucket_ids");
  m.bucket_ids.assign(ids.begin(), ids.end());
  m.output = r.matrix_f32("output");
  if (m.input.rows() != static_cast<Eigen::Index>(m.vocab.size() + m.bucket_ids.size()) ||
      m.input.cols() != m.config.dim || m.output.cols() != m.config.dim ||
      m.output.rows() != static_cast<Eigen::Index>(m.class_names.size()) ||
      !std::is_sorted(m.bucket_ids.begin(), m.bucket_ids.end()))
    fail(ErrorCategory::parse, "ngram model arrays are inconsistent in " + dir.string());
  return m;
}

}  // namespace olid
