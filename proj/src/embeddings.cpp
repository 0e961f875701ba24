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

#include "olid/embeddings.hpp"

#include <algorithm>
#include <cmath>

#include "olid/error.hpp"
#include "olid/random.hpp"

namespace olid {

void EmbeddingConfig::validate() const {
  require(dim >= 2, ErrorCategory::config, "embedding dim must be >= 2");
  require(window >= 1, ErrorCategory::config, "embedding window must be >= 1");
  require(epochs >= 1, ErrorCategory::config, "embedding epochs must be >= 1");
  require(initial_lr > 0 && std::isfinite(initial_lr), ErrorCategory::config,
          "embedding initial_lr must be positive");
  require(negatives >= 1, ErrorCategory::config, "embedding negatives must be >= 1");
  require(min_count >= 1, ErrorCategory::config, "embedding min_count must be >= 1");
}

Json EmbeddingConfig::to_json() const {
  return Json{{"dim", dim},           {"window", window},       {"epochs", epochs},
              {"initial_lr", initial_lr}, {"negatives", negatives}, {"min_count", min_count},
              {"seed", seed}};
}

EmbeddingConfig EmbeddingConfig::from_json(const Json& j) {
  EmbeddingConfig c;
  c.dim = j.value("dim", c.dim);
  c.window = j.value("window", c.window);
  c.epochs = j.value("epochs", c.epochs);
  c.initial_lr = j.value("initial_lr", c.initial_lr);
  c.negatives = j.value("negatives", c.negatives);
  c.min_count = j.value("min_count", c.min_count);
  c.seed = j.value("seed", c.seed);
  return c;
}

namespace {

// Cumulative unigram^0.75 distribution for negative draws.
class NoiseSampler {
 public:
  explicit NoiseSampler(const Vocabulary& v) : cumulative_(v.size()) {
    double total = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      total += std::pow(static_cast<double>(v.frequency(i)), 0.75);
      cumulative_[i] = total;
    }
  }

  std::int32_t draw(Rng& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return static_cast<std::int32_t>(std::min<std::ptrdiff_t>(
        it - cumulative_.begin(), static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
  }

 private:
  std::vector<double> cumulative_;
};

}  // namespace

EmbeddingModel train_embeddings(std::span<const TokenSeq> corpus, const EmbeddingConfig& cfg,
                                EmbeddingTrainLog* log) {
  cfg.validate();
  if (corpus.empty()) fail(ErrorCategory::data, "embedding corpus is empty");

  EmbeddingModel m;
  m.config = cfg;
  m.vocab = Vocabulary::build(corpus, cfg.min_count);
  if (m.vocab.empty())
    fail(ErrorCategory::data, "no token reaches min_count=" + std::to_string(cfg.min_count));

  const auto V = static_cast<Eigen::Index>(m.vocab.size());
  const int dim = cfg.dim;
  Rng rng = make_rng(cfg.seed);

  m.input_vectors.resize(V, dim);
  const double half = 0.5 / dim;
  for (Eigen::Index i = 0; i < m.input_vectors.size(); ++i)
    m.input_vectors.data()[i] = static_cast<float>(uniform(rng, -half, half));
  m.output_vectors = MatrixF::Zero(V, dim);

  // Sentences as index lists; tokens under min_count are dropped before windowing.
  std::vector<std::vector<std::int32_t>> sentences;
  sentences.reserve(corpus.size());
  std::size_t total_tokens = 0;
  for (const auto& seq : corpus) {
    std::vector<std::int32_t> ids;
    for (const auto& tok : seq.tokens)
      if (auto id = m.vocab.find(tok)) ids.push_back(*id);
    total_tokens += ids.size();
    sentences.push_back(std::move(ids));
  }

  const NoiseSampler noise(m.vocab);
  const double total_steps = static_cast<double>(cfg.epochs) * static_cast<double>(total_tokens);
  const double final_lr = cfg.initial_lr * 1e-4;
  std::size_t step = 0;

  std::vector<float*> negs;
  std::vector<float> scratch;
  negs.reserve(static_cast<std::size_t>(cfg.negatives));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0;
    std::size_t pairs = 0;
    for (const auto& ids : sentences) {
      const auto n = static_cast<std::ptrdiff_t>(ids.size());
      for (std::ptrdiff_t i = 0; i < n; ++i, ++step) {
        const double progress = static_cast<double>(step) / std::max(1.0, total_steps);
        const auto lr = static_cast<float>(cfg.initial_lr + (final_lr - cfg.initial_lr) * progress);
        const auto b = static_cast<std::ptrdiff_t>(
            1 + uniform_index(rng, static_cast<std::uint64_t>(cfg.window)));
        float* center = m.input_vectors.row(ids[i]).data();
        for (std::ptrdiff_t j = std::max<std::ptrdiff_t>(0, i - b);
             j <= std::min(n - 1, i + b); ++j) {
          if (j == i) continue;
          const std::int32_t ctx = ids[j];
          negs.clear();
          for (int k = 0; k < cfg.negatives; ++k) {
            const std::int32_t w = noise.draw(rng);
            if (w != ctx) negs.push_back(m.output_vectors.row(w).data());
          }
          loss_sum += sgns::step<float>(center, m.output_vectors.row(ctx).data(), negs, dim, lr,
                                        scratch);
          ++pairs;
        }
      }
    }
    if (log) log->epoch_loss.push_back(pairs ? loss_sum / static_cast<double>(pairs) : 0.0);
  }
  if (!m.input_vectors.allFinite() || !m.output_vectors.allFinite())
    fail(ErrorCategory::data, "embedding training diverged (non-finite weights)");
  return m;
}

double cosine_similarity(const EmbeddingModel& m, const std::string& a, const std::string& b) {
  const auto ia = m.vocab.find(a);
  const auto ib = m.vocab.find(b);
  if (!ia || !ib) fail(ErrorCategory::data, "cosine_similarity: token not in vocabulary");
  const VectorD va = m.input_vectors.row(*ia).transpose().cast<double>();
  const VectorD vb = m.input_vectors.row(*ib).transpose().cast<double>();
  const double denom = va.norm() * vb.norm();
  return denom > 0 ? va.dot(vb) / denom : 0.0;
}

PoolingKind parse_pooling(std::string_view s) {
  if (s == "mean") return PoolingKind::mean;
  if (s == "max") return PoolingKind::max;
  if (s == "min") return PoolingKind::min;
  if (s == "max_concat_min") return PoolingKind::max_concat_min;
  if (s == "mean_concat_max") return PoolingKind::mean_concat_max;
  fail(ErrorCategory::config, "unknown pooling '" + std::string(s) + "'");
}

std::string_view to_string(PoolingKind p) noexcept {
  switch (p) {
    case PoolingKind::mean: return "mean";
    case PoolingKind::max: return "max";
    case PoolingKind::min: return "min";
    case PoolingKind::max_concat_min: return "max_concat_min";
    case PoolingKind::mean_concat_max: return "mean_concat_max";
  }
  return "?";
}

int pooled_dim(PoolingKind p, int dim) noexcept {
  return (p == PoolingKind::max_concat_min || p == PoolingKind::mean_concat_max) ? 2 * dim : dim;
}

VectorD pool_vectors(const MatrixD& vectors, PoolingKind pool, int dim) {
  VectorD out = VectorD::Zero(pooled_dim(pool, dim));
  if (vectors.rows() == 0) return out;
  switch (pool) {
    case PoolingKind::mean:
      out = vectors.colwise().mean().transpose();
      break;
    case PoolingKind::max:
      out = vectors.colwise().maxCoeff().transpose();
      break;
    case PoolingKind::min:
      out = vectors.colwise().minCoeff().transpose();
      break;
    case PoolingKind::max_concat_min:
      out.head(dim) = vectors.colwise().maxCoeff().transpose();
      out.tail(dim) = vectors.colwise().minCoeff().transpose();
      break;
    case PoolingKind::mean_concat_max:
      out.head(dim) = vectors.colwise().mean().transpose();
      out.tail(dim) = vectors.colwise().maxCoeff().transpose();
      break;
  }
  return out;
}

VectorD embed_tweet(const TokenSeq& t, const EmbeddingModel& m, PoolingKind pool) {
  std::vector<std::int32_t> ids;
  for (const auto& tok : t.tokens)
    if (auto id = m.vocab.find(tok)) ids.push_back(*id);
  MatrixD rows(static_cast<Eigen::Index>(ids.size()), m.dim());
  for (std::size_t i = 0; i < ids.size(); ++i)
    rows.row(static_cast<Eigen::Index>(i)) = m.input_vectors.row(ids[i]).cast<double>();
  return pool_vectors(rows, pool, m.dim());
}

VectorD fuse(const LexiconFeatures& lex, const VectorD& emb) {
  VectorD out(static_cast<Eigen::Index>(kLexiconFeatureCount) + emb.size());
  const auto flat = lex.flatten();
  for (std::size_t i = 0; i < flat.size(); ++i) out[static_cast<Eigen::Index>(i)] = flat[i];
  out.tail(emb.size()) = emb;
  return out;
}

void save_embeddings(const EmbeddingModel& m, const std::filesystem::path& dir,
                     const Provenance& prov) {
  ArtifactWriter w(dir, "embeddings");
  w.meta()["config"] = m.config.to_json();
  w.meta()["provenance"] = to_json(prov);
  w.meta()["vocab"] = m.vocab.to_json();
  w.put("input_vectors", m.input_vectors);
  w.put("output_vectors", m.output_vectors);
  w.finish();
}

EmbeddingModel load_embeddings(const std::filesystem::path& dir) {
  ArtifactReader r(dir, "embeddings");
  EmbeddingModel m;
  m.config = EmbeddingConfig::from_json(r.meta().at("config"));
  m.vocab = Vocabulary::from_json(r.meta().at("vocab"));
  m.input_vectors = r.matrix_f32("input_vectors");
  m.output_vectors = r.matrix_f32("output_vectors");
  if (m.input_vectors.rows() != static_cast<Eigen::Index>(m.vocab.size()) ||
      m.output_vectors.rows() != m.input_vectors.rows() ||
      m.output_vectors.cols() != m.input_vectors.cols())
    fail(ErrorCategory::parse, "embedding matrices do not match vocabulary in " + dir.string());
  return m;
}

}  // namespace olid
