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

#include "olid/cnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "olid/error.hpp"
#include "olid/metrics.hpp"

namespace olid {

void CnnConfig::validate() const {
  require(max_len >= 1, ErrorCategory::config, "cnn max_len must be >= 1");
  require(embed_dim >= 1, ErrorCategory::config, "cnn embed_dim must be >= 1");
  require(!filter_sizes.empty(), ErrorCategory::config, "cnn filter_sizes must not be empty");
  for (const int s : filter_sizes)
    require(s >= 1 && s <= max_len, ErrorCategory::config,
            "cnn filter size " + std::to_string(s) + " must be in [1, max_len]");
  require(filters_per_size >= 1, ErrorCategory::config, "cnn filters_per_size must be >= 1");
  require(dropout >= 0 && dropout < 1, ErrorCategory::config, "cnn dropout must be in [0, 1)");
  require(batch_size >= 1, ErrorCategory::config, "cnn batch_size must be >= 1");
  require(adam_lr >= 0 && std::isfinite(adam_lr), ErrorCategory::config,
          "cnn adam_lr must be non-negative");
  require(adam_beta1 > 0 && adam_beta1 < 1 && adam_beta2 > 0 && adam_beta2 < 1,
          ErrorCategory::config, "cnn adam betas must be in (0, 1)");
  require(adam_eps > 0, ErrorCategory::config, "cnn adam_eps must be positive");
  require(max_epochs >= 1, ErrorCategory::config, "cnn max_epochs must be >= 1");
  require(patience >= 1, ErrorCategory::config, "cnn patience must be >= 1");
}

Json CnnConfig::to_json() const {
  return Json{{"max_len", max_len},       {"embed_dim", embed_dim},
              {"filter_sizes", filter_sizes}, {"filters_per_size", filters_per_size},
              {"dropout", dropout},       {"batch_size", batch_size},
              {"adam_lr", adam_lr},       {"adam_beta1", adam_beta1},
              {"adam_beta2", adam_beta2}, {"adam_eps", adam_eps},
              {"max_epochs", max_epochs}, {"patience", patience},
              {"seed", seed}};
}

CnnConfig CnnConfig::from_json(const Json& j) {
  CnnConfig c;
  c.max_len = j.value("max_len", c.max_len);
  c.embed_dim = j.value("embed_dim", c.embed_dim);
  c.filter_sizes = j.value("filter_sizes", c.filter_sizes);
  c.filters_per_size = j.value("filters_per_size", c.filters_per_size);
  c.dropout = j.value("dropout", c.dropout);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.adam_lr = j.value("adam_lr", c.adam_lr);
  c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
  c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
  c.adam_eps = j.value("adam_eps", c.adam_eps);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.seed = j.value("seed", c.seed);
  return c;
}

// ---- parameters ------------------------------------------------------------

namespace {

template <class M>
auto flat(M& m) {
  return std::span(m.data(), static_cast<std::size_t>(m.size()));
}

}  // namespace

template <class T>
std::vector<std::span<T>> CnnParams<T>::tensors() {
  std::vector<std::span<T>> out{flat(embedding)};
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    out.push_back(flat(kernels[i]));
    out.push_back(flat(conv_bias[i]));
  }
  out.push_back(flat(dense));
  out.push_back(flat(dense_bias));
  return out;
}

template <class T>
std::vector<std::span<const T>> CnnParams<T>::tensors() const {
  auto spans = const_cast<CnnParams&>(*this).tensors();
  return {spans.begin(), spans.end()};
}

template <class T>
std::vector<std::string> CnnParams<T>::tensor_names() const {
  std::vector<std::string> out{"embedding"};
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    out.push_back("conv" + std::to_string(i) + "_kernel");
    out.push_back("conv" + std::to_string(i) + "_bias");
  }
  out.push_back("dense");
  out.push_back("dense_bias");
  return out;
}

template <class T>
CnnParams<T> CnnParams<T>::zeros_like() const {
  CnnParams z;
  z.embedding = RowMatrix<T>::Zero(embedding.rows(), embedding.cols());
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    z.kernels.push_back(RowMatrix<T>::Zero(kernels[i].rows(), kernels[i].cols()));
    z.conv_bias.push_back(Vector<T>::Zero(conv_bias[i].size()));
  }
  z.dense = RowMatrix<T>::Zero(dense.rows(), dense.cols());
  z.dense_bias = Vector<T>::Zero(dense_bias.size());
  return z;
}

template <class T>
template <class U>
CnnParams<U> CnnParams<T>::cast() const {
  CnnParams<U> c;
  c.embedding = embedding.template cast<U>();
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    c.kernels.push_back(kernels[i].template cast<U>());
    c.conv_bias.push_back(conv_bias[i].template cast<U>());
  }
  c.dense = dense.template cast<U>();
  c.dense_bias = dense_bias.template cast<U>();
  return c;
}

TokenIndices encode(const TokenSeq& t, const Vocabulary& vocab, int max_len) {
  TokenIndices out(static_cast<std::size_t>(std::max(max_len, 0)), kPadIndex);
  const auto n = std::min(out.size(), t.tokens.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = vocab.find(t.tokens[i]);
    out[i] = id ? *id + 2 : kOovIndex;
  }
  return out;
}

template <class T>
BasicCnnModel<T> init_cnn(const CnnConfig& cfg, Vocabulary vocab,
                          std::vector<std::string> class_names) {
  cfg.validate();
  require(class_names.size() >= 2, ErrorCategory::config, "cnn needs at least two classes");
  BasicCnnModel<T> m{std::move(vocab), cfg, std::move(class_names), {}};
  auto rng = make_rng(cfg.seed, 1);
  const auto fill = [&](auto& mat, double limit) {
    for (Eigen::Index i = 0; i < mat.size(); ++i)
      mat.data()[i] = static_cast<T>(uniform(rng, -limit, limit));
  };
  const auto E = cfg.embed_dim, F = cfg.filters_per_size;
  auto& p = m.params;
  p.embedding.resize(static_cast<Eigen::Index>(m.vocab.size()) + 2, E);
  fill(p.embedding, 0.05);
  p.embedding.row(kPadIndex).setZero();
  for (const int s : cfg.filter_sizes) {
    RowMatrix<T> k(F, s * E);
    fill(k, std::sqrt(6.0 / (s * E + s * F)));
    p.kernels.push_back(std::move(k));
    p.conv_bias.push_back(Vector<T>::Zero(F));
  }
  const auto K = static_cast<Eigen::Index>(m.class_names.size());
  p.dense.resize(cfg.feature_width(), K);
  fill(p.dense, std::sqrt(6.0 / static_cast<double>(cfg.feature_width() + K)));
  p.dense_bias = Vector<T>::Zero(K);
  return m;
}

// ---- forward / backward ----------------------------------------------------

namespace {

template <class T>
struct ExampleState {
  RowMatrix<T> x;                        // L x E input rows; pads are zero
  std::vector<std::vector<int>> argmax;  // per width, per filter: position of the max
  Vector<T> features;                    // pooled, before dropout
  Vector<T> mask;                        // dropout scale per feature (empty: none)
};

template <class T>
void check_batch(const BasicCnnModel<T>& m, std::span<const TokenIndices> batch) {
  require(!batch.empty(), ErrorCategory::data, "cnn batch is empty");
  const auto L = batch.front().size();
  const int widest = *std::max_element(m.config.filter_sizes.begin(), m.config.filter_sizes.end());
  require(L >= static_cast<std::size_t>(widest), ErrorCategory::dimension,
          "cnn input length " + std::to_string(L) + " is shorter than filter width " +
              std::to_string(widest));
  const auto rows = m.params.embedding.rows();
  for (const auto& seq : batch) {
    require(seq.size() == L, ErrorCategory::dimension, "cnn batch rows differ in length");
    for (const auto idx : seq)
      require(idx >= 0 && idx < rows, ErrorCategory::dimension,
              "cnn token index " + std::to_string(idx) + " outside embedding table");
  }
}

template <class T>
void forward_features(const CnnParams<T>& p, const CnnConfig& cfg, const TokenIndices& seq,
                      ExampleState<T>& st) {
  const auto L = static_cast<Eigen::Index>(seq.size());
  const Eigen::Index E = cfg.embed_dim;
  const Eigen::Index F = cfg.filters_per_size;
  st.x.resize(L, E);
  for (Eigen::Index l = 0; l < L; ++l) {
    const auto idx = seq[static_cast<std::size_t>(l)];
    if (idx == kPadIndex)
      st.x.row(l).setZero();
    else
      st.x.row(l) = p.embedding.row(idx);
  }
  st.features.resize(cfg.feature_width());
  st.argmax.resize(cfg.filter_sizes.size());
  RowMatrix<T> z;
  for (std::size_t w = 0; w < cfg.filter_sizes.size(); ++w) {
    const Eigen::Index s = cfg.filter_sizes[w];
    const Eigen::Index P = L - s + 1;
    // Window p is the s*E contiguous values starting at row p.
    Eigen::Map<const RowMatrix<T>, 0, Eigen::OuterStride<>> windows(st.x.data(), P, s * E,
                                                                     Eigen::OuterStride<>(E));
    z.noalias() = windows * p.kernels[w].transpose();
    auto& am = st.argmax[w];
    am.assign(static_cast<std::size_t>(F), 0);
    for (Eigen::Index f = 0; f < F; ++f) {
      Eigen::Index best = 0;
      T best_v = z(0, f);
      for (Eigen::Index q = 1; q < P; ++q)
        if (z(q, f) > best_v) {
          best_v = z(q, f);
          best = q;
        }
      am[static_cast<std::size_t>(f)] = static_cast<int>(best);
      st.features(static_cast<Eigen::Index>(w) * F + f) =
          std::max(T(0), best_v + p.conv_bias[w](f));
    }
  }
}

template <class T>
void draw_mask(double rate, Eigen::Index n, Rng& rng, Vector<T>& mask) {
  mask.resize(n);
  const T keep = static_cast<T>(1.0 / (1.0 - rate));
  for (Eigen::Index i = 0; i < n; ++i) mask(i) = uniform01(rng) < rate ? T(0) : keep;
}

template <class T>
Vector<T> logits_of(const CnnParams<T>& p, const ExampleState<T>& st) {
  Vector<T> h = st.mask.size() ? Vector<T>(st.features.cwiseProduct(st.mask)) : st.features;
  return p.dense.transpose() * h + p.dense_bias;
}

}  // namespace

template <class T>
RowMatrix<T> cnn_forward(const BasicCnnModel<T>& m, std::span<const TokenIndices> batch,
                         bool training, std::uint64_t seed, RowMatrix<T>* pooled) {
  check_batch(m, batch);
  const auto K = static_cast<Eigen::Index>(m.num_classes());
  const auto n = static_cast<Eigen::Index>(batch.size());
  RowMatrix<T> probs(n, K);
  if (pooled) pooled->resize(n, m.config.feature_width());
  auto rng = make_rng(seed, 2);
  ExampleState<T> st;
  for (Eigen::Index i = 0; i < n; ++i) {
    forward_features(m.params, m.config, batch[static_cast<std::size_t>(i)], st);
    if (pooled) pooled->row(i) = st.features.transpose();
    if (training && m.config.dropout > 0)
      draw_mask(m.config.dropout, st.features.size(), rng, st.mask);
    else
      st.mask.resize(0);
    probs.row(i) = softmax<T>(logits_of(m.params, st)).transpose();
  }
  return probs;
}

template <class T>
T cnn_gradients(const BasicCnnModel<T>& m, std::span<const TokenIndices> batch,
                std::span<const int> labels, CnnParams<T>& g, Rng* dropout_rng) {
  check_batch(m, batch);
  require(labels.size() == batch.size(), ErrorCategory::dimension,
          "cnn labels and batch differ in length");
  const auto& p = m.params;
  const auto& cfg = m.config;
  const auto K = static_cast<int>(m.num_classes());
  const Eigen::Index E = cfg.embed_dim;
  const Eigen::Index F = cfg.filters_per_size;
  ExampleState<T> st;
  RowMatrix<T> gx;
  T total = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const int y = labels[i];
    require(y >= 0 && y < K, ErrorCategory::dimension, "cnn label outside [0, K)");
    const auto& seq = batch[i];
    forward_features(p, cfg, seq, st);
    if (dropout_rng && cfg.dropout > 0)
      draw_mask(cfg.dropout, st.features.size(), *dropout_rng, st.mask);
    else
      st.mask.resize(0);
    const Vector<T> logits = logits_of(p, st);
    const T mx = logits.maxCoeff();
    const T lse = mx + std::log((logits.array() - mx).exp().sum());
    total += lse - logits(y);

    Vector<T> dlogits = (logits.array() - lse).exp().matrix();
    dlogits(y) -= T(1);
    const Vector<T> h =
        st.mask.size() ? Vector<T>(st.features.cwiseProduct(st.mask)) : st.features;
    g.dense.noalias() += h * dlogits.transpose();
    g.dense_bias += dlogits;
    Vector<T> dh = p.dense * dlogits;
    if (st.mask.size()) dh = dh.cwiseProduct(st.mask);

    gx = RowMatrix<T>::Zero(st.x.rows(), E);
    for (std::size_t w = 0; w < cfg.filter_sizes.size(); ++w) {
      const Eigen::Index s = cfg.filter_sizes[w];
      for (Eigen::Index f = 0; f < F; ++f) {
        const auto fi = static_cast<Eigen::Index>(w) * F + f;
        if (st.features(fi) <= T(0)) continue;  // ReLU closed
        const T d = dh(fi);
        const Eigen::Index q = st.argmax[w][static_cast<std::size_t>(f)];
        g.conv_bias[w](f) += d;
        Eigen::Map<const Vector<T>> window(st.x.data() + q * E, s * E);
        g.kernels[w].row(f) += d * window.transpose();
        Eigen::Map<Vector<T>> gwin(gx.data() + q * E, s * E);
        gwin += d * p.kernels[w].row(f).transpose();
      }
    }
    for (std::size_t l = 0; l < seq.size(); ++l)
      if (seq[l] != kPadIndex) g.embedding.row(seq[l]) += gx.row(static_cast<Eigen::Index>(l));
  }
  return total;
}

// ---- optimizer / stopping ------------------------------------------------

template <class T>
Adam<T>::Adam(const CnnParams<T>& like, double lr, double beta1, double beta2, double eps)
    : m_(like.zeros_like()), v_(like.zeros_like()), lr_(lr), beta1_(beta1), beta2_(beta2),
      eps_(eps) {}

template <class T>
void Adam<T>::step(CnnParams<T>& params, const CnnParams<T>& grads, double grad_scale) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto ps = params.tensors();
  const auto gs = grads.tensors();
  auto ms = m_.tensors();
  auto vs = v_.tensors();
  require(ps.size() == gs.size(), ErrorCategory::dimension, "adam: gradient shape mismatch");
  const T b1 = static_cast<T>(beta1_), b2 = static_cast<T>(beta2_);
  const T scale = static_cast<T>(grad_scale), lr = static_cast<T>(lr_), eps = static_cast<T>(eps_);
  const T ic1 = static_cast<T>(1.0 / c1), ic2 = static_cast<T>(1.0 / c2);
  using Arr = Eigen::Array<T, Eigen::Dynamic, 1>;
  for (std::size_t k = 0; k < ps.size(); ++k) {
    require(ps[k].size() == gs[k].size(), ErrorCategory::dimension,
            "adam: gradient shape mismatch");
    const auto n = static_cast<Eigen::Index>(ps[k].size());
    Eigen::Map<Arr> p(ps[k].data(), n), m(ms[k].data(), n), v(vs[k].data(), n);
    Eigen::Map<const Arr> gr(gs[k].data(), n);
    m = b1 * m + (T(1) - b1) * scale * gr;
    v = b2 * v + (T(1) - b2) * (scale * gr).square();
    p -= lr * (m * ic1) / ((v * ic2).sqrt() + eps);
  }
}

bool EarlyStopping::update(double score) {
  ++epochs_;
  if (best_epoch_ == 0 || score > best_score_) {
    best_score_ = score;
    best_epoch_ = epochs_;
    since_best_ = 0;
    return true;
  }
  ++since_best_;
  return false;
}

std::string TrainTrace::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,loss,val_macro_f1\n";
  for (std::size_t e = 0; e < loss.size(); ++e)
    out << e + 1 << ',' << loss[e] << ',' << val_macro_f1[e] << '\n';
  return out.str();
}

// ---- training ---------------------------------------------------------------

namespace {

constexpr std::size_t kInferenceChunk = 256;

void check_data(const CnnData& d, std::size_t K, const char* what) {
  require(!d.texts.empty(), ErrorCategory::data, std::string("cnn ") + what + " set is empty");
  require(d.texts.size() == d.labels.size(), ErrorCategory::dimension,
          std::string("cnn ") + what + " texts and labels differ in length");
  for (const int y : d.labels)
    require(y >= 0 && static_cast<std::size_t>(y) < K, ErrorCategory::data,
            std::string("cnn ") + what + " label outside [0, K)");
}

std::vector<int> argmax_rows(const MatrixF& probs) {
  std::vector<int> out(static_cast<std::size_t>(probs.rows()));
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    Eigen::Index j;
    probs.row(i).maxCoeff(&j);
    out[static_cast<std::size_t>(i)] = static_cast<int>(j);
  }
  return out;
}

MatrixF forward_all(const CnnModel& m, const std::vector<TokenIndices>& enc) {
  MatrixF out(static_cast<Eigen::Index>(enc.size()), static_cast<Eigen::Index>(m.num_classes()));
  for (std::size_t start = 0; start < enc.size(); start += kInferenceChunk) {
    const auto n = std::min(kInferenceChunk, enc.size() - start);
    out.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(n)) =
        cnn_forward(m, std::span(enc).subspan(start, n), false, 0);
  }
  return out;
}

}  // namespace

std::pair<CnnModel, TrainTrace> train_cnn(const CnnData& train, const CnnData& val,
                                          const CnnConfig& cfg,
                                          std::vector<std::string> class_names) {
  cfg.validate();
  const auto K = class_names.size();
  require(K >= 2, ErrorCategory::config, "cnn needs at least two classes");
  check_data(train, K, "training");
  check_data(val, K, "validation");
  std::vector<int> counts(K, 0);
  for (const int y : train.labels) ++counts[static_cast<std::size_t>(y)];
  for (std::size_t k = 0; k < K; ++k)
    require(counts[k] > 0, ErrorCategory::data,
            "class " + class_names[k] + " is missing from the cnn training set");

  auto m = init_cnn<float>(cfg, Vocabulary::build(train.texts, 1), std::move(class_names));
  std::vector<TokenIndices> train_enc, val_enc;
  for (const auto& t : train.texts) train_enc.push_back(encode(t, m.vocab, cfg.max_len));
  for (const auto& t : val.texts) val_enc.push_back(encode(t, m.vocab, cfg.max_len));
  const std::vector<int> val_gold(val.labels.begin(), val.labels.end());

  auto grads = m.params.zeros_like();
  Adam<float> adam(m.params, cfg.adam_lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
  auto shuffle_rng = make_rng(cfg.seed, 3);
  auto dropout_rng = make_rng(cfg.seed, 4);
  EarlyStopping stopper(cfg.patience);
  TrainTrace trace;
  CnnParams<float> best = m.params;

  std::vector<std::size_t> order(train_enc.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<TokenIndices> batch;
  std::vector<int> batch_labels;
  const auto B = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    olid::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0;
    for (std::size_t start = 0; start < order.size(); start += B) {
      const auto end = std::min(order.size(), start + B);
      batch.clear();
      batch_labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_enc[order[i]]);
        batch_labels.push_back(train.labels[order[i]]);
      }
      loss_sum += cnn_gradients(m, std::span<const TokenIndices>(batch), batch_labels, grads,
                                &dropout_rng);
      adam.step(m.params, grads, 1.0 / static_cast<double>(batch.size()));
      // Only rows touched by this batch carry embedding gradient.
      for (const auto& seq : batch)
        for (const auto idx : seq) grads.embedding.row(idx).setZero();
      for (std::size_t w = 0; w < grads.kernels.size(); ++w) {
        grads.kernels[w].setZero();
        grads.conv_bias[w].setZero();
      }
      grads.dense.setZero();
      grads.dense_bias.setZero();
    }
    trace.loss.push_back(loss_sum / static_cast<double>(order.size()));
    const auto pred = argmax_rows(forward_all(m, val_enc));
    const double f1 = macro_f1(confusion(val_gold, pred, m.class_names));
    trace.val_macro_f1.push_back(f1);
    if (stopper.update(f1)) best = m.params;
    if (stopper.should_stop()) break;
  }
  trace.best_epoch = stopper.best_epoch();
  m.params = std::move(best);
  return {std::move(m), std::move(trace)};
}

MatrixD predict_proba(const CnnModel& m, std::span<const TokenSeq> texts) {
  std::vector<TokenIndices> enc;
  enc.reserve(texts.size());
  for (const auto& t : texts) enc.push_back(encode(t, m.vocab, m.config.max_len));
  if (enc.empty()) return MatrixD(0, static_cast<Eigen::Index>(m.num_classes()));
  return forward_all(m, enc).cast<double>();
}

// ---- gradient check ---------------------------------------------------------

namespace {

double mean_loss(const BasicCnnModel<double>& m, std::span<const TokenIndices> batch,
                 std::span<const int> labels) {
  const auto probs = cnn_forward(m, batch, false, 0);
  double s = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    s -= std::log(probs(static_cast<Eigen::Index>(i), labels[i]));
  return s / static_cast<double>(labels.size());
}

}  // namespace

GradientCheckResult gradient_check(const BasicCnnModel<double>& model,
                                   std::span<const TokenIndices> batch,
                                   std::span<const int> labels, double step) {
  auto m = model;
  auto g = m.params.zeros_like();
  cnn_gradients(m, batch, labels, g, nullptr);
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  GradientCheckResult res;
  auto ps = m.params.tensors();
  const auto gs = g.tensors();
  const auto names = m.params.tensor_names();
  for (std::size_t k = 0; k < ps.size(); ++k) {
    double worst = 0;
    for (std::size_t i = 0; i < ps[k].size(); ++i) {
      const double orig = ps[k][i];
      ps[k][i] = orig + step;
      const double up = mean_loss(m, batch, labels);
      ps[k][i] = orig - step;
      const double down = mean_loss(m, batch, labels);
      ps[k][i] = orig;
      const double numeric = (up - down) / (2 * step);
      const double analytic = gs[k][i] * inv_n;
      const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-6});
      worst = std::max(worst, std::abs(numeric - analytic) / denom);
    }
    res.per_tensor.emplace_back(names[k], worst);
    res.max_relative_error = std::max(res.max_relative_error, worst);
  }
  return res;
}

GradientCheckResult gradient_check(const CnnConfig& cfg, std::span<const TokenIndices> batch,
                                   std::span<const int> labels, std::size_t vocab_size,
                                   std::size_t num_classes) {
  std::vector<std::pair<std::string, std::int64_t>> entries;
  for (std::size_t i = 0; i < vocab_size; ++i)
    entries.emplace_back("w" + std::to_string(i), static_cast<std::int64_t>(vocab_size - i));
  std::vector<std::string> names;
  for (std::size_t k = 0; k < num_classes; ++k) names.push_back("c" + std::to_string(k));
  auto m = init_cnn<double>(cfg, Vocabulary::from_entries(std::move(entries)), std::move(names));
  // Non-zero biases so the check also exercises their gradients away from zero.
  auto rng = make_rng(cfg.seed, 5);
  for (auto& b : m.params.conv_bias)
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = uniform(rng, -0.1, 0.1);
  for (Eigen::Index i = 0; i < m.params.dense_bias.size(); ++i)
    m.params.dense_bias(i) = uniform(rng, -0.1, 0.1);
  return gradient_check(m, batch, labels);
}

// ---- persistence ------------------------------------------------------------

void save_cnn(const CnnModel& m, const std::filesystem::path& dir, const Provenance& prov) {
  ArtifactWriter w(dir, "cnn");
  w.meta()["config"] = m.config.to_json();
  w.meta()["class_names"] = m.class_names;
  w.meta()["provenance"] = to_json(prov);
  w.meta()["vocab"] = m.vocab.to_json();
  w.meta()["kernel_layout"] = "filters x (width * embed_dim)";
  const auto names = m.params.tensor_names();
  w.put("embedding", m.params.embedding);
  for (std::size_t i = 0; i < m.params.kernels.size(); ++i) {
    w.put(names[1 + 2 * i], m.params.kernels[i]);
    const auto& b = m.params.conv_bias[i];
    w.put(names[2 + 2 * i], std::vector<float>(b.data(), b.data() + b.size()));
  }
  w.put("dense", m.params.dense);
  const auto& db = m.params.dense_bias;
  w.put("dense_bias", std::vector<float>(db.data(), db.data() + db.size()));
  w.finish();
}

CnnModel load_cnn(const std::filesystem::path& dir) {
  ArtifactReader r(dir, "cnn");
  CnnModel m;
  m.config = CnnConfig::from_json(r.meta().at("config"));
  m.config.validate();
  m.class_names = r.meta().at("class_names").get<std::vector<std::string>>();
  m.vocab = Vocabulary::from_json(r.meta().at("vocab"));
  auto& p = m.params;
  p.embedding = r.matrix_f32("embedding");
  const auto E = m.config.embed_dim, F = m.config.filters_per_size;
  const auto to_vec = [](const std::vector<float>& v) {
    return VectorF(Eigen::Map<const VectorF>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  bool ok = p.embedding.rows() == static_cast<Eigen::Index>(m.vocab.size()) + 2 &&
            p.embedding.cols() == E;
  for (std::size_t i = 0; i < m.config.filter_sizes.size(); ++i) {
    const auto tag = "conv" + std::to_string(i);
    p.kernels.push_back(r.matrix_f32(tag + "_kernel"));
    p.conv_bias.push_back(to_vec(r.floats(tag + "_bias")));
    ok = ok && p.kernels.back().rows() == F &&
         p.kernels.back().cols() == m.config.filter_sizes[i] * E && p.conv_bias.back().size() == F;
  }
  p.dense = r.matrix_f32("dense");
  p.dense_bias = to_vec(r.floats("dense_bias"));
  const auto K = static_cast<Eigen::Index>(m.class_names.size());
  ok = ok && p.dense.rows() == m.config.feature_width() && p.dense.cols() == K &&
       p.dense_bias.size() == K;
  if (!ok) fail(ErrorCategory::parse, "cnn model arrays are inconsistent in " + dir.string());
  return m;
}

#define OLID_INSTANTIATE_CNN(T)                                                                  \
  template struct CnnParams<T>;                                                                  \
  template BasicCnnModel<T> init_cnn<T>(const CnnConfig&, Vocabulary, std::vector<std::string>); \
  template RowMatrix<T> cnn_forward<T>(const BasicCnnModel<T>&, std::span<const TokenIndices>,   \
                                       bool, std::uint64_t, RowMatrix<T>*);                      \
  template T cnn_gradients<T>(const BasicCnnModel<T>&, std::span<const TokenIndices>,            \
                              std::span<const int>, CnnParams<T>&, Rng*);                        \
  template class Adam<T>;

OLID_INSTANTIATE_CNN(float)
OLID_INSTANTIATE_CNN(double)
template CnnParams<double> CnnParams<float>::cast<double>() const;
template CnnParams<float> CnnParams<double>::cast<float>() const;

}  // namespace olid
