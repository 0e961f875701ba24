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

#include <cmath>
#include <limits>
#include <numeric>

#include "classic_internal.hpp"
#include "olid/error.hpp"
#include "olid/random.hpp"

namespace olid {

namespace mlp {

double loss(const MlpWeights& w, const MatrixD& x, std::span<const int> y, MlpWeights* grad) {
  const auto n = static_cast<double>(x.rows());
  MatrixD pre = x * w.w1;
  pre.rowwise() += w.b1.transpose();
  const MatrixD hidden = pre.cwiseMax(0.0);
  MatrixD scores = hidden * w.w2;
  scores.rowwise() += w.b2.transpose();
  softmax_rows_inplace(scores);

  double total = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double p = scores(i, y[static_cast<std::size_t>(i)]);
    total -= std::log(std::max(p, std::numeric_limits<double>::min()));
  }
  if (grad) {
    MatrixD d_scores = scores;
    for (Eigen::Index i = 0; i < d_scores.rows(); ++i) d_scores(i, y[static_cast<std::size_t>(i)]) -= 1.0;
    d_scores /= n;
    grad->w2 = hidden.transpose() * d_scores;
    grad->b2 = d_scores.colwise().sum().transpose();
    MatrixD d_hidden = d_scores * w.w2.transpose();
    d_hidden = d_hidden.cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    grad->w1 = x.transpose() * d_hidden;
    grad->b1 = d_hidden.colwise().sum().transpose();
  }
  return total / n;
}

}  // namespace mlp

namespace detail {

namespace {

struct AdamMoments {
  MlpWeights m;
  MlpWeights v;
};

MlpWeights zeros_like(const MlpWeights& w) {
  return {MatrixD::Zero(w.w1.rows(), w.w1.cols()), VectorD::Zero(w.b1.size()),
          MatrixD::Zero(w.w2.rows(), w.w2.cols()), VectorD::Zero(w.b2.size())};
}

template <class P, class G>
void adam_update(P& param, const G& grad, P& m, P& v, const MlpParams& p, double bc1, double bc2) {
  m = p.beta1 * m + (1 - p.beta1) * grad;
  v = p.beta2 * v + (1 - p.beta2) * grad.cwiseProduct(grad);
  param.array() -= p.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + p.eps);
}

}  // namespace

MlpState fit_mlp(const LabeledMatrix& data, const MlpParams& p, std::uint64_t seed) {
  MlpState s;
  s.standardizer = Standardizer::fit(data.features);
  const MatrixD x = s.standardizer.apply(data.features);
  const auto n = x.rows();
  const auto d = x.cols();
  const auto K = static_cast<Eigen::Index>(data.num_classes());
  Rng rng = make_rng(seed);

  // He initialization, zero biases.
  auto& w = s.weights;
  w.w1.resize(d, p.hidden);
  w.w2.resize(p.hidden, K);
  const double s1 = std::sqrt(2.0 / static_cast<double>(d));
  const double s2 = std::sqrt(2.0 / static_cast<double>(p.hidden));
  for (Eigen::Index i = 0; i < w.w1.size(); ++i) w.w1.data()[i] = s1 * normal01(rng);
  for (Eigen::Index i = 0; i < w.w2.size(); ++i) w.w2.data()[i] = s2 * normal01(rng);
  w.b1 = VectorD::Zero(p.hidden);
  w.b2 = VectorD::Zero(K);

  AdamMoments adam{zeros_like(w), zeros_like(w)};
  const auto batch = std::min<Eigen::Index>(p.batch_size, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  double best_loss = std::numeric_limits<double>::infinity();
  int no_improvement = 0;
  long long t = 0;
  MlpWeights grad;
  MatrixD xb;
  std::vector<int> yb;
  for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
    olid::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0;
    for (Eigen::Index start = 0; start < n; start += batch) {
      const auto end = std::min(n, start + batch);
      xb.resize(end - start, d);
      yb.resize(static_cast<std::size_t>(end - start));
      for (Eigen::Index i = start; i < end; ++i) {
        xb.row(i - start) = x.row(order[static_cast<std::size_t>(i)]);
        yb[static_cast<std::size_t>(i - start)] = data.labels[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
      }
      epoch_loss += mlp::loss(w, xb, yb, &grad) * static_cast<double>(end - start);
      ++t;
      const double bc1 = 1 - std::pow(p.beta1, static_cast<double>(t));
      const double bc2 = 1 - std::pow(p.beta2, static_cast<double>(t));
      adam_update(w.w1, grad.w1, adam.m.w1, adam.v.w1, p, bc1, bc2);
      adam_update(w.b1, grad.b1, adam.m.b1, adam.v.b1, p, bc1, bc2);
      adam_update(w.w2, grad.w2, adam.m.w2, adam.v.w2, p, bc1, bc2);
      adam_update(w.b2, grad.b2, adam.m.b2, adam.v.b2, p, bc1, bc2);
    }
    epoch_loss /= static_cast<double>(n);
    s.loss_curve.push_back(epoch_loss);
    if (!std::isfinite(epoch_loss)) fail(ErrorCategory::data, "mlp training diverged");
    // Stop once the loss has failed to improve by tol for n_iter_no_change epochs.
    if (epoch_loss > best_loss - p.tol) {
      if (++no_improvement >= p.n_iter_no_change) break;
    } else {
      no_improvement = 0;
    }
    best_loss = std::min(best_loss, epoch_loss);
  }
  return s;
}

MatrixD predict_mlp(const MlpState& s, const MatrixD& features) {
  const auto& w = s.weights;
  MatrixD hidden = s.standardizer.apply(features) * w.w1;
  hidden.rowwise() += w.b1.transpose();
  hidden = hidden.cwiseMax(0.0);
  MatrixD scores = hidden * w.w2;
  scores.rowwise() += w.b2.transpose();
  softmax_rows_inplace(scores);
  return scores;
}

}  // namespace detail
}  // namespace olid
