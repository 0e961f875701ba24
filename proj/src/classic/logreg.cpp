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

#include "classic_internal.hpp"
#include "olid/error.hpp"

namespace olid {

namespace logreg {

double objective(const MatrixD& x, std::span<const int> y, const MatrixD& w, const VectorD& b,
                 double l2, MatrixD* grad_w, VectorD* grad_b) {
  const auto n = static_cast<double>(x.rows());
  MatrixD scores = x * w.transpose();
  scores.rowwise() += b.transpose();
  double loss = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    auto row = scores.row(i);
    const double mx = row.maxCoeff();
    const double lse = mx + std::log((row.array() - mx).exp().sum());
    loss += lse - row(y[static_cast<std::size_t>(i)]);
    row = (row.array() - lse).exp().matrix();  // now probabilities
    row(y[static_cast<std::size_t>(i)]) -= 1.0;
  }
  loss = loss / n + 0.5 * l2 / n * w.squaredNorm();
  if (grad_w) *grad_w = scores.transpose() * x / n + (l2 / n) * w;
  if (grad_b) *grad_b = scores.colwise().sum().transpose() / n;
  return loss;
}

}  // namespace logreg

namespace detail {

LogRegState fit_logreg(const LabeledMatrix& data, const LogRegParams& p) {
  LogRegState s;
  s.standardizer = Standardizer::fit(data.features);
  const MatrixD x = s.standardizer.apply(data.features);
  const auto K = static_cast<Eigen::Index>(data.num_classes());
  s.weights = MatrixD::Zero(K, x.cols());
  s.bias = VectorD::Zero(K);

  MatrixD gw;
  VectorD gb;
  double f = logreg::objective(x, data.labels, s.weights, s.bias, p.l2, &gw, &gb);
  double t = 1.0;
  for (int iter = 0; iter < p.max_iter; ++iter) {
    const double ginf = std::max(gw.cwiseAbs().maxCoeff(), gb.cwiseAbs().maxCoeff());
    if (ginf < p.tol) break;
    const double gsq = gw.squaredNorm() + gb.squaredNorm();
    // Backtracking (Armijo) line search; step grows again after each accepted move.
    bool accepted = false;
    MatrixD w_new;
    VectorD b_new;
    double f_new = f;
    while (t > 1e-16) {
      w_new = s.weights - t * gw;
      b_new = s.bias - t * gb;
      f_new = logreg::objective(x, data.labels, w_new, b_new, p.l2, nullptr, nullptr);
      if (f_new <= f - 1e-4 * t * gsq) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    s.weights = std::move(w_new);
    s.bias = std::move(b_new);
    f = logreg::objective(x, data.labels, s.weights, s.bias, p.l2, &gw, &gb);
    t *= 2.0;
  }
  return s;
}

MatrixD predict_logreg(const LogRegState& s, const MatrixD& features) {
  MatrixD scores = s.standardizer.apply(features) * s.weights.transpose();
  scores.rowwise() += s.bias.transpose();
  softmax_rows_inplace(scores);
  return scores;
}

}  // namespace detail
}  // namespace olid
