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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "classic_internal.hpp"
#include "olid/error.hpp"
#include "olid/random.hpp"

namespace olid {

using ColMatrixD = Eigen::MatrixXd;

std::int32_t Tree::leaf(const double* x) const {
  std::int32_t node = 0;
  while (feature[static_cast<std::size_t>(node)] >= 0) {
    const auto i = static_cast<std::size_t>(node);
    node = x[feature[i]] <= threshold[i] ? left[i] : right[i];
  }
  return node;
}

namespace {

std::int32_t add_node(Tree& t, Eigen::Index outputs) {
  const auto id = static_cast<std::int32_t>(t.feature.size());
  t.feature.push_back(-1);
  t.threshold.push_back(0.0);
  t.left.push_back(-1);
  t.right.push_back(-1);
  t.value.conservativeResize(id + 1, outputs);
  t.value.row(id).setZero();
  return id;
}

// Midpoint split value that still separates lo from hi after rounding.
double split_point(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return (mid >= hi || std::isinf(mid)) ? lo : mid;
}

}  // namespace

namespace trees {

Tree grow_classifier(const MatrixD& x_rows, std::span<const int> y, std::size_t num_classes,
                     std::vector<std::size_t> sample, const ForestParams& p, std::uint64_t seed) {
  const ColMatrixD x = x_rows;
  const auto d = static_cast<std::size_t>(x.cols());
  const auto K = num_classes;
  const std::size_t max_features =
      p.max_features > 0
          ? std::min<std::size_t>(static_cast<std::size_t>(p.max_features), d)
          : std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
  Rng rng = make_rng(seed);

  Tree tree;
  struct Pending {
    std::size_t begin, end;
    std::int32_t node;
    int depth;
  };
  std::vector<Pending> stack{{0, sample.size(), add_node(tree, static_cast<Eigen::Index>(K)), 0}};
  std::vector<std::size_t> features(d);
  std::vector<std::pair<double, int>> column;
  std::vector<double> left_counts(K), total_counts(K);

  while (!stack.empty()) {
    const Pending task = stack.back();
    stack.pop_back();
    const std::size_t n = task.end - task.begin;

    std::fill(total_counts.begin(), total_counts.end(), 0.0);
    for (std::size_t i = task.begin; i < task.end; ++i) total_counts[static_cast<std::size_t>(y[sample[i]])] += 1;
    for (std::size_t k = 0; k < K; ++k)
      tree.value(task.node, static_cast<Eigen::Index>(k)) = total_counts[k] / static_cast<double>(n);
    const double largest = *std::max_element(total_counts.begin(), total_counts.end());
    const bool pure = largest == static_cast<double>(n);
    if (pure || n < static_cast<std::size_t>(std::max(2, p.min_samples_split)) ||
        (p.max_depth > 0 && task.depth >= p.max_depth))
      continue;

    // Draw features without replacement until max_features non-constant ones were scored.
    std::iota(features.begin(), features.end(), std::size_t{0});
    std::size_t scored = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    std::int32_t best_feature = -1;
    double best_threshold = 0;
    for (std::size_t idx = 0; idx < d && scored < max_features; ++idx) {
      std::swap(features[idx], features[idx + uniform_index(rng, d - idx)]);
      const auto f = static_cast<Eigen::Index>(features[idx]);
      column.clear();
      for (std::size_t i = task.begin; i < task.end; ++i)
        column.emplace_back(x(static_cast<Eigen::Index>(sample[i]), f), y[sample[i]]);
      std::sort(column.begin(), column.end());
      if (column.front().first == column.back().first) continue;
      ++scored;
      // Maximizing sum_c l_c^2/n_l + sum_c r_c^2/n_r minimizes weighted Gini.
      std::fill(left_counts.begin(), left_counts.end(), 0.0);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        left_counts[static_cast<std::size_t>(column[i].second)] += 1;
        if (column[i].first == column[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = static_cast<double>(n) - nl;
        double sl = 0, sr = 0;
        for (std::size_t k = 0; k < K; ++k) {
          sl += left_counts[k] * left_counts[k];
          const double r = total_counts[k] - left_counts[k];
          sr += r * r;
        }
        const double score = sl / nl + sr / nr;
        if (score > best_score) {
          best_score = score;
          best_feature = static_cast<std::int32_t>(f);
          best_threshold = split_point(column[i].first, column[i + 1].first);
        }
      }
    }
    if (best_feature < 0) continue;

    const auto mid = std::stable_partition(
        sample.begin() + static_cast<std::ptrdiff_t>(task.begin),
        sample.begin() + static_cast<std::ptrdiff_t>(task.end),
        [&](std::size_t r) { return x(static_cast<Eigen::Index>(r), best_feature) <= best_threshold; });
    const auto split = static_cast<std::size_t>(mid - sample.begin());
    const auto l = add_node(tree, static_cast<Eigen::Index>(K));
    const auto r = add_node(tree, static_cast<Eigen::Index>(K));
    const auto ni = static_cast<std::size_t>(task.node);
    tree.feature[ni] = best_feature;
    tree.threshold[ni] = best_threshold;
    tree.left[ni] = l;
    tree.right[ni] = r;
    stack.push_back({split, task.end, r, task.depth + 1});
    stack.push_back({task.begin, split, l, task.depth + 1});
  }
  return tree;
}

}  // namespace trees

namespace detail {

ForestState fit_forest(const LabeledMatrix& data, const ForestParams& p, std::uint64_t seed) {
  ForestState s;
  const std::size_t n = data.rows();
  s.trees.reserve(static_cast<std::size_t>(p.n_trees));
  for (int t = 0; t < p.n_trees; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t) + 1);
    std::vector<std::size_t> sample(n);
    if (p.bootstrap) {
      for (auto& i : sample) i = uniform_index(rng, n);
    } else {
      std::iota(sample.begin(), sample.end(), std::size_t{0});
    }
    s.trees.push_back(trees::grow_classifier(data.features, data.labels, data.num_classes(),
                                             std::move(sample), p, rng()));
  }
  return s;
}

MatrixD predict_forest(const ForestState& s, const MatrixD& features, std::size_t num_classes) {
  MatrixD out = MatrixD::Zero(features.rows(), static_cast<Eigen::Index>(num_classes));
  for (const auto& tree : s.trees)
    for (Eigen::Index i = 0; i < features.rows(); ++i)
      out.row(i) += tree.value.row(tree.leaf(features.row(i).data()));
  out /= static_cast<double>(std::max<std::size_t>(1, s.trees.size()));
  return out;
}

namespace {

// Per-feature row orders, computed once and shared by every boosting tree.
struct Presorted {
  ColMatrixD x;
  std::vector<std::vector<std::uint32_t>> order;

  explicit Presorted(const MatrixD& rows) : x(rows), order(static_cast<std::size_t>(rows.cols())) {
    for (Eigen::Index f = 0; f < x.cols(); ++f) {
      auto& o = order[static_cast<std::size_t>(f)];
      o.resize(static_cast<std::size_t>(x.rows()));
      std::iota(o.begin(), o.end(), 0u);
      std::stable_sort(o.begin(), o.end(),
                       [&](std::uint32_t a, std::uint32_t b) { return x(a, f) < x(b, f); });
    }
  }
};

// Least-squares regression tree grown level by level over presorted features.
// Leaves predict the mean target of their rows.
Tree grow_regressor(const Presorted& ps, const VectorD& target, const BoostingParams& p) {
  const auto n = static_cast<std::size_t>(ps.x.rows());
  const auto d = static_cast<std::size_t>(ps.x.cols());
  Tree tree;
  add_node(tree, 1);
  std::vector<std::int32_t> node_of(n, 0);

  struct Stats {
    double sum = 0, sumsq = 0;
    double count = 0;
  };
  std::vector<Stats> stats(1);
  for (std::size_t i = 0; i < n; ++i) {
    stats[0].sum += target[static_cast<Eigen::Index>(i)];
    stats[0].sumsq += target[static_cast<Eigen::Index>(i)] * target[static_cast<Eigen::Index>(i)];
    stats[0].count += 1;
  }
  std::vector<std::int32_t> frontier{0};

  for (int depth = 0; depth < p.max_depth && !frontier.empty(); ++depth) {
    std::vector<int> slot(tree.node_count(), -1);
    std::vector<std::int32_t> active;
    for (auto node : frontier) {
      const auto& st = stats[static_cast<std::size_t>(node)];
      const double sse = st.sumsq - st.sum * st.sum / st.count;
      if (st.count >= std::max(2, p.min_samples_split) && sse > 1e-12 * (1.0 + st.sumsq)) {
        slot[static_cast<std::size_t>(node)] = static_cast<int>(active.size());
        active.push_back(node);
      }
    }
    if (active.empty()) break;

    const std::size_t m = active.size();
    std::vector<double> best_score(m, -std::numeric_limits<double>::infinity());
    std::vector<std::int32_t> best_feature(m, -1);
    std::vector<double> best_threshold(m, 0.0);
    std::vector<double> left_sum(m), left_count(m), last_x(m);

    for (std::size_t f = 0; f < d; ++f) {
      std::fill(left_sum.begin(), left_sum.end(), 0.0);
      std::fill(left_count.begin(), left_count.end(), 0.0);
      for (const auto r : ps.order[f]) {
        const int s = slot[static_cast<std::size_t>(node_of[r])];
        if (s < 0) continue;
        const auto si = static_cast<std::size_t>(s);
        const double xv = ps.x(r, static_cast<Eigen::Index>(f));
        if (left_count[si] > 0 && xv > last_x[si]) {
          const auto& st = stats[static_cast<std::size_t>(active[si])];
          const double rs = st.sum - left_sum[si];
          const double score =
              left_sum[si] * left_sum[si] / left_count[si] + rs * rs / (st.count - left_count[si]);
          if (score > best_score[si]) {
            best_score[si] = score;
            best_feature[si] = static_cast<std::int32_t>(f);
            best_threshold[si] = split_point(last_x[si], xv);
          }
        }
        left_sum[si] += target[r];
        left_count[si] += 1;
        last_x[si] = xv;
      }
    }

    std::vector<std::int32_t> next;
    std::vector<std::int32_t> left_child(m, -1), right_child(m, -1);
    for (std::size_t s = 0; s < m; ++s) {
      const auto& st = stats[static_cast<std::size_t>(active[s])];
      const double parent = st.sum * st.sum / st.count;
      if (best_feature[s] < 0 || best_score[s] <= parent + 1e-12 * (1.0 + st.sumsq)) continue;
      const auto node = static_cast<std::size_t>(active[s]);
      left_child[s] = add_node(tree, 1);
      right_child[s] = add_node(tree, 1);
      tree.feature[node] = best_feature[s];
      tree.threshold[node] = best_threshold[s];
      tree.left[node] = left_child[s];
      tree.right[node] = right_child[s];
      next.push_back(left_child[s]);
      next.push_back(right_child[s]);
    }
    stats.resize(tree.node_count());
    for (std::size_t i = 0; i < n; ++i) {
      const auto node = static_cast<std::size_t>(node_of[i]);
      if (tree.feature[node] < 0) continue;
      const int s = slot[node];
      if (s < 0 || left_child[static_cast<std::size_t>(s)] < 0) continue;
      node_of[i] = ps.x(static_cast<Eigen::Index>(i), tree.feature[node]) <= tree.threshold[node]
                       ? tree.left[node]
                       : tree.right[node];
      auto& st = stats[static_cast<std::size_t>(node_of[i])];
      const double t = target[static_cast<Eigen::Index>(i)];
      st.sum += t;
      st.sumsq += t * t;
      st.count += 1;
    }
    frontier = std::move(next);
  }

  for (std::size_t node = 0; node < tree.node_count(); ++node) {
    const auto& st = stats[node];
    tree.value(static_cast<Eigen::Index>(node), 0) = st.count > 0 ? st.sum / st.count : 0.0;
  }
  return tree;
}

double mean_log_loss(const MatrixD& scores, std::span<const int> y) {
  double total = 0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const auto row = scores.row(i);
    const double mx = row.maxCoeff();
    const double lse = mx + std::log((row.array() - mx).exp().sum());
    total += lse - row(y[static_cast<std::size_t>(i)]);
  }
  return total / static_cast<double>(scores.rows());
}

}  // namespace

BoostingState fit_boosting(const LabeledMatrix& data, const BoostingParams& p) {
  BoostingState s;
  s.learning_rate = p.learning_rate;
  const auto n = static_cast<Eigen::Index>(data.rows());
  const auto K = static_cast<Eigen::Index>(data.num_classes());

  VectorD prior = VectorD::Zero(K);
  for (int l : data.labels) prior[l] += 1;
  prior /= static_cast<double>(n);
  s.init.resize(K);
  for (Eigen::Index k = 0; k < K; ++k)
    s.init[k] = std::log(std::max(prior[k], std::numeric_limits<double>::min()));

  const Presorted ps(data.features);
  MatrixD scores = s.init.transpose().replicate(n, 1);
  s.train_loss.push_back(mean_log_loss(scores, data.labels));

  for (int stage = 0; stage < p.n_stages; ++stage) {
    MatrixD residual = scores;
    softmax_rows_inplace(residual);
    residual *= -1.0;
    for (Eigen::Index i = 0; i < n; ++i) residual(i, data.labels[static_cast<std::size_t>(i)]) += 1.0;

    std::vector<Tree> stage_trees;
    stage_trees.reserve(static_cast<std::size_t>(K));
    for (Eigen::Index k = 0; k < K; ++k) stage_trees.push_back(grow_regressor(ps, residual.col(k), p));
    for (Eigen::Index k = 0; k < K; ++k) {
      const auto& tree = stage_trees[static_cast<std::size_t>(k)];
      for (Eigen::Index i = 0; i < n; ++i)
        scores(i, k) += p.learning_rate * tree.value(tree.leaf(data.features.row(i).data()), 0);
    }
    s.stages.push_back(std::move(stage_trees));
    s.train_loss.push_back(mean_log_loss(scores, data.labels));
  }
  return s;
}

MatrixD predict_boosting(const BoostingState& s, const MatrixD& features) {
  MatrixD scores = s.init.transpose().replicate(features.rows(), 1);
  for (const auto& stage : s.stages)
    for (std::size_t k = 0; k < stage.size(); ++k)
      for (Eigen::Index i = 0; i < features.rows(); ++i)
        scores(i, static_cast<Eigen::Index>(k)) +=
            s.learning_rate * stage[k].value(stage[k].leaf(features.row(i).data()), 0);
  softmax_rows_inplace(scores);
  return scores;
}

}  // namespace detail
}  // namespace olid
