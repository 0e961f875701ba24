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

#include "classic_internal.hpp"
#include "olid/error.hpp"
#include "olid/random.hpp"

namespace olid {

namespace fs = std::filesystem;

void LabeledMatrix::validate() const {
  if (labels.empty()) fail(ErrorCategory::data, "training data has no rows");
  if (static_cast<std::size_t>(features.rows()) != labels.size())
    fail(ErrorCategory::data, "feature rows and labels differ in length");
  if (class_names.size() < 2) fail(ErrorCategory::data, "need at least two class names");
  for (int l : labels)
    if (l < 0 || static_cast<std::size_t>(l) >= class_names.size())
      fail(ErrorCategory::data, "label index " + std::to_string(l) + " out of range");
  if (!features.allFinite()) fail(ErrorCategory::data, "features contain non-finite values");
}

LabeledMatrix LabeledMatrix::subset(std::span<const std::size_t> rows) const {
  LabeledMatrix out;
  out.class_names = class_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

ClassifierKind parse_classifier_kind(std::string_view s) {
  if (s == "logreg") return ClassifierKind::logreg;
  if (s == "mlp") return ClassifierKind::mlp;
  if (s == "random_forest" || s == "rf") return ClassifierKind::random_forest;
  if (s == "gradient_boosting" || s == "gb") return ClassifierKind::gradient_boosting;
  fail(ErrorCategory::config, "unknown classifier '" + std::string(s) + "'");
}

std::string_view to_string(ClassifierKind k) noexcept {
  switch (k) {
    case ClassifierKind::logreg: return "logreg";
    case ClassifierKind::mlp: return "mlp";
    case ClassifierKind::random_forest: return "random_forest";
    case ClassifierKind::gradient_boosting: return "gradient_boosting";
  }
  return "?";
}

ClassifierSpec ClassifierSpec::defaults(ClassifierKind kind, std::uint64_t seed) {
  switch (kind) {
    case ClassifierKind::logreg: return {LogRegParams{}, seed};
    case ClassifierKind::mlp: return {MlpParams{}, seed};
    case ClassifierKind::random_forest: return {ForestParams{}, seed};
    case ClassifierKind::gradient_boosting: return {BoostingParams{}, seed};
  }
  return {LogRegParams{}, seed};
}

void ClassifierSpec::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCategory::config, what);
  };
  std::visit(
      [&](const auto& h) {
        using H = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<H, LogRegParams>) {
          check(h.l2 >= 0, "logreg l2 must be >= 0");
          check(h.max_iter >= 1, "logreg max_iter must be >= 1");
          check(h.tol > 0, "logreg tol must be > 0");
        } else if constexpr (std::is_same_v<H, MlpParams>) {
          check(h.hidden >= 1, "mlp hidden must be >= 1");
          check(h.lr > 0, "mlp lr must be > 0");
          check(h.beta1 >= 0 && h.beta1 < 1 && h.beta2 >= 0 && h.beta2 < 1,
                "mlp betas must be in [0, 1)");
          check(h.eps > 0, "mlp eps must be > 0");
          check(h.batch_size >= 1, "mlp batch_size must be >= 1");
          check(h.max_epochs >= 1, "mlp max_epochs must be >= 1");
          check(h.n_iter_no_change >= 1, "mlp n_iter_no_change must be >= 1");
        } else if constexpr (std::is_same_v<H, ForestParams>) {
          check(h.n_trees >= 1, "random_forest n_trees must be >= 1");
          check(h.max_features >= 0, "random_forest max_features must be >= 0");
          check(h.min_samples_split >= 2, "random_forest min_samples_split must be >= 2");
          check(h.max_depth >= 0, "random_forest max_depth must be >= 0");
        } else {
          check(h.n_stages >= 1, "gradient_boosting n_stages must be >= 1");
          check(h.max_depth >= 1, "gradient_boosting max_depth must be >= 1");
          check(h.learning_rate > 0, "gradient_boosting learning_rate must be > 0");
          check(h.min_samples_split >= 2, "gradient_boosting min_samples_split must be >= 2");
        }
      },
      hyper);
}

Json ClassifierSpec::to_json() const {
  Json h = std::visit(
      [](const auto& p) -> Json {
        using H = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<H, LogRegParams>) {
          return {{"l2", p.l2}, {"max_iter", p.max_iter}, {"tol", p.tol}};
        } else if constexpr (std::is_same_v<H, MlpParams>) {
          return {{"hidden", p.hidden},         {"lr", p.lr},
                  {"beta1", p.beta1},           {"beta2", p.beta2},
                  {"eps", p.eps},               {"batch_size", p.batch_size},
                  {"max_epochs", p.max_epochs}, {"tol", p.tol},
                  {"n_iter_no_change", p.n_iter_no_change}};
        } else if constexpr (std::is_same_v<H, ForestParams>) {
          return {{"n_trees", p.n_trees},
                  {"max_features", p.max_features},
                  {"bootstrap", p.bootstrap},
                  {"min_samples_split", p.min_samples_split},
                  {"max_depth", p.max_depth}};
        } else {
          return {{"n_stages", p.n_stages},
                  {"max_depth", p.max_depth},
                  {"learning_rate", p.learning_rate},
                  {"min_samples_split", p.min_samples_split}};
        }
      },
      hyper);
  return Json{{"kind", to_string(kind())}, {"hyperparameters", h}, {"seed", seed}};
}

ClassifierSpec ClassifierSpec::from_json(const Json& j) {
  auto spec = defaults(parse_classifier_kind(j.at("kind").get<std::string>()),
                       j.value("seed", std::uint64_t{42}));
  const Json h = j.value("hyperparameters", Json::object());
  std::visit(
      [&](auto& p) {
        using H = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<H, LogRegParams>) {
          p.l2 = h.value("l2", p.l2);
          p.max_iter = h.value("max_iter", p.max_iter);
          p.tol = h.value("tol", p.tol);
        } else if constexpr (std::is_same_v<H, MlpParams>) {
          p.hidden = h.value("hidden", p.hidden);
          p.lr = h.value("lr", p.lr);
          p.beta1 = h.value("beta1", p.beta1);
          p.beta2 = h.value("beta2", p.beta2);
          p.eps = h.value("eps", p.eps);
          p.batch_size = h.value("batch_size", p.batch_size);
          p.max_epochs = h.value("max_epochs", p.max_epochs);
          p.tol = h.value("tol", p.tol);
          p.n_iter_no_change = h.value("n_iter_no_change", p.n_iter_no_change);
        } else if constexpr (std::is_same_v<H, ForestParams>) {
          p.n_trees = h.value("n_trees", p.n_trees);
          p.max_features = h.value("max_features", p.max_features);
          p.bootstrap = h.value("bootstrap", p.bootstrap);
          p.min_samples_split = h.value("min_samples_split", p.min_samples_split);
          p.max_depth = h.value("max_depth", p.max_depth);
        } else {
          p.n_stages = h.value("n_stages", p.n_stages);
          p.max_depth = h.value("max_depth", p.max_depth);
          p.learning_rate = h.value("learning_rate", p.learning_rate);
          p.min_samples_split = h.value("min_samples_split", p.min_samples_split);
        }
      },
      spec.hyper);
  spec.validate();
  return spec;
}

Standardizer Standardizer::fit(const MatrixD& x) {
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    const double var = (x.col(c).array() - s.mean[c]).square().mean();
    const double sd = std::sqrt(var);
    s.scale[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

MatrixD Standardizer::apply(const MatrixD& x) const {
  MatrixD out = x;
  out.rowwise() -= mean.transpose();
  out.array().rowwise() /= scale.transpose().array();
  return out;
}

Model::Model(State state, std::vector<std::string> class_names, int num_features)
    : state_(std::move(state)), class_names_(std::move(class_names)), num_features_(num_features) {}

std::string_view Model::kind_name() const noexcept {
  static constexpr std::string_view names[] = {"logreg", "mlp",  "random_forest",
                                               "gradient_boosting", "vote", "stack"};
  return names[state_.index()];
}

MatrixD Model::predict_proba(const MatrixD& features) const {
  if (features.cols() != num_features_)
    fail(ErrorCategory::dimension, "model expects " + std::to_string(num_features_) +
                                       " features, got " + std::to_string(features.cols()));
  return std::visit(
      [&](const auto& s) -> MatrixD {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LogRegState>) {
          return detail::predict_logreg(s, features);
        } else if constexpr (std::is_same_v<S, MlpState>) {
          return detail::predict_mlp(s, features);
        } else if constexpr (std::is_same_v<S, ForestState>) {
          return detail::predict_forest(s, features, num_classes());
        } else if constexpr (std::is_same_v<S, BoostingState>) {
          return detail::predict_boosting(s, features);
        } else if constexpr (std::is_same_v<S, VoteState>) {
          return soft_vote(s.members, features);
        } else {
          MatrixD meta(features.rows(),
                       static_cast<Eigen::Index>(s.members.size() * num_classes()));
          for (std::size_t m = 0; m < s.members.size(); ++m)
            meta.middleCols(static_cast<Eigen::Index>(m * num_classes()),
                            static_cast<Eigen::Index>(num_classes())) =
                s.members[m].predict_proba(features);
          return s.meta->predict_proba(meta);
        }
      },
      state_);
}

std::vector<int> argmax_rows(const MatrixD& proba) {
  std::vector<int> out(static_cast<std::size_t>(proba.rows()));
  for (Eigen::Index i = 0; i < proba.rows(); ++i) {
    Eigen::Index arg;
    proba.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

std::vector<int> Model::predict(const MatrixD& features) const {
  return argmax_rows(predict_proba(features));
}

Model train(const ClassifierSpec& spec, const LabeledMatrix& data) {
  spec.validate();
  data.validate();
  std::vector<bool> seen(data.num_classes(), false);
  std::size_t distinct = 0;
  for (int l : data.labels)
    if (!seen[static_cast<std::size_t>(l)]) seen[static_cast<std::size_t>(l)] = true, ++distinct;
  if (distinct < 2) fail(ErrorCategory::data, "training data contains a single class");

  const auto d = static_cast<int>(data.features.cols());
  Model::State state = std::visit(
      [&](const auto& h) -> Model::State {
        using H = std::decay_t<decltype(h)>;
        if constexpr (std::is_same_v<H, LogRegParams>) {
          return detail::fit_logreg(data, h);
        } else if constexpr (std::is_same_v<H, MlpParams>) {
          return detail::fit_mlp(data, h, spec.seed);
        } else if constexpr (std::is_same_v<H, ForestParams>) {
          return detail::fit_forest(data, h, spec.seed);
        } else {
          return detail::fit_boosting(data, h);
        }
      },
      spec.hyper);
  return Model(std::move(state), data.class_names, d);
}

MatrixD soft_vote(std::span<const Model> models, const MatrixD& features) {
  if (models.size() < 2) fail(ErrorCategory::config, "soft_vote needs at least two models");
  for (const auto& m : models)
    if (m.class_names() != models.front().class_names())
      fail(ErrorCategory::validation, "soft_vote members disagree on class names");
  MatrixD sum = models.front().predict_proba(features);
  for (std::size_t i = 1; i < models.size(); ++i) sum += models[i].predict_proba(features);
  return sum / static_cast<double>(models.size());
}

Model make_vote(std::vector<Model> members) {
  if (members.size() < 2) fail(ErrorCategory::config, "a vote needs at least two members");
  for (const auto& m : members)
    if (m.class_names() != members.front().class_names() ||
        m.num_features() != members.front().num_features())
      fail(ErrorCategory::validation, "vote members disagree on classes or feature width");
  auto names = members.front().class_names();
  const int d = members.front().num_features();
  return Model(VoteState{std::move(members)}, std::move(names), d);
}

std::vector<int> stratified_folds(std::span<const int> labels, std::size_t num_classes,
                                  int folds, std::uint64_t seed) {
  if (folds < 2) fail(ErrorCategory::config, "stacking needs at least 2 folds");
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[static_cast<std::size_t>(labels[i])].push_back(i);
  Rng rng = make_rng(seed);
  std::vector<int> fold_of(labels.size(), -1);
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& idx = by_class[c];
    if (idx.empty()) continue;
    if (idx.size() < static_cast<std::size_t>(folds))
      fail(ErrorCategory::data,
           "class " + std::to_string(c) + " has " + std::to_string(idx.size()) +
               " examples, so some of the " + std::to_string(folds) +
               " folds would miss it; use at most " + std::to_string(idx.size()) + " folds");
    olid::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k)
      fold_of[idx[k]] = static_cast<int>(k % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

Model train_stacked(std::span<const ClassifierSpec> member_specs, const LabeledMatrix& data,
                    int folds, std::uint64_t seed) {
  if (member_specs.empty()) fail(ErrorCategory::config, "stacking needs at least one member");
  data.validate();
  const auto fold_of = stratified_folds(data.labels, data.num_classes(), folds, seed);
  const auto K = static_cast<Eigen::Index>(data.num_classes());
  const auto n = static_cast<Eigen::Index>(data.rows());

  MatrixD meta_features(n, static_cast<Eigen::Index>(member_specs.size()) * K);
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train_rows, held_rows;
    for (std::size_t i = 0; i < fold_of.size(); ++i)
      (fold_of[i] == f ? held_rows : train_rows).push_back(i);
    const auto fold_train = data.subset(train_rows);
    const auto fold_held = data.subset(held_rows);
    for (std::size_t m = 0; m < member_specs.size(); ++m) {
      const MatrixD p = train(member_specs[m], fold_train).predict_proba(fold_held.features);
      for (std::size_t r = 0; r < held_rows.size(); ++r)
        meta_features.block(static_cast<Eigen::Index>(held_rows[r]),
                            static_cast<Eigen::Index>(m) * K, 1, K) =
            p.row(static_cast<Eigen::Index>(r));
    }
  }

  LabeledMatrix meta_data{meta_features, data.labels, data.class_names};
  auto meta = std::make_shared<const Model>(
      train(ClassifierSpec::defaults(ClassifierKind::logreg, seed), meta_data));
  std::vector<Model> members;
  for (const auto& spec : member_specs) members.push_back(train(spec, data));
  return Model(StackState{std::move(members), std::move(meta)}, data.class_names,
               static_cast<int>(data.features.cols()));
}

// ---- persistence -----------------------------------------------------------

namespace {

void put_standardizer(ArtifactWriter& w, const Standardizer& s) {
  w.put("std_mean", std::vector<double>(s.mean.data(), s.mean.data() + s.mean.size()));
  w.put("std_scale", std::vector<double>(s.scale.data(), s.scale.data() + s.scale.size()));
}

Standardizer get_standardizer(const ArtifactReader& r) {
  const auto mean = r.doubles("std_mean");
  const auto scale = r.doubles("std_scale");
  Standardizer s;
  s.mean = Eigen::Map<const VectorD>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  s.scale = Eigen::Map<const VectorD>(scale.data(), static_cast<Eigen::Index>(scale.size()));
  return s;
}

std::vector<double> to_std(const VectorD& v) { return {v.data(), v.data() + v.size()}; }

VectorD to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const VectorD>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void put_trees(ArtifactWriter& w, const std::vector<const Tree*>& trees, Eigen::Index outputs) {
  std::vector<std::int32_t> counts, feature, left, right;
  std::vector<double> threshold;
  Eigen::Index total = 0;
  for (const Tree* t : trees) total += static_cast<Eigen::Index>(t->node_count());
  MatrixD value(total, outputs);
  Eigen::Index row = 0;
  for (const Tree* t : trees) {
    counts.push_back(static_cast<std::int32_t>(t->node_count()));
    feature.insert(feature.end(), t->feature.begin(), t->feature.end());
    left.insert(left.end(), t->left.begin(), t->left.end());
    right.insert(right.end(), t->right.begin(), t->right.end());
    threshold.insert(threshold.end(), t->threshold.begin(), t->threshold.end());
    value.middleRows(row, t->value.rows()) = t->value;
    row += t->value.rows();
  }
  w.put("tree_node_counts", counts);
  w.put("tree_feature", feature);
  w.put("tree_left", left);
  w.put("tree_right", right);
  w.put("tree_threshold", threshold);
  w.put("tree_value", value);
}

std::vector<Tree> get_trees(const ArtifactReader& r) {
  const auto counts = r.ints("tree_node_counts");
  const auto feature = r.ints("tree_feature");
  const auto left = r.ints("tree_left");
  const auto right = r.ints("tree_right");
  const auto threshold = r.doubles("tree_threshold");
  const MatrixD value = r.matrix_f64("tree_value");
  std::vector<Tree> trees;
  std::size_t off = 0;
  for (auto c : counts) {
    const auto n = static_cast<std::size_t>(c);
    if (off + n > feature.size() || static_cast<Eigen::Index>(off + n) > value.rows())
      fail(ErrorCategory::parse, "tree arrays are truncated");
    Tree t;
    t.feature.assign(feature.begin() + off, feature.begin() + off + n);
    t.left.assign(left.begin() + off, left.begin() + off + n);
    t.right.assign(right.begin() + off, right.begin() + off + n);
    t.threshold.assign(threshold.begin() + off, threshold.begin() + off + n);
    t.value = value.middleRows(static_cast<Eigen::Index>(off), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      if (t.feature[i] >= 0 &&
          (t.left[i] <= static_cast<std::int32_t>(i) || t.right[i] <= static_cast<std::int32_t>(i) ||
           t.left[i] >= c || t.right[i] >= c))
        fail(ErrorCategory::parse, "tree node links are invalid");
    trees.push_back(std::move(t));
    off += n;
  }
  return trees;
}

}  // namespace

void save_model(const Model& m, const fs::path& dir, const Provenance& prov) {
  ArtifactWriter w(dir, "classifier");
  w.meta()["model_kind"] = m.kind_name();
  w.meta()["class_names"] = m.class_names();
  w.meta()["num_features"] = m.num_features();
  w.meta()["provenance"] = to_json(prov);
  const auto K = static_cast<Eigen::Index>(m.num_classes());
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, LogRegState>) {
          put_standardizer(w, s.standardizer);
          w.put("weights", s.weights);
          w.put("bias", to_std(s.bias));
        } else if constexpr (std::is_same_v<S, MlpState>) {
          put_standardizer(w, s.standardizer);
          w.put("w1", s.weights.w1);
          w.put("b1", to_std(s.weights.b1));
          w.put("w2", s.weights.w2);
          w.put("b2", to_std(s.weights.b2));
          w.meta()["loss_curve"] = s.loss_curve;
        } else if constexpr (std::is_same_v<S, ForestState>) {
          std::vector<const Tree*> ts;
          for (const auto& t : s.trees) ts.push_back(&t);
          put_trees(w, ts, K);
        } else if constexpr (std::is_same_v<S, BoostingState>) {
          std::vector<const Tree*> ts;
          for (const auto& stage : s.stages)
            for (const auto& t : stage) ts.push_back(&t);
          put_trees(w, ts, 1);
          w.put("init", to_std(s.init));
          w.meta()["learning_rate"] = s.learning_rate;
          w.meta()["stages"] = s.stages.size();
          w.meta()["train_loss"] = s.train_loss;
        } else if constexpr (std::is_same_v<S, VoteState>) {
          w.meta()["members"] = s.members.size();
          for (std::size_t i = 0; i < s.members.size(); ++i)
            save_model(s.members[i], dir / ("member_" + std::to_string(i)), prov);
        } else {
          w.meta()["members"] = s.members.size();
          for (std::size_t i = 0; i < s.members.size(); ++i)
            save_model(s.members[i], dir / ("member_" + std::to_string(i)), prov);
          save_model(*s.meta, dir / "meta", prov);
        }
      },
      m.state());
  w.finish();
}

Model load_model(const fs::path& dir) {
  ArtifactReader r(dir, "classifier");
  const auto& meta = r.meta();
  const auto kind = meta.at("model_kind").get<std::string>();
  auto names = meta.at("class_names").get<std::vector<std::string>>();
  const int d = meta.at("num_features").get<int>();
  const auto members = [&] {
    std::vector<Model> out;
    const auto count = meta.at("members").get<std::size_t>();
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(load_model(dir / ("member_" + std::to_string(i))));
    return out;
  };
  if (kind == "logreg") {
    LogRegState s{get_standardizer(r), r.matrix_f64("weights"), to_eigen(r.doubles("bias"))};
    return Model(std::move(s), std::move(names), d);
  }
  if (kind == "mlp") {
    MlpState s;
    s.standardizer = get_standardizer(r);
    s.weights = {r.matrix_f64("w1"), to_eigen(r.doubles("b1")), r.matrix_f64("w2"),
                 to_eigen(r.doubles("b2"))};
    s.loss_curve = meta.value("loss_curve", std::vector<double>{});
    return Model(std::move(s), std::move(names), d);
  }
  if (kind == "random_forest") return Model(ForestState{get_trees(r)}, std::move(names), d);
  if (kind == "gradient_boosting") {
    BoostingState s;
    s.init = to_eigen(r.doubles("init"));
    s.learning_rate = meta.at("learning_rate").get<double>();
    s.train_loss = meta.value("train_loss", std::vector<double>{});
    auto flat = get_trees(r);
    const auto K = static_cast<std::size_t>(s.init.size());
    if (K == 0 || flat.size() % K != 0) fail(ErrorCategory::parse, "boosting tree count mismatch");
    for (std::size_t i = 0; i < flat.size(); i += K)
      s.stages.emplace_back(std::make_move_iterator(flat.begin() + static_cast<std::ptrdiff_t>(i)),
                            std::make_move_iterator(flat.begin() + static_cast<std::ptrdiff_t>(i + K)));
    return Model(std::move(s), std::move(names), d);
  }
  if (kind == "vote") return Model(VoteState{members()}, std::move(names), d);
  if (kind == "stack") {
    auto meta_model = std::make_shared<const Model>(load_model(dir / "meta"));
    return Model(StackState{members(), std::move(meta_model)}, std::move(names), d);
  }
  fail(ErrorCategory::parse, "unknown classifier kind '" + kind + "' in " + dir.string());
}

}  // namespace olid
