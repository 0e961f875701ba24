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

#include "olid/pipeline.hpp"

#include <algorithm>
#include <array>
#include <set>

#include "olid/error.hpp"

namespace olid {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 8> kModelNames{{
    {ModelKind::logreg, "logreg"},
    {ModelKind::mlp, "mlp"},
    {ModelKind::random_forest, "random_forest"},
    {ModelKind::gradient_boosting, "gradient_boosting"},
    {ModelKind::vote, "vote"},
    {ModelKind::stack, "stack"},
    {ModelKind::ngram, "ngram"},
    {ModelKind::cnn, "cnn"},
}};

constexpr std::array<ClassifierKind, 4> kMemberKinds{
    ClassifierKind::logreg, ClassifierKind::mlp, ClassifierKind::random_forest,
    ClassifierKind::gradient_boosting};

constexpr std::size_t kEnsembleSize = 3;

}  // namespace

ModelKind parse_model_kind(std::string_view s) {
  if (s == "rf") return ModelKind::random_forest;
  if (s == "gb") return ModelKind::gradient_boosting;
  for (const auto& [k, name] : kModelNames)
    if (name == s) return k;
  fail(ErrorCategory::config, "unknown model '" + std::string(s) + "'");
}

std::string_view to_string(ModelKind k) noexcept {
  for (const auto& [kind, name] : kModelNames)
    if (kind == k) return name;
  return "?";
}

FeatureKind parse_feature_kind(std::string_view s) {
  if (s == "naive") return FeatureKind::naive;
  if (s == "w2v") return FeatureKind::w2v;
  if (s == "fused") return FeatureKind::fused;
  fail(ErrorCategory::config, "unknown feature set '" + std::string(s) + "'");
}

std::string_view to_string(FeatureKind k) noexcept {
  switch (k) {
    case FeatureKind::naive: return "naive";
    case FeatureKind::w2v: return "w2v";
    case FeatureKind::fused: return "fused";
  }
  return "?";
}

bool uses_features(ModelKind k) noexcept { return k != ModelKind::ngram && k != ModelKind::cnn; }

// ---- RunConfig --------------------------------------------------------------

void RunConfig::set_seed(std::uint64_t s) {
  seed = s;
  embedding.seed = s;
  ngram.seed = s;
  cnn.seed = s;
}

ClassifierSpec RunConfig::classifier_spec(ClassifierKind kind) const {
  Json j{{"kind", to_string(kind)}, {"seed", seed}};
  const auto it = classifiers.find(std::string(to_string(kind)));
  if (it != classifiers.end()) j["hyperparameters"] = *it;
  auto spec = ClassifierSpec::from_json(j);
  spec.validate();
  return spec;
}

void RunConfig::validate() const {
  require(stack_folds >= 2, ErrorCategory::config, "stack_folds must be >= 2");
  require(classifiers.is_object(), ErrorCategory::config, "classifiers must be an object");
  for (const auto& [name, h] : classifiers.items()) {
    require(h.is_object(), ErrorCategory::config, "classifiers." + name + " must be an object");
    classifier_spec(parse_classifier_kind(name));
  }
  static const std::set<std::string> known{"train",        "trial",      "test",
                                           "test_labels",  "contractions", "hate",
                                           "positive",     "negative"};
  for (const auto& [k, v] : paths)
    require(known.count(k) != 0, ErrorCategory::config, "unknown path key '" + k + "'");
  if (uses_features(model) && features != FeatureKind::naive) embedding.validate();
  if (model == ModelKind::ngram) ngram.validate();
  if (model == ModelKind::cnn) cnn.validate();
}

Json RunConfig::to_json() const {
  return Json{{"task", to_string(task)},
              {"model", to_string(model)},
              {"features", to_string(features)},
              {"pooling", to_string(pooling)},
              {"seed", seed},
              {"stack_folds", stack_folds},
              {"embedding", embedding.to_json()},
              {"ngram", ngram.to_json()},
              {"cnn", cnn.to_json()},
              {"classifiers", classifiers},
              {"paths", paths}};
}

RunConfig RunConfig::from_json(const Json& j) {
  require(j.is_object(), ErrorCategory::config, "run config must be a JSON object");
  static const std::set<std::string> known{"task",  "model",     "features", "pooling",
                                           "seed",  "stack_folds", "embedding", "ngram",
                                           "cnn",   "classifiers", "paths"};
  for (const auto& [k, v] : j.items())
    require(known.count(k) != 0, ErrorCategory::config, "unknown config key '" + k + "'");
  RunConfig c;
  try {
    if (j.contains("task")) c.task = parse_task(j.at("task").get<std::string>());
    if (j.contains("model")) c.model = parse_model_kind(j.at("model").get<std::string>());
    if (j.contains("features")) c.features = parse_feature_kind(j.at("features").get<std::string>());
    if (j.contains("pooling")) c.pooling = parse_pooling(j.at("pooling").get<std::string>());
    c.stack_folds = j.value("stack_folds", c.stack_folds);
    if (j.contains("embedding")) c.embedding = EmbeddingConfig::from_json(j.at("embedding"));
    if (j.contains("ngram")) c.ngram = NgramConfig::from_json(j.at("ngram"));
    if (j.contains("cnn")) c.cnn = CnnConfig::from_json(j.at("cnn"));
    if (j.contains("classifiers")) c.classifiers = j.at("classifiers");
    if (j.contains("paths")) c.paths = j.at("paths").get<std::map<std::string, std::string>>();
    c.set_seed(j.value("seed", c.seed));
  } catch (const Json::exception& e) {
    fail(ErrorCategory::config, std::string("bad run config: ") + e.what());
  }
  return c;
}

ContractionTable resolve_contractions(const RunConfig& cfg) {
  const auto it = cfg.paths.find("contractions");
  return it == cfg.paths.end() ? ContractionTable::builtin() : ContractionTable::load(it->second);
}

LexiconSet resolve_lexicons(const RunConfig& cfg) {
  auto set = builtin_lexicons();
  const auto pick = [&](const char* key, LexiconName name, Lexicon& slot) {
    const auto it = cfg.paths.find(key);
    if (it != cfg.paths.end()) slot = load_lexicon(it->second, name);
  };
  pick("hate", LexiconName::hate, set.hate);
  pick("positive", LexiconName::positive, set.positive);
  pick("negative", LexiconName::negative, set.negative);
  return set;
}

// ---- Pipeline ---------------------------------------------------------------

std::vector<TokenSeq> Pipeline::preprocess(const Dataset& d) const {
  return preprocess_corpus(d, table_);
}

MatrixD Pipeline::features(std::span<const TokenSeq> texts) const {
  require(uses_features(cfg_.model), ErrorCategory::config,
          "model '" + std::string(to_string(cfg_.model)) + "' does not use feature vectors");
  const auto n = static_cast<Eigen::Index>(texts.size());
  Eigen::Index width = 0;
  if (cfg_.features != FeatureKind::w2v) width += kLexiconFeatureCount;
  if (cfg_.features != FeatureKind::naive)
    width += pooled_dim(cfg_.pooling, embeddings_->dim());
  MatrixD x(n, width);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& t = texts[static_cast<std::size_t>(i)];
    switch (cfg_.features) {
      case FeatureKind::naive: {
        const auto f = extract_features(t, lexicons_).flatten();
        for (std::size_t k = 0; k < f.size(); ++k) x(i, static_cast<Eigen::Index>(k)) = f[k];
        break;
      }
      case FeatureKind::w2v:
        x.row(i) = embed_tweet(t, *embeddings_, cfg_.pooling).transpose();
        break;
      case FeatureKind::fused:
        x.row(i) = fuse(extract_features(t, lexicons_), embed_tweet(t, *embeddings_, cfg_.pooling))
                       .transpose();
        break;
    }
  }
  return x;
}

Pipeline Pipeline::train(const RunConfig& cfg, const Dataset& train, const Dataset* val,
                         TrainSummary* summary) {
  cfg.validate();
  Pipeline p;
  p.cfg_ = cfg;
  p.table_ = resolve_contractions(cfg);
  p.lexicons_ = resolve_lexicons(cfg);
  const auto& names = olid::class_names(cfg.task);

  const auto task_train = filter_for_task(train, cfg.task);
  require(!task_train.empty(), ErrorCategory::data,
          "no training records labeled for task " + std::string(to_string(cfg.task)));
  const auto labels = gold_labels(task_train, cfg.task);
  const auto tokens = p.preprocess(task_train);

  std::optional<Dataset> task_val;
  std::vector<int> val_labels;
  if (val) {
    task_val = filter_for_task(*val, cfg.task);
    require(!task_val->empty(), ErrorCategory::data,
            "no validation records labeled for task " + std::string(to_string(cfg.task)));
    val_labels = gold_labels(*task_val, cfg.task);
  }

  TrainSummary local;
  TrainSummary& sum = summary ? *summary : local;

  if (uses_features(cfg.model)) {
    if (cfg.features != FeatureKind::naive) {
      EmbeddingTrainLog log;
      p.embeddings_ = train_embeddings(p.preprocess(train), cfg.embedding, &log);
      sum.embedding_log = std::move(log);
    }
    LabeledMatrix data{p.features(tokens), labels, names};
    std::optional<MatrixD> val_x;
    if (task_val) val_x = p.features(p.preprocess(*task_val));

    if (cfg.model == ModelKind::vote || cfg.model == ModelKind::stack) {
      std::vector<std::pair<ClassifierKind, Model>> members;
      for (const auto k : kMemberKinds) members.emplace_back(k, olid::train(cfg.classifier_spec(k), data));
      if (val_x) {
        std::vector<double> scores;
        for (const auto& [k, m] : members) {
          const double f1 = macro_f1(confusion(val_labels, m.predict(*val_x), names));
          scores.push_back(f1);
          sum.member_scores.emplace_back(std::string(to_string(k)), f1);
        }
        std::vector<std::size_t> order(members.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
        order.resize(kEnsembleSize);
        std::sort(order.begin(), order.end());
        std::vector<std::pair<ClassifierKind, Model>> kept;
        for (const auto i : order) kept.push_back(std::move(members[i]));
        members = std::move(kept);
      }
      if (cfg.model == ModelKind::vote) {
        std::vector<Model> ms;
        for (auto& [k, m] : members) ms.push_back(std::move(m));
        p.classifier_ = std::make_shared<Model>(make_vote(std::move(ms)));
      } else {
        std::vector<ClassifierSpec> specs;
        for (const auto& [k, m] : members) specs.push_back(cfg.classifier_spec(k));
        p.classifier_ =
            std::make_shared<Model>(train_stacked(specs, data, cfg.stack_folds, cfg.seed));
      }
    } else {
      const auto kind = static_cast<ClassifierKind>(static_cast<int>(cfg.model));
      p.classifier_ = std::make_shared<Model>(olid::train(cfg.classifier_spec(kind), data));
    }
  } else if (cfg.model == ModelKind::ngram) {
    p.ngram_ = std::make_shared<NgramModel>(
        train_supervised(LabeledTokens{tokens, labels}, cfg.ngram, names));
  } else {
    require(task_val.has_value(), ErrorCategory::config,
            "cnn training needs a validation set for early stopping");
    const auto val_tokens = p.preprocess(*task_val);
    auto [model, trace] =
        train_cnn(CnnData{tokens, labels}, CnnData{val_tokens, val_labels}, cfg.cnn, names);
    p.cnn_ = std::make_shared<CnnModel>(std::move(model));
    sum.cnn_trace = std::move(trace);
  }

  if (task_val) {
    sum.validation = report(val_labels, p.predict(*task_val), names);
    sum.majority_baseline_f1 =
        majority_baseline_f1(val_labels, majority_class(labels, names.size()), names);
  }
  return p;
}

MatrixD Pipeline::predict_proba(const Dataset& d) const {
  const auto tokens = preprocess(d);
  if (classifier_) return classifier_->predict_proba(features(tokens));
  if (ngram_) return olid::predict_proba(*ngram_, tokens);
  return olid::predict_proba(*cnn_, tokens);
}

std::vector<int> Pipeline::predict(const Dataset& d) const {
  return argmax_rows(predict_proba(d));
}

void Pipeline::save(const std::filesystem::path& dir, const Provenance& prov) const {
  ArtifactWriter w(dir, "pipeline");
  w.meta()["config"] = cfg_.to_json();
  w.meta()["provenance"] = to_json(prov);
  w.meta()["class_names"] = class_names();
  Json table = Json::array();
  for (const auto& [k, v] : table_.entries()) table.push_back({k, v});
  w.meta()["contractions"] = std::move(table);
  Json lex = Json::object();
  for (const Lexicon* l : {&lexicons_.hate, &lexicons_.positive, &lexicons_.negative}) {
    std::vector<std::string> words(l->words.begin(), l->words.end());
    std::sort(words.begin(), words.end());
    lex[std::string(to_string(l->name))] = std::move(words);
  }
  w.meta()["lexicons"] = std::move(lex);
  if (embeddings_) save_embeddings(*embeddings_, dir / "embeddings", prov);
  if (classifier_) save_model(*classifier_, dir / "model", prov);
  if (ngram_) save_ngram(*ngram_, dir / "model", prov);
  if (cnn_) save_cnn(*cnn_, dir / "model", prov);
  w.finish();
}

Pipeline Pipeline::load(const std::filesystem::path& dir) {
  ArtifactReader r(dir, "pipeline");
  Pipeline p;
  const auto& meta = r.meta();
  try {
    p.cfg_ = RunConfig::from_json(meta.at("config"));
    std::vector<std::pair<std::string, std::string>> entries;
    for (const auto& e : meta.at("contractions"))
      entries.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    p.table_ = ContractionTable(std::move(entries));
    const auto words = [&](LexiconName n) {
      const auto v = meta.at("lexicons").at(std::string(to_string(n))).get<std::vector<std::string>>();
      return Lexicon{n, {v.begin(), v.end()}, 0};
    };
    p.lexicons_ = LexiconSet{words(LexiconName::hate), words(LexiconName::positive),
                             words(LexiconName::negative)};
  } catch (const Json::exception& e) {
    fail(ErrorCategory::parse, "bad pipeline manifest in " + dir.string() + ": " + e.what());
  }
  if (uses_features(p.cfg_.model)) {
    if (p.cfg_.features != FeatureKind::naive) p.embeddings_ = load_embeddings(dir / "embeddings");
    p.classifier_ = std::make_shared<Model>(load_model(dir / "model"));
  } else if (p.cfg_.model == ModelKind::ngram) {
    p.ngram_ = std::make_shared<NgramModel>(load_ngram(dir / "model"));
  } else {
    p.cnn_ = std::make_shared<CnnModel>(load_cnn(dir / "model"));
  }
  return p;
}

}  // namespace olid
