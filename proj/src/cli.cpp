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

#include "olid/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <CLI11.hpp>

#include "olid/error.hpp"
#include "olid/pipeline.hpp"
#include "olid/tuner.hpp"
#include "olid/version.hpp"

namespace olid {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDataDirEnv = "OLID_DATA_DIR";

std::string level_suffix(Task t) {
  switch (t) {
    case Task::A: return "a";
    case Task::B: return "b";
    case Task::C: return "c";
  }
  return "a";
}

/// File name of a data role inside the data directory.
std::string default_file(const std::string& role, Task t) {
  if (role == "train") return "olid-training-v1.0.tsv";
  if (role == "trial") return "offenseval-trial.tsv";
  if (role == "test") return "testset-level" + level_suffix(t) + ".tsv";
  if (role == "test_labels") return "labels-level" + level_suffix(t) + ".csv";
  return role;
}

/// Explicit path from the config, else the default file under $OLID_DATA_DIR.
std::optional<fs::path> data_path(const RunConfig& cfg, const std::string& role) {
  if (const auto it = cfg.paths.find(role); it != cfg.paths.end()) return fs::path(it->second);
  if (const char* dir = std::getenv(kDataDirEnv); dir && *dir)
    return fs::path(dir) / default_file(role, cfg.task);
  return std::nullopt;
}

fs::path required_path(const RunConfig& cfg, const std::string& role) {
  const auto p = data_path(cfg, role);
  if (!p)
    fail(ErrorCategory::config, "no " + role + " file: pass --" + role + " or set " + kDataDirEnv);
  return *p;
}

Provenance provenance_of(const RunConfig& cfg) {
  return Provenance{config_hash(cfg.to_json()), cfg.seed, kVersion};
}

std::string one_line(std::string s) {
  for (auto& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  return s;
}

/// `id,label` rows (no header), labels resolved against the task's classes.
std::vector<std::pair<std::string, int>> parse_label_rows(const std::string& contents, Task task,
                                                          const std::string& what) {
  const auto& names = class_names(task);
  std::vector<std::pair<std::string, int>> rows;
  std::istringstream in(contents);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      fail(ErrorCategory::parse,
           what + " line " + std::to_string(number) + ": expected `id,label`");
    const auto id = line.substr(0, comma);
    const auto label = line.substr(comma + 1);
    const auto it = std::find(names.begin(), names.end(), label);
    if (it == names.end())
      fail(ErrorCategory::parse, what + " line " + std::to_string(number) + ": label '" + label +
                                     "' is not a task " + std::string(to_string(task)) + " class");
    rows.emplace_back(id, static_cast<int>(it - names.begin()));
  }
  if (rows.empty()) fail(ErrorCategory::data, what + " is empty");
  return rows;
}

void write_text(const fs::path& p, const std::string& s) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  write_file(p, s);
}

// ---- shared run-config options ----------------------------------------------

struct RunOptions {
  std::string config_file;
  std::string task, model, features, pooling;
  std::uint64_t seed = 42;
  std::string train, trial, test, test_labels, contractions;
  std::vector<std::string> lexicons;
  CLI::Option* seed_opt = nullptr;

  void add_to(CLI::App& app, bool with_model) {
    app.add_option("--config", config_file, "JSON run config; flags override its values");
    app.add_option("--task", task, "A, B or C");
    if (with_model) {
      app.add_option("--model", model,
                     "logreg, mlp, rf, gb, vote, stack, ngram or cnn");
      app.add_option("--features", features, "naive, w2v or fused (classic models)");
      app.add_option("--pooling", pooling, "mean, max, min, max_concat_min, mean_concat_max");
    }
    seed_opt = app.add_option("--seed", seed, "random seed (default 42)");
    app.add_option("--train", train, "OLID training TSV");
    app.add_option("--trial", trial, "labeled validation TSV (training format)");
    app.add_option("--test", test, "test tweets TSV");
    app.add_option("--test-labels", test_labels, "test labels CSV");
    app.add_option("--contractions", contractions, "contraction table TSV");
    app.add_option("--lexicon", lexicons, "<hate|positive|negative>=<path>, repeatable");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_file.empty()) {
      Json j;
      try {
        j = Json::parse(read_file(config_file));
      } catch (const Json::exception& e) {
        fail(ErrorCategory::config, "cannot parse " + config_file + ": " + e.what());
      }
      cfg = RunConfig::from_json(j);
    }
    if (!task.empty()) cfg.task = parse_task(task);
    if (!model.empty()) cfg.model = parse_model_kind(model);
    if (!features.empty()) cfg.features = parse_feature_kind(features);
    if (!pooling.empty()) cfg.pooling = parse_pooling(pooling);
    if (seed_opt && seed_opt->count()) cfg.set_seed(seed);
    const auto set = [&](const char* key, const std::string& v) {
      if (!v.empty()) cfg.paths[key] = v;
    };
    set("train", train);
    set("trial", trial);
    set("test", test);
    set("test_labels", test_labels);
    set("contractions", contractions);
    for (const auto& spec : lexicons) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos)
        fail(ErrorCategory::config, "--lexicon expects name=path, got '" + spec + "'");
      const auto name = parse_lexicon_name(spec.substr(0, eq));
      cfg.paths[std::string(to_string(name))] = spec.substr(eq + 1);
    }
    cfg.validate();
    return cfg;
  }
};

Dataset load_train(const RunConfig& cfg) {
  return load_olid_training(required_path(cfg, "train"), SplitTag::train);
}

std::optional<Dataset> load_trial(const RunConfig& cfg, bool required) {
  const auto p = data_path(cfg, "trial");
  if (!p || (!required && !fs::exists(*p))) {
    if (required) required_path(cfg, "trial");
    return std::nullopt;
  }
  return load_olid_training(*p, SplitTag::trial);
}

std::optional<Dataset> load_test(const RunConfig& cfg) {
  const auto t = data_path(cfg, "test"), l = data_path(cfg, "test_labels");
  if (!t || !l || !fs::exists(*t) || !fs::exists(*l)) return std::nullopt;
  return load_test_set(*t, *l, cfg.task);
}

// ---- commands ---------------------------------------------------------------

int cmd_prep(const std::string& input, const std::string& format, const std::string& output,
             const std::string& contractions, std::ostream& err) {
  Dataset d;
  if (format == "olid")
    d = load_olid_training(input);
  else if (format == "tweets")
    d = parse_unlabeled(read_file(input));
  else
    fail(ErrorCategory::config, "unknown input format '" + format + "' (olid or tweets)");
  const auto table =
      contractions.empty() ? ContractionTable::builtin() : ContractionTable::load(contractions);
  const auto seqs = preprocess_corpus(d, table);
  write_text(output, format_token_file(seqs));
  err << "prep: " << seqs.size() << " tweets -> " << output << "\n";
  return 0;
}

void write_summary(const fs::path& dir, const TrainSummary& s, std::ostream& out) {
  if (s.validation) {
    Json j = s.validation->to_json();
    if (s.majority_baseline_f1) j["majority_baseline_macro_f1"] = *s.majority_baseline_f1;
    if (!s.member_scores.empty()) {
      Json m = Json::object();
      for (const auto& [name, f1] : s.member_scores) m[name] = f1;
      j["member_macro_f1"] = m;
    }
    write_text(dir / "report.json", j.dump(2) + "\n");
    write_text(dir / "report.txt", s.validation->to_text());
    write_text(dir / "confusion.csv", s.validation->confusion_csv());
    out << s.validation->to_text();
    if (s.majority_baseline_f1)
      out << "majority baseline macro-F1: " << *s.majority_baseline_f1 << "\n";
  }
  if (s.cnn_trace) write_text(dir / "trace.csv", s.cnn_trace->to_csv());
  if (s.embedding_log) {
    std::ostringstream csv;
    csv.precision(17);
    csv << "epoch,loss\n";
    for (std::size_t e = 0; e < s.embedding_log->epoch_loss.size(); ++e)
      csv << e + 1 << ',' << s.embedding_log->epoch_loss[e] << '\n';
    write_text(dir / "embedding_trace.csv", csv.str());
  }
}

int cmd_train(const RunOptions& o, const std::string& out_dir, std::ostream& out,
              std::ostream& err) {
  const auto cfg = o.resolve();
  err << "seed=" << cfg.seed << "\n";
  const auto train = load_train(cfg);
  const auto trial = load_trial(cfg, cfg.model == ModelKind::cnn);
  TrainSummary summary;
  const auto start = std::chrono::steady_clock::now();
  const auto p = Pipeline::train(cfg, train, trial ? &*trial : nullptr, &summary);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  p.save(out_dir, provenance_of(cfg));
  write_summary(out_dir, summary, out);
  err << "train: " << to_string(cfg.model) << " task " << to_string(cfg.task) << " in "
      << std::fixed << std::setprecision(2) << secs << "s -> " << out_dir << "\n";
  return 0;
}

/// Config section the search space of a model family patches.
std::string tuned_section(const RunConfig& cfg) {
  if (cfg.model == ModelKind::ngram) return "ngram";
  if (cfg.model == ModelKind::cnn) return "cnn";
  require(cfg.features != FeatureKind::naive, ErrorCategory::config,
          "naive features have no tunable embedding parameters");
  return "embedding";
}

int cmd_tune(const RunOptions& o, int trials, const std::string& space_file,
             const std::string& out_csv, const std::string& out_best, std::ostream& out,
             std::ostream& err) {
  const auto base = o.resolve();
  err << "seed=" << base.seed << "\n";
  const auto section = tuned_section(base);
  ParamSpace space;
  if (!space_file.empty()) {
    try {
      space = ParamSpace::from_json(Json::parse(read_file(space_file)));
    } catch (const Json::exception& e) {
      fail(ErrorCategory::config, "cannot parse " + space_file + ": " + e.what());
    }
  } else if (section == "ngram") {
    space = default_ngram_space();
  } else if (section == "embedding") {
    space = default_embedding_space();
  } else {
    fail(ErrorCategory::config, "no default search space for cnn; pass --space");
  }
  const auto train = load_train(base);
  const auto trial = load_trial(base, true);

  const auto config_for = [&](const Json& sampled) {
    Json j = base.to_json();
    for (const auto& [k, v] : sampled.items()) j[section][k] = v;
    return RunConfig::from_json(j);
  };
  const Objective objective = [&](const Json& sampled) {
    TrainSummary s;
    Pipeline::train(config_for(sampled), train, &*trial, &s);
    return s.validation->macro_f1;
  };
  const auto res = random_search(space, trials, objective, base.seed);
  for (const auto& t : res.trials)
    if (t.failed) err << "tune: trial " << t.index << " failed: " << one_line(t.note) << "\n";
  write_text(out_csv, res.to_csv(space));
  auto best = config_for(res.best.config).to_json();
  write_text(out_best, best.dump(2) + "\n");
  out << "best trial " << res.best.index << " macro-F1 " << res.best.macro_f1 << " "
      << res.best.config.dump() << "\n";
  return 0;
}

void write_predictions(const fs::path& path, const Dataset& d, const std::vector<int>& pred,
                       const std::vector<std::string>& names, const Json& meta) {
  std::string csv;
  for (std::size_t i = 0; i < d.size(); ++i)
    csv += d[i].id + "," + names[static_cast<std::size_t>(pred[i])] + "\n";
  write_text(path, csv);
  write_text(fs::path(path.string() + ".meta.json"), meta.dump(2) + "\n");
}

int cmd_predict(const std::string& model_dir, const std::string& input, const std::string& output,
                std::ostream& err) {
  const auto p = Pipeline::load(model_dir);
  const Json manifest = Json::parse(read_file(fs::path(model_dir) / "manifest.json"));
  err << "seed=" << p.config().seed << "\n";
  const auto d = parse_unlabeled(read_file(input));
  const auto pred = p.predict(d);
  write_predictions(output, d, pred, p.class_names(),
                    Json{{"provenance", manifest.at("provenance")},
                         {"task", to_string(p.config().task)},
                         {"model", to_string(p.config().model)},
                         {"rows", d.size()}});
  err << "predict: " << d.size() << " rows -> " << output << "\n";
  return 0;
}

int cmd_eval(const std::string& task_name, const std::string& gold_file,
             const std::string& pred_file, const std::string& out_prefix, std::ostream& out) {
  const auto task = parse_task(task_name);
  const auto gold_rows = parse_label_rows(read_file(gold_file), task, "gold file");
  const auto pred_rows = parse_label_rows(read_file(pred_file), task, "prediction file");
  std::unordered_map<std::string, int> by_id;
  for (const auto& [id, y] : pred_rows)
    if (!by_id.emplace(id, y).second)
      fail(ErrorCategory::validation, "prediction file: duplicate id " + id);
  std::vector<int> gold, pred;
  std::string missing;
  for (const auto& [id, y] : gold_rows) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
      missing += " " + id;
      continue;
    }
    gold.push_back(y);
    pred.push_back(it->second);
  }
  if (!missing.empty()) fail(ErrorCategory::join, "ids without a prediction:" + missing);
  if (pred_rows.size() != gold_rows.size())
    fail(ErrorCategory::join, "prediction file has ids absent from the gold file");
  const auto rep = report(gold, pred, class_names(task));
  out << rep.to_text();
  if (!out_prefix.empty()) {
    write_text(out_prefix + ".json", rep.to_json().dump(2) + "\n");
    write_text(out_prefix + ".txt", rep.to_text());
    write_text(out_prefix + ".confusion.csv", rep.confusion_csv());
  }
  return 0;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  return out;
}

std::string default_bench_models() {
  std::string s;
  for (const char* f : {"naive", "w2v", "fused"})
    for (const char* m : {"logreg", "mlp", "random_forest", "gradient_boosting", "vote", "stack"})
      s += std::string(f) + "+" + m + ",";
  return s + "ngram";
}

std::string fmt(std::optional<double> v) {
  if (!v) return "NA";
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << *v;
  return s.str();
}

int cmd_bench(const RunOptions& o, const std::string& tasks, const std::string& models,
              const std::string& out_csv, std::ostream& out, std::ostream& err) {
  const auto base = o.resolve();
  err << "seed=" << base.seed << "\n";
  const auto train = load_train(base);
  const auto trial = load_trial(base, true);
  std::string csv = "model,features,task,val_macro_f1,test_macro_f1,majority_baseline_f1,seconds\n";
  struct Row {
    std::string model, features, task;
    std::optional<double> val, test;
  };
  std::vector<Row> rows;
  for (const auto& task_name : split_list(tasks)) {
    for (const auto& entry : split_list(models)) {
      RunConfig cfg = base;
      cfg.task = parse_task(task_name);
      // Per-task test files come from the data directory unless the config names them.
      if (cfg.task != base.task) {
        cfg.paths.erase("test");
        cfg.paths.erase("test_labels");
      }
      const auto plus = entry.find('+');
      if (plus == std::string::npos) {
        cfg.model = parse_model_kind(entry);
      } else {
        cfg.features = parse_feature_kind(entry.substr(0, plus));
        cfg.model = parse_model_kind(entry.substr(plus + 1));
      }
      cfg.validate();
      const auto start = std::chrono::steady_clock::now();
      TrainSummary s;
      const auto p = Pipeline::train(cfg, train, &*trial, &s);
      std::optional<double> test_f1;
      if (const auto test = load_test(cfg)) {
        const auto gold = gold_labels(*test, cfg.task);
        test_f1 = macro_f1(confusion(gold, p.predict(*test), p.class_names()));
      }
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const std::string feat = uses_features(cfg.model) ? std::string(to_string(cfg.features)) : "-";
      std::ostringstream line;
      line << to_string(cfg.model) << ',' << feat << ',' << to_string(cfg.task) << ','
           << fmt(s.validation->macro_f1) << ',' << fmt(test_f1) << ','
           << fmt(s.majority_baseline_f1) << ',' << std::fixed << std::setprecision(2) << secs
           << '\n';
      csv += line.str();
      err << "bench: " << line.str();
      rows.push_back({std::string(to_string(cfg.model)), feat, std::string(to_string(cfg.task)),
                      s.validation->macro_f1, test_f1});
    }
  }
  if (!out_csv.empty()) write_text(out_csv, csv);
  out << std::left << std::setw(20) << "model" << std::setw(8) << "feat" << std::setw(6) << "task"
      << std::setw(10) << "val F1" << "test F1\n";
  for (const auto& r : rows)
    out << std::setw(20) << r.model << std::setw(8) << r.features << std::setw(6) << r.task
        << std::setw(10) << fmt(r.val) << fmt(r.test) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"olidkit: offensive tweet classification toolkit", "olid"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  auto* prep = app.add_subcommand("prep", "normalize and tokenize a tweet file");
  std::string prep_in, prep_format = "olid", prep_out, prep_contractions;
  prep->add_option("--input", prep_in, "input file")->required();
  prep->add_option("--format", prep_format, "olid (training TSV) or tweets (id<TAB>tweet)");
  prep->add_option("--out", prep_out, "token file to write")->required();
  prep->add_option("--contractions", prep_contractions, "contraction table TSV");

  auto* train = app.add_subcommand("train", "train a model and report validation scores");
  RunOptions train_opts;
  train_opts.add_to(*train, true);
  std::string train_out;
  train->add_option("--out", train_out, "model directory to write")->required();

  auto* tune = app.add_subcommand("tune", "random search over embedding or n-gram settings");
  RunOptions tune_opts;
  tune_opts.add_to(*tune, true);
  int trials = 20;
  std::string space_file, tune_csv, tune_best;
  tune->add_option("--trials", trials, "number of trials (default 20)");
  tune->add_option("--space", space_file, "search space JSON");
  tune->add_option("--out-csv", tune_csv, "trial report CSV")->required();
  tune->add_option("--out-best", tune_best, "best run config JSON")->required();

  auto* predict = app.add_subcommand("predict", "write id,label predictions");
  std::string model_dir, pred_in, pred_out;
  predict->add_option("--model-dir", model_dir, "trained model directory")->required();
  predict->add_option("--input", pred_in, "tweets TSV (id<TAB>tweet with header)")->required();
  predict->add_option("--out", pred_out, "prediction CSV")->required();

  auto* eval = app.add_subcommand("eval", "score predictions against gold labels");
  std::string eval_task = "A", gold_file, pred_file, eval_prefix;
  eval->add_option("--task", eval_task, "A, B or C");
  eval->add_option("--gold", gold_file, "gold id,label CSV")->required();
  eval->add_option("--pred", pred_file, "predicted id,label CSV")->required();
  eval->add_option("--out", eval_prefix, "prefix for .json/.txt/.confusion.csv reports");

  auto* bench = app.add_subcommand("bench", "train and score a matrix of models and tasks");
  RunOptions bench_opts;
  bench_opts.add_to(*bench, false);
  std::string bench_tasks = "A,B,C", bench_models = default_bench_models(), bench_out;
  bench->add_option("--tasks", bench_tasks, "comma-separated tasks");
  bench->add_option("--models", bench_models,
                    "comma-separated entries: <features>+<classifier>, ngram or cnn");
  bench->add_option("--out", bench_out, "comparison CSV");

  std::vector<std::string> argv_store{"olid"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error category=usage message=" << one_line(e.what()) << "\n";
    return 2;
  }

  try {
    if (*prep) return cmd_prep(prep_in, prep_format, prep_out, prep_contractions, err);
    if (*train) return cmd_train(train_opts, train_out, out, err);
    if (*tune) return cmd_tune(tune_opts, trials, space_file, tune_csv, tune_best, out, err);
    if (*predict) return cmd_predict(model_dir, pred_in, pred_out, err);
    if (*eval) return cmd_eval(eval_task, gold_file, pred_file, eval_prefix, out);
    if (*bench) return cmd_bench(bench_opts, bench_tasks, bench_models, bench_out, out, err);
  } catch (const Error& e) {
    err << "error category=" << to_string(e.category()) << " message=" << one_line(e.what())
        << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error category=io message=" << one_line(e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error category=internal message=" << one_line(e.what()) << "\n";
    return 1;
  }
  return 2;
}

}  // namespace olid
