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

#include "olid/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "olid/artifact.hpp"
#include "olid/error.hpp"
#include "olid/utf8.hpp"

namespace olid {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

struct Line {
  std::size_t number;  // 1-based
  std::string_view text;
};

// Splits on '\n', strips '\r', drops blank lines, rejects malformed UTF-8.
std::vector<Line> lines_of(std::string_view contents, std::string_view what) {
  if (const auto bad = utf8::first_invalid(contents)) {
    const auto line_no = 1 + std::count(contents.begin(), contents.begin() + *bad, '\n');
    fail(ErrorCategory::parse, std::string(what) + ": invalid UTF-8 at line " +
                                   std::to_string(line_no));
  }
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t start = 0;
  while (start <= contents.size()) {
    auto end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    auto text = contents.substr(start, end - start);
    ++number;
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (!trim(text).empty()) out.push_back({number, text});
    if (end == contents.size()) break;
    start = end + 1;
  }
  return out;
}

bool is_null(std::string_view field) { return upper(trim(field)) == "NULL"; }

OffenseLabel parse_a(std::string_view f, std::size_t line) {
  const auto u = upper(trim(f));
  if (u == "OFF") return OffenseLabel::OFF;
  if (u == "NOT") return OffenseLabel::NOT;
  fail(ErrorCategory::parse, "line " + std::to_string(line) + ": unknown subtask_a label '" +
                                 std::string(f) + "'");
}

TargetLabel parse_b(std::string_view f, std::size_t line) {
  const auto u = upper(trim(f));
  if (u == "TIN") return TargetLabel::TIN;
  if (u == "UNT") return TargetLabel::UNT;
  fail(ErrorCategory::parse, "line " + std::to_string(line) + ": unknown subtask_b label '" +
                                 std::string(f) + "'");
}

TargetType parse_c(std::string_view f, std::size_t line) {
  const auto u = upper(trim(f));
  if (u == "IND") return TargetType::IND;
  if (u == "GRP") return TargetType::GRP;
  if (u == "OTH") return TargetType::OTH;
  fail(ErrorCategory::parse, "line " + std::to_string(line) + ": unknown subtask_c label '" +
                                 std::string(f) + "'");
}

void expect_header(const Line& line, const std::vector<std::string>& want, char sep,
                   std::string_view what) {
  const auto fields = split_fields(line.text, sep);
  bool ok = fields.size() == want.size();
  for (std::size_t i = 0; ok && i < want.size(); ++i) {
    std::string f(trim(fields[i]));
    std::transform(f.begin(), f.end(), f.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    ok = f == want[i];
  }
  if (!ok) fail(ErrorCategory::parse, std::string(what) + ": unexpected header at line " +
                                          std::to_string(line.number));
}

std::vector<std::pair<std::string, std::string>> parse_tweet_rows(std::string_view tsv) {
  const auto lines = lines_of(tsv, "tweets file");
  if (lines.empty()) fail(ErrorCategory::parse, "tweets file: missing header");
  expect_header(lines.front(), {"id", "tweet"}, '\t', "tweets file");
  std::vector<std::pair<std::string, std::string>> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split_fields(lines[i].text, '\t');
    if (fields.size() != 2)
      fail(ErrorCategory::parse, "tweets file line " + std::to_string(lines[i].number) +
                                     ": expected 2 columns, found " +
                                     std::to_string(fields.size()));
    rows.emplace_back(std::string(trim(fields[0])), std::string(fields[1]));
  }
  return rows;
}

}  // namespace

Dataset::Dataset(std::vector<TweetRecord> records, SplitTag split)
    : records_(std::move(records)), split_(split) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(records_.size());
  for (const auto& r : records_) {
    if (r.id.empty()) fail(ErrorCategory::validation, "record with empty id");
    if (!seen.insert(r.id).second) fail(ErrorCategory::validation, "duplicate id " + r.id);
  }
}

Task parse_task(std::string_view s) {
  const auto u = upper(trim(s));
  if (u == "A") return Task::A;
  if (u == "B") return Task::B;
  if (u == "C") return Task::C;
  fail(ErrorCategory::config, "unknown task '" + std::string(s) + "' (expected A, B or C)");
}

std::string_view to_string(Task t) noexcept {
  switch (t) {
    case Task::A: return "A";
    case Task::B: return "B";
    case Task::C: return "C";
  }
  return "?";
}

std::string_view to_string(SplitTag s) noexcept {
  switch (s) {
    case SplitTag::train: return "train";
    case SplitTag::trial: return "trial";
    case SplitTag::test: return "test";
  }
  return "?";
}

const std::vector<std::string>& class_names(Task t) {
  static const std::vector<std::string> a{"NOT", "OFF"};
  static const std::vector<std::string> b{"TIN", "UNT"};
  static const std::vector<std::string> c{"IND", "GRP", "OTH"};
  switch (t) {
    case Task::A: return a;
    case Task::B: return b;
    case Task::C: return c;
  }
  return a;
}

std::optional<int> label_index(const TweetRecord& r, Task t) {
  if (!r.labels) return std::nullopt;
  switch (t) {
    case Task::A:
      if (r.labels->task_a) return static_cast<int>(*r.labels->task_a);
      break;
    case Task::B:
      if (r.labels->task_b) return static_cast<int>(*r.labels->task_b);
      break;
    case Task::C:
      if (r.labels->task_c) return static_cast<int>(*r.labels->task_c);
      break;
  }
  return std::nullopt;
}

std::vector<int> gold_labels(const Dataset& d, Task t) {
  std::vector<int> out;
  out.reserve(d.size());
  for (const auto& r : d.records()) {
    const auto l = label_index(r, t);
    if (!l) fail(ErrorCategory::data, "record " + r.id + " has no task " +
                                          std::string(to_string(t)) + " label");
    out.push_back(*l);
  }
  return out;
}

void validate_hierarchy(const TweetRecord& r) {
  if (!r.labels) return;
  const auto& l = *r.labels;
  if (l.task_b && l.task_a && *l.task_a != OffenseLabel::OFF)
    fail(ErrorCategory::validation, "record " + r.id + ": subtask_b set on a NOT tweet");
  if (l.task_c && l.task_b && *l.task_b != TargetLabel::TIN)
    fail(ErrorCategory::validation, "record " + r.id + ": subtask_c set on an untargeted tweet");
  if (l.task_c && !l.task_b && l.task_a)
    fail(ErrorCategory::validation, "record " + r.id + ": subtask_c set without subtask_b");
}

Dataset parse_olid_training(std::string_view contents, SplitTag split) {
  const auto lines = lines_of(contents, "training file");
  if (lines.empty()) fail(ErrorCategory::parse, "training file: missing header");
  expect_header(lines.front(), {"id", "tweet", "subtask_a", "subtask_b", "subtask_c"}, '\t',
                "training file");
  std::vector<TweetRecord> records;
  records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    const auto f = split_fields(line.text, '\t');
    if (f.size() != 5)
      fail(ErrorCategory::parse, "training file line " + std::to_string(line.number) +
                                     ": expected 5 columns, found " + std::to_string(f.size()));
    TweetRecord r;
    r.id = std::string(trim(f[0]));
    r.raw_text = std::string(f[1]);
    if (r.id.empty())
      fail(ErrorCategory::parse, "training file line " + std::to_string(line.number) +
                                     ": empty id");
    if (is_null(f[2]))
      fail(ErrorCategory::validation, "record " + r.id + ": subtask_a is required");
    TaskLabel l;
    l.task_a = parse_a(f[2], line.number);
    if (!is_null(f[3])) l.task_b = parse_b(f[3], line.number);
    if (!is_null(f[4])) l.task_c = parse_c(f[4], line.number);
    r.labels = l;
    validate_hierarchy(r);
    records.push_back(std::move(r));
  }
  return Dataset(std::move(records), split);
}

Dataset load_olid_training(const std::filesystem::path& path, SplitTag split) {
  return parse_olid_training(read_file(path), split);
}

Dataset parse_test_set(std::string_view tweets_tsv, std::string_view labels_csv, Task task) {
  const auto tweets = parse_tweet_rows(tweets_tsv);

  std::unordered_map<std::string, std::string> gold;
  std::vector<std::string> label_order;
  for (const auto& line : lines_of(labels_csv, "labels file")) {
    const auto f = split_fields(line.text, ',');
    if (f.size() != 2)
      fail(ErrorCategory::parse, "labels file line " + std::to_string(line.number) +
                                     ": expected 2 columns, found " + std::to_string(f.size()));
    std::string id(trim(f[0]));
    if (!gold.emplace(id, std::string(trim(f[1]))).second)
      fail(ErrorCategory::validation, "labels file: duplicate id " + id);
    label_order.push_back(std::move(id));
  }

  std::unordered_set<std::string> tweet_ids;
  std::vector<std::string> missing_labels;
  for (const auto& [id, text] : tweets) {
    tweet_ids.insert(id);
    if (!gold.count(id)) missing_labels.push_back(id);
  }
  std::vector<std::string> missing_tweets;
  for (const auto& id : label_order)
    if (!tweet_ids.count(id)) missing_tweets.push_back(id);

  if (!missing_labels.empty() || !missing_tweets.empty()) {
    std::string msg = "test set join failed;";
    auto list = [&](const char* what, const std::vector<std::string>& ids) {
      if (ids.empty()) return;
      msg += std::string(" ") + what + ":";
      for (const auto& id : ids) msg += " " + id;
      msg += ";";
    };
    list("ids without a label", missing_labels);
    list("labeled ids without a tweet", missing_tweets);
    fail(ErrorCategory::join, msg);
  }

  std::vector<TweetRecord> records;
  records.reserve(tweets.size());
  std::size_t line = 0;
  for (const auto& [id, text] : tweets) {
    ++line;
    TaskLabel l;
    const auto& g = gold.at(id);
    switch (task) {
      case Task::A: l.task_a = parse_a(g, line); break;
      case Task::B: l.task_b = parse_b(g, line); break;
      case Task::C: l.task_c = parse_c(g, line); break;
    }
    records.push_back(TweetRecord{id, text, l});
  }
  return Dataset(std::move(records), SplitTag::test);
}

Dataset load_test_set(const std::filesystem::path& tweets_path,
                      const std::filesystem::path& labels_path, Task task) {
  return parse_test_set(read_file(tweets_path), read_file(labels_path), task);
}

Dataset parse_unlabeled(std::string_view tweets_tsv) {
  std::vector<TweetRecord> records;
  for (auto& [id, text] : parse_tweet_rows(tweets_tsv))
    records.push_back(TweetRecord{std::move(id), std::move(text), std::nullopt});
  return Dataset(std::move(records), SplitTag::test);
}

Dataset filter_for_task(const Dataset& d, Task task) {
  if (task == Task::A) return d;
  std::vector<TweetRecord> kept;
  for (const auto& r : d.records())
    if (label_index(r, task)) kept.push_back(r);
  return Dataset(std::move(kept), d.split());
}

}  // namespace olid
