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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace olid {

enum class Task { A, B, C };
enum class SplitTag { train, trial, test };

enum class OffenseLabel { NOT, OFF };    // task A
enum class TargetLabel { TIN, UNT };     // task B
enum class TargetType { IND, GRP, OTH };  // task C

/// Gold labels for the three cascaded tasks. Test sets carry only the label
/// of the task they score, so every field is optional; the cascade invariant
/// is checked whenever the parent label is present.
struct TaskLabel {
  std::optional<OffenseLabel> task_a;
  std::optional<TargetLabel> task_b;
  std::optional<TargetType> task_c;

  bool operator==(const TaskLabel&) const = default;
};

struct TweetRecord {
  std::string id;
  std::string raw_text;
  std::optional<TaskLabel> labels;  // absent for unlabeled tweets

  bool operator==(const TweetRecord&) const = default;
};

/// Ordered, id-unique collection of tweets. Immutable after construction.
class Dataset {
 public:
  Dataset() = default;
  /// Throws validation error on empty or duplicate ids.
  Dataset(std::vector<TweetRecord> records, SplitTag split);

  const std::vector<TweetRecord>& records() const noexcept { return records_; }
  SplitTag split() const noexcept { return split_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const TweetRecord& operator[](std::size_t i) const { return records_[i]; }

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<TweetRecord> records_;
  SplitTag split_ = SplitTag::train;
};

Task parse_task(std::string_view s);
std::string_view to_string(Task t) noexcept;
std::string_view to_string(SplitTag s) noexcept;

/// Ordered class inventory for a task: A {NOT, OFF}, B {TIN, UNT}, C {IND, GRP, OTH}.
const std::vector<std::string>& class_names(Task t);

/// Index into class_names(t) of the record's gold label, if it has one.
std::optional<int> label_index(const TweetRecord& r, Task t);

/// All gold label indices for `t`; data error if any record lacks one.
std::vector<int> gold_labels(const Dataset& d, Task t);

/// Validates the cascade (B only under OFF, C only under TIN).
void validate_hierarchy(const TweetRecord& r);

/// OLID training/trial TSV: header `id tweet subtask_a subtask_b subtask_c`.
Dataset parse_olid_training(std::string_view contents, SplitTag split = SplitTag::train);
Dataset load_olid_training(const std::filesystem::path& path, SplitTag split = SplitTag::train);

/// Test pair: `id<TAB>tweet` TSV with header, `id,label` CSV without header.
Dataset parse_test_set(std::string_view tweets_tsv, std::string_view labels_csv, Task task);
Dataset load_test_set(const std::filesystem::path& tweets_path,
                      const std::filesystem::path& labels_path, Task task);

/// Unlabeled `id<TAB>tweet` TSV with header.
Dataset parse_unlabeled(std::string_view tweets_tsv);

Dataset filter_for_task(const Dataset& d, Task task);

}  // namespace olid
