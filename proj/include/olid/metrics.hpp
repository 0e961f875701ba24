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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "olid/artifact.hpp"

namespace olid {

/// Rows are gold classes, columns predicted classes.
struct ConfusionMatrix {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::int64_t>> counts;

  std::size_t num_classes() const noexcept { return class_names.size(); }
  std::int64_t total() const;
  std::int64_t row_sum(std::size_t gold) const;
  std::int64_t col_sum(std::size_t pred) const;
};

/// Errors on length mismatch, empty input or labels outside [0, K).
ConfusionMatrix confusion(std::span<const int> gold, std::span<const int> pred,
                          const std::vector<std::string>& class_names);

/// Mean F1 over classes that occur in gold; P, R, F1 are 0 on zero denominators.
double macro_f1(const ConfusionMatrix& cm);

struct ClassMetrics {
  std::string name;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::int64_t support = 0;  // gold count
};

struct EvalReport {
  ConfusionMatrix confusion;
  std::vector<ClassMetrics> per_class;
  double macro_f1 = 0;
  double accuracy = 0;

  std::string to_text() const;
  Json to_json() const;
  /// `gold\pred,<classes...>` header, one row per gold class.
  std::string confusion_csv() const;
};

EvalReport report(std::span<const int> gold, std::span<const int> pred,
                  const std::vector<std::string>& class_names);

/// Most frequent label in `train_labels` (ties to the lowest index).
int majority_class(std::span<const int> train_labels, std::size_t num_classes);

/// Macro-F1 of predicting `majority` for every example in `gold`.
double majority_baseline_f1(std::span<const int> gold, int majority,
                            const std::vector<std::string>& class_names);

}  // namespace olid
