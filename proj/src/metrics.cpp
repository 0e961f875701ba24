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

#include "olid/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "olid/error.hpp"

namespace olid {

std::int64_t ConfusionMatrix::total() const {
  std::int64_t t = 0;
  for (const auto& row : counts)
    for (auto c : row) t += c;
  return t;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::int64_t t = 0;
  for (auto c : counts[gold]) t += c;
  return t;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t pred) const {
  std::int64_t t = 0;
  for (const auto& row : counts) t += row[pred];
  return t;
}

ConfusionMatrix confusion(std::span<const int> gold, std::span<const int> pred,
                          const std::vector<std::string>& class_names) {
  if (gold.size() != pred.size())
    fail(ErrorCategory::data, "confusion: " + std::to_string(gold.size()) + " gold labels vs " +
                                  std::to_string(pred.size()) + " predictions");
  if (gold.empty()) fail(ErrorCategory::data, "confusion: no examples");
  const auto K = static_cast<int>(class_names.size());
  ConfusionMatrix cm{class_names, std::vector<std::vector<std::int64_t>>(
                                      class_names.size(), std::vector<std::int64_t>(K, 0))};
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] < 0 || gold[i] >= K || pred[i] < 0 || pred[i] >= K)
      fail(ErrorCategory::data, "confusion: label index out of range at position " +
                                    std::to_string(i));
    ++cm.counts[gold[i]][pred[i]];
  }
  return cm;
}

namespace {

ClassMetrics class_metrics(const ConfusionMatrix& cm, std::size_t c) {
  ClassMetrics m;
  m.name = cm.class_names[c];
  const auto tp = static_cast<double>(cm.counts[c][c]);
  const auto col = cm.col_sum(c);
  m.support = cm.row_sum(c);
  m.precision = col > 0 ? tp / static_cast<double>(col) : 0.0;
  m.recall = m.support > 0 ? tp / static_cast<double>(m.support) : 0.0;
  m.f1 = (m.precision + m.recall) > 0
             ? 2 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

}  // namespace

double macro_f1(const ConfusionMatrix& cm) {
  double sum = 0;
  int present = 0;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) {
    if (cm.row_sum(c) == 0) continue;
    sum += class_metrics(cm, c).f1;
    ++present;
  }
  if (present == 0) fail(ErrorCategory::data, "macro_f1: no gold examples");
  return sum / present;
}

EvalReport report(std::span<const int> gold, std::span<const int> pred,
                  const std::vector<std::string>& class_names) {
  EvalReport r;
  r.confusion = confusion(gold, pred, class_names);
  for (std::size_t c = 0; c < class_names.size(); ++c)
    r.per_class.push_back(class_metrics(r.confusion, c));
  r.macro_f1 = macro_f1(r.confusion);
  std::int64_t diag = 0;
  for (std::size_t c = 0; c < class_names.size(); ++c) diag += r.confusion.counts[c][c];
  r.accuracy = static_cast<double>(diag) / static_cast<double>(r.confusion.total());
  return r;
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  std::size_t w = 8;
  for (const auto& n : confusion.class_names) w = std::max(w, n.size() + 2);
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(static_cast<int>(w)) << "class" << std::right << std::setw(11)
      << "precision" << std::setw(10) << "recall" << std::setw(10) << "f1" << std::setw(10)
      << "support" << "\n";
  for (const auto& m : per_class)
    out << std::left << std::setw(static_cast<int>(w)) << m.name << std::right << std::setw(11)
        << m.precision << std::setw(10) << m.recall << std::setw(10) << m.f1 << std::setw(10)
        << m.support << "\n";
  out << "\nmacro-F1  " << macro_f1 << "\naccuracy  " << accuracy << "\n\nconfusion (rows=gold)\n";
  out << std::left << std::setw(static_cast<int>(w)) << "";
  for (const auto& n : confusion.class_names) out << std::right << std::setw(static_cast<int>(w)) << n;
  out << "\n";
  for (std::size_t g = 0; g < confusion.num_classes(); ++g) {
    out << std::left << std::setw(static_cast<int>(w)) << confusion.class_names[g];
    for (auto c : confusion.counts[g]) out << std::right << std::setw(static_cast<int>(w)) << c;
    out << "\n";
  }
  return out.str();
}

Json EvalReport::to_json() const {
  Json classes = Json::array();
  for (const auto& m : per_class)
    classes.push_back(Json{{"name", m.name},
                           {"precision", m.precision},
                           {"recall", m.recall},
                           {"f1", m.f1},
                           {"support", m.support}});
  return Json{{"class_names", confusion.class_names},
              {"confusion", confusion.counts},
              {"per_class", classes},
              {"macro_f1", macro_f1},
              {"accuracy", accuracy}};
}

std::string EvalReport::confusion_csv() const {
  std::string out = "gold\\pred";
  for (const auto& n : confusion.class_names) out += "," + n;
  out += "\n";
  for (std::size_t g = 0; g < confusion.num_classes(); ++g) {
    out += confusion.class_names[g];
    for (auto c : confusion.counts[g]) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

int majority_class(std::span<const int> train_labels, std::size_t num_classes) {
  if (train_labels.empty()) fail(ErrorCategory::data, "majority_class: no labels");
  std::vector<std::int64_t> counts(num_classes, 0);
  for (int l : train_labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= num_classes)
      fail(ErrorCategory::data, "majority_class: label out of range");
    ++counts[static_cast<std::size_t>(l)];
  }
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

double majority_baseline_f1(std::span<const int> gold, int majority,
                            const std::vector<std::string>& class_names) {
  const std::vector<int> pred(gold.size(), majority);
  return macro_f1(confusion(gold, pred, class_names));
}

}  // namespace olid
