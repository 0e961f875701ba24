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

// Seeded random search over JSON configurations.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "olid/artifact.hpp"

namespace olid {

struct ParamDist {
  enum class Kind { int_uniform, real_uniform, log_uniform, categorical };

  Kind kind = Kind::int_uniform;
  double lo = 0;
  double hi = 0;
  std::vector<Json> choices;

  static ParamDist int_uniform(std::int64_t lo, std::int64_t hi);
  static ParamDist real_uniform(double lo, double hi);
  static ParamDist log_uniform(double lo, double hi);
  static ParamDist categorical(std::vector<Json> choices);

  void validate(const std::string& name) const;
  /// {"type": "int"|"real"|"log"|"choice", "lo", "hi"} or {"type": "choice", "values": [...]}
  Json to_json() const;
  static ParamDist from_json(const Json& j);
};

/// Parameters keyed by name; sampling walks them in name order.
struct ParamSpace {
  std::map<std::string, ParamDist> params;

  void validate() const;
  Json to_json() const;
  static ParamSpace from_json(const Json& j);
};

/// One draw per parameter from a generator seeded by (seed, trial_index).
Json sample(const ParamSpace& space, std::uint64_t seed, std::uint64_t trial_index);

struct TrialResult {
  std::size_t index = 0;
  Json config;
  double macro_f1 = 0;
  double seconds = 0;
  bool failed = false;
  std::string note;  // error message of a failed trial
};

struct SearchResult {
  TrialResult best;
  std::vector<TrialResult> trials;  // in trial order

  /// trial_index, one column per parameter, macro_f1, seconds, status, note
  std::string to_csv(const ParamSpace& space) const;
};

using Objective = std::function<double(const Json& config)>;

/// Best = highest score, ties to the lowest trial index. A trial whose
/// objective throws or returns a score outside [0, 1] is recorded as failed
/// with score 0.
SearchResult random_search(const ParamSpace& space, int n_trials, const Objective& objective,
                           std::uint64_t seed);

ParamSpace default_ngram_space();
ParamSpace default_embedding_space();

}  // namespace olid
