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

#include "olid/tuner.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>

#include "olid/error.hpp"
#include "olid/random.hpp"

namespace olid {

ParamDist ParamDist::int_uniform(std::int64_t lo, std::int64_t hi) {
  return {Kind::int_uniform, static_cast<double>(lo), static_cast<double>(hi), {}};
}
ParamDist ParamDist::real_uniform(double lo, double hi) { return {Kind::real_uniform, lo, hi, {}}; }
ParamDist ParamDist::log_uniform(double lo, double hi) { return {Kind::log_uniform, lo, hi, {}}; }
ParamDist ParamDist::categorical(std::vector<Json> choices) {
  return {Kind::categorical, 0, 0, std::move(choices)};
}

void ParamDist::validate(const std::string& name) const {
  if (kind == Kind::categorical) {
    require(!choices.empty(), ErrorCategory::config, "parameter " + name + ": empty choice list");
    return;
  }
  require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, ErrorCategory::config,
          "parameter " + name + ": need finite lo <= hi");
  if (kind == Kind::log_uniform)
    require(lo > 0, ErrorCategory::config, "parameter " + name + ": log-uniform needs lo > 0");
  if (kind == Kind::int_uniform)
    require(lo == std::floor(lo) && hi == std::floor(hi), ErrorCategory::config,
            "parameter " + name + ": integer bounds required");
}

Json ParamDist::to_json() const {
  switch (kind) {
    case Kind::int_uniform:
      return {{"type", "int"}, {"lo", static_cast<std::int64_t>(lo)}, {"hi", static_cast<std::int64_t>(hi)}};
    case Kind::real_uniform: return {{"type", "real"}, {"lo", lo}, {"hi", hi}};
    case Kind::log_uniform: return {{"type", "log"}, {"lo", lo}, {"hi", hi}};
    case Kind::categorical: return {{"type", "choice"}, {"values", choices}};
  }
  return {};
}

ParamDist ParamDist::from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "choice") return categorical(j.at("values").get<std::vector<Json>>());
  const double lo = j.at("lo").get<double>(), hi = j.at("hi").get<double>();
  if (type == "int") return {Kind::int_uniform, lo, hi, {}};
  if (type == "real") return real_uniform(lo, hi);
  if (type == "log") return log_uniform(lo, hi);
  fail(ErrorCategory::config, "unknown distribution type '" + type + "'");
}

void ParamSpace::validate() const {
  require(!params.empty(), ErrorCategory::config, "search space is empty");
  for (const auto& [name, d] : params) d.validate(name);
}

Json ParamSpace::to_json() const {
  Json j = Json::object();
  for (const auto& [name, d] : params) j[name] = d.to_json();
  return j;
}

ParamSpace ParamSpace::from_json(const Json& j) {
  require(j.is_object(), ErrorCategory::config, "search space must be a JSON object");
  ParamSpace s;
  try {
    for (const auto& [name, d] : j.items()) s.params.emplace(name, ParamDist::from_json(d));
  } catch (const Json::exception& e) {
    fail(ErrorCategory::config, std::string("bad search space: ") + e.what());
  }
  s.validate();
  return s;
}

Json sample(const ParamSpace& space, std::uint64_t seed, std::uint64_t trial_index) {
  space.validate();
  auto rng = make_rng(seed, trial_index);
  Json cfg = Json::object();
  for (const auto& [name, d] : space.params) {
    switch (d.kind) {
      case ParamDist::Kind::int_uniform: {
        const auto lo = static_cast<std::int64_t>(d.lo), hi = static_cast<std::int64_t>(d.hi);
        cfg[name] = lo + static_cast<std::int64_t>(
                             uniform_index(rng, static_cast<std::uint64_t>(hi - lo) + 1));
        break;
      }
      case ParamDist::Kind::real_uniform: cfg[name] = uniform(rng, d.lo, d.hi); break;
      case ParamDist::Kind::log_uniform:
        cfg[name] = std::exp(uniform(rng, std::log(d.lo), std::log(d.hi)));
        break;
      case ParamDist::Kind::categorical:
        cfg[name] = d.choices[uniform_index(rng, d.choices.size())];
        break;
    }
  }
  return cfg;
}

namespace {

std::string csv_field(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

std::string SearchResult::to_csv(const ParamSpace& space) const {
  std::ostringstream out;
  out.precision(17);
  out << "trial_index";
  for (const auto& [name, d] : space.params) out << ',' << csv_field(name);
  out << ",macro_f1,seconds,status,note\n";
  for (const auto& t : trials) {
    out << t.index;
    for (const auto& [name, d] : space.params) {
      const auto v = t.config.find(name);
      out << ',' << (v == t.config.end() ? "" : csv_field(v->is_string() ? v->get<std::string>() : v->dump()));
    }
    out << ',' << t.macro_f1 << ',' << t.seconds << ',' << (t.failed ? "failed" : "ok") << ','
        << csv_field(t.note) << '\n';
  }
  return out.str();
}

SearchResult random_search(const ParamSpace& space, int n_trials, const Objective& objective,
                           std::uint64_t seed) {
  require(n_trials >= 1, ErrorCategory::config, "n_trials must be >= 1");
  space.validate();
  SearchResult res;
  for (int i = 0; i < n_trials; ++i) {
    TrialResult t;
    t.index = static_cast<std::size_t>(i);
    t.config = sample(space, seed, t.index);
    const auto start = std::chrono::steady_clock::now();
    try {
      const double score = objective(t.config);
      if (!(score >= 0 && score <= 1)) {
        t.failed = true;
        t.note = "score outside [0, 1]";
      } else {
        t.macro_f1 = score;
      }
    } catch (const std::exception& e) {
      t.failed = true;
      t.note = e.what();
    }
    t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (res.trials.empty() || t.macro_f1 > res.best.macro_f1) res.best = t;
    res.trials.push_back(std::move(t));
  }
  return res;
}

ParamSpace default_ngram_space() {
  ParamSpace s;
  s.params.emplace("epochs", ParamDist::int_uniform(5, 60));
  s.params.emplace("word_ngrams", ParamDist::int_uniform(1, 4));
  s.params.emplace("lr", ParamDist::log_uniform(0.05, 1.0));
  s.params.emplace("min_count", ParamDist::int_uniform(1, 5));
  s.params.emplace("dim", ParamDist::int_uniform(10, 200));
  s.params.emplace("window", ParamDist::int_uniform(1, 10));
  return s;
}

ParamSpace default_embedding_space() {
  ParamSpace s;
  s.params.emplace("dim", ParamDist::int_uniform(32, 300));
  s.params.emplace("window", ParamDist::int_uniform(2, 10));
  return s;
}

}  // namespace olid
