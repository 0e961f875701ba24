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

#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace olid::acceptance {

void Report::check(const std::string& name, const std::function<Outcome()>& fn) {
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures_;
  std::cout << (o.pass ? "PASS " : "FAIL ") << name << " " << o.detail << std::endl;
}

void Report::blocked(const std::string& name, const std::string& reason) {
  ++blocked_;
  std::cout << "BLOCKED " << name << " " << reason << std::endl;
}

double finite_difference_error(double* params, const double* analytic, long n,
                               const std::function<double()>& loss) {
  constexpr double h = 1e-5;
  double worst = 0;
  for (long i = 0; i < n; ++i) {
    const double orig = params[i];
    params[i] = orig + h;
    const double up = loss();
    params[i] = orig - h;
    const double down = loss();
    params[i] = orig;
    const double num = (up - down) / (2 * h);
    const double a = analytic[i];
    worst = std::max(worst, std::abs(a - num) / std::max({std::abs(a), std::abs(num), 1e-6}));
  }
  return worst;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << v;
  return s.str();
}

}  // namespace olid::acceptance
