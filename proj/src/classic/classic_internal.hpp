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

#include "olid/classic.hpp"

namespace olid::detail {

LogRegState fit_logreg(const LabeledMatrix& data, const LogRegParams& p);
MatrixD predict_logreg(const LogRegState& s, const MatrixD& features);

MlpState fit_mlp(const LabeledMatrix& data, const MlpParams& p, std::uint64_t seed);
MatrixD predict_mlp(const MlpState& s, const MatrixD& features);

ForestState fit_forest(const LabeledMatrix& data, const ForestParams& p, std::uint64_t seed);
MatrixD predict_forest(const ForestState& s, const MatrixD& features, std::size_t num_classes);

BoostingState fit_boosting(const LabeledMatrix& data, const BoostingParams& p);
MatrixD predict_boosting(const BoostingState& s, const MatrixD& features);

}  // namespace olid::detail
