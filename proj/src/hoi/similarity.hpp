// Copyright 2026 The coseg Authors.
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

#include <span>
#include <vector>

#include "core/parallel.hpp"
#include "core/table.hpp"
#include "core/types.hpp"

namespace coseg::hoi {

double squared_distance(std::span<const double> a, std::span<const double> b);

// exp(-|a - b|^2 / delta).
double gaussian_similarity(std::span<const double> a, std::span<const double> b, double delta);

// Median pairwise squared distance over distinct pairs (mean of the two
// middle values for an even pair count); 1.0 when that median is zero.
double estimate_bandwidth(const Table& features);

// v with -1 appended.
Vec augment(std::span<const double> v);

// Full N x N similarity table of the rows of `features`.
Table similarity_table(const Table& features, double delta, ExecPolicy policy = {});

SimilarityChannels build_similarity(const Observations& obs, double delta_f, double delta_h,
                                    ExecPolicy policy = {});

}  // namespace coseg::hoi
