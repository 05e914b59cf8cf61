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

#include <cstddef>
#include <string>
#include <vector>

#include "core/parallel.hpp"
#include "core/types.hpp"
#include "crf/train.hpp"

namespace coseg::crf {

// Posterior confidence table (N x K) for the proposals of `dataset`. The
// training set returns the model's final marginals; any other dataset runs
// mean field standalone with the frozen parameters.
Table infer(const TrainedModel& model, const Dataset& dataset, ExecPolicy policy = {});

struct ClusterSelection {
  std::vector<std::size_t> proposals;  // indices into the image's proposal list
  std::vector<double> confidence;      // Q_i(k) of each selected proposal
  Mask region;
};

struct ImageSelection {
  std::string image_id;
  std::vector<ClusterSelection> clusters;  // one per cluster k
};

// top1: the proposal with the highest Q_i(k) per image and cluster (lowest
// index on ties). union: the pixel union of the proposals whose argmax
// cluster is k (empty region when there are none).
std::vector<ImageSelection> select_foregrounds(const Table& q, const Dataset& dataset,
                                               ForegroundMode mode);

// Lowest-index argmax of each row.
std::vector<std::size_t> hard_assignment(const Table& q);

}  // namespace coseg::crf
