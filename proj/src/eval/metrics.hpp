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
#include <span>
#include <vector>

#include "core/rle.hpp"

namespace coseg::eval {

using Region = Mask;

// |a & b| / |a | b| by pixel counting; 0 for an empty union.
double iou(const Region& a, const Region& b);

struct CosegScore {
  double score = 0.0;
  std::size_t best_k = 0;
  std::vector<double> per_cluster;     // mean IoU per cluster
  std::vector<double> per_image_iou;   // IoU per image for best_k
};

// selections[i][k] is the region of cluster k in image i; rows shorter than
// K count the missing clusters as empty. Returns the max over k of the mean
// IoU against ground_truth[i] (lowest k on ties).
CosegScore coseg_score(const std::vector<std::vector<Region>>& selections,
                       const std::vector<Region>& ground_truth, std::size_t k);

// Chance-corrected agreement between two labelings of the same items.
double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b);

}  // namespace coseg::eval
