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

#include "eval/metrics.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "core/error.hpp"

namespace coseg::eval {

double iou(const Region& a, const Region& b) {
  if (!a.same_frame(b)) fail(ErrorKind::kValidation, "IoU regions come from different frames");
  const std::uint64_t inter = a.intersection_area(b);
  const std::uint64_t uni = a.area() + b.area() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

CosegScore coseg_score(const std::vector<std::vector<Region>>& selections,
                       const std::vector<Region>& ground_truth, std::size_t k) {
  const std::size_t images = ground_truth.size();
  if (images == 0) fail(ErrorKind::kValidation, "co-segmentation score needs at least one image");
  if (selections.size() != images) {
    fail(ErrorKind::kValidation, "selections and ground truth cover different image counts");
  }
  if (k == 0) fail(ErrorKind::kUsage, "cluster count must be positive");

  std::vector<std::vector<double>> ious(k, std::vector<double>(images, 0.0));
  for (std::size_t i = 0; i < images; ++i) {
    const Region empty(ground_truth[i].width(), ground_truth[i].height());
    for (std::size_t c = 0; c < k; ++c) {
      const Region& r = c < selections[i].size() ? selections[i][c] : empty;
      ious[c][i] = iou(ground_truth[i], r);
    }
  }
  CosegScore out;
  out.per_cluster.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    double sum = 0.0;
    for (double v : ious[c]) sum += v;
    out.per_cluster[c] = sum / static_cast<double>(images);
    if (c == 0 || out.per_cluster[c] > out.score) {
      out.score = out.per_cluster[c];
      out.best_k = c;
    }
  }
  out.per_image_iou = ious[out.best_k];
  return out;
}

double adjusted_rand_index(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) fail(ErrorKind::kUsage, "labelings differ in length");
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  std::map<std::pair<std::size_t, std::size_t>, double> joint;
  std::map<std::size_t, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    joint[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [_, m] : joint) index += pairs(m);
  for (const auto& [_, m] : rows) sum_rows += pairs(m);
  for (const auto& [_, m] : cols) sum_cols += pairs(m);
  const double expected = sum_rows * sum_cols / pairs(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace coseg::eval
