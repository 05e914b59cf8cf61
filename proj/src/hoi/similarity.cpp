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

#include "hoi/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace coseg::hoi {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) fail(ErrorKind::kValidation, "feature dimensions differ");
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

double gaussian_similarity(std::span<const double> a, std::span<const double> b, double delta) {
  if (!(delta > 0.0)) fail(ErrorKind::kUsage, "similarity bandwidth must be positive");
  return std::exp(-squared_distance(a, b) / delta);
}

double estimate_bandwidth(const Table& features) {
  const std::size_t n = features.rows();
  if (n < 2) fail(ErrorKind::kUsage, "bandwidth estimation needs at least two vectors");
  std::vector<double> d2;
  d2.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d2.push_back(squared_distance(features.row(i), features.row(j)));
    }
  }
  const std::size_t mid = d2.size() / 2;
  std::nth_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid), d2.end());
  double median = d2[mid];
  if (d2.size() % 2 == 0) {
    const double lower = *std::max_element(d2.begin(), d2.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (lower + median);
  }
  return median > 0.0 ? median : 1.0;
}

Vec augment(std::span<const double> v) {
  Vec out(v.begin(), v.end());
  out.push_back(-1.0);
  return out;
}

Table similarity_table(const Table& features, double delta, ExecPolicy policy) {
  if (!(delta > 0.0)) fail(ErrorKind::kUsage, "similarity bandwidth must be positive");
  const std::size_t n = features.rows();
  Table s(n, n);
  // Each row is computed in full, so row i never depends on another worker.
  parallel_for(n, policy, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        // Evaluate in (min, max) order so the table is exactly symmetric.
        const std::size_t a = std::min(i, j), b = std::max(i, j);
        s(i, j) = a == b ? 1.0
                         : std::exp(-squared_distance(features.row(a), features.row(b)) / delta);
      }
    }
  });
  return s;
}

SimilarityChannels build_similarity(const Observations& obs, double delta_f, double delta_h,
                                    ExecPolicy policy) {
  return {similarity_table(obs.appearance, delta_f, policy),
          similarity_table(obs.interaction, delta_h, policy)};
}

}  // namespace coseg::hoi
