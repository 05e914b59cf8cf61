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

#include "core/grid.hpp"

#include "core/error.hpp"

namespace coseg {
namespace {

// Start of tile `i` of `n` over `extent` pixels.
std::int64_t tile_start(std::int64_t extent, int n, int i) { return extent * i / n; }

}  // namespace

std::vector<ProposalRecord> make_grid_proposals(const std::string& image_id, std::int64_t width,
                                                std::int64_t height, int rows, int cols) {
  if (width <= 0 || height <= 0) fail(ErrorKind::kUsage, "grid proposals need a non-empty image");
  if (rows < 1 || cols < 1) fail(ErrorKind::kUsage, "grid rows and cols must be >= 1");
  if (rows > height || cols > width) fail(ErrorKind::kUsage, "grid is finer than the image");
  std::vector<ProposalRecord> out;
  out.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    const std::int64_t y0 = tile_start(height, rows, r), y1 = tile_start(height, rows, r + 1);
    for (int c = 0; c < cols; ++c) {
      const std::int64_t x0 = tile_start(width, cols, c), x1 = tile_start(width, cols, c + 1);
      ProposalRecord p;
      p.image_id = image_id;
      p.proposal_id = "g" + std::to_string(r) + "_" + std::to_string(c);
      p.bbox = {x0, y0, x1 - x0, y1 - y0};
      out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace coseg
