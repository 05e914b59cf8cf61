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

#include <cstdint>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace coseg::cli {

// Raw depth values in sensor units, row-major.
struct DepthMap {
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<double> values;

  double at(std::int64_t u, std::int64_t v) const {
    return values[static_cast<std::size_t>(v * width + u)];
  }
};

// Pinhole back-projection of every masked pixel (u, v) with depth d > 0:
// z = d * depth_scale, x = (u - cx) z / fx, y = (v - cy) z / fy.
std::vector<Point3> depth_to_points(const DepthMap& depth, const Mask& mask,
                                    const CameraIntrinsics& intrinsics);

// Netpbm graymap (P2 ASCII or P5 binary, 8- or 16-bit big-endian).
DepthMap read_depth_pgm(const std::string& path);

}  // namespace coseg::cli
