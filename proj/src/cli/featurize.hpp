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

#include "core/types.hpp"
#include "hoi/histogram.hpp"

namespace coseg::cli {

enum class InteractionMode { k3d, k2d };

InteractionMode parse_interaction_mode(const std::string& text);

struct FeaturizeOptions {
  InteractionMode mode = InteractionMode::k3d;
  SkeletonTopology topology = SkeletonTopology::kinect_default();
  hoi::CylinderBinning binning;
  // Relative depth_path entries resolve against this directory.
  std::string base_dir = ".";
};

struct FeaturizeReport {
  std::size_t proposals = 0;
  std::size_t without_points = 0;  // 3D mode: no points and no depth map
  std::size_t without_humans = 0;  // proposals in images with no humans
};

// Fills every proposal's interaction vector. 3D mode uses the proposal's
// points, or back-projects its region from the image depth map; 2D mode
// uses the human boxes. Multiple humans are max-pooled; images without
// humans get zero vectors. Appearance vectors pass through unchanged.
Dataset featurize(const Dataset& raw, const FeaturizeOptions& options,
                  FeaturizeReport* report = nullptr);

}  // namespace coseg::cli
