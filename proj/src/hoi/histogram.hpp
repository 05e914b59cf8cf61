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

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/types.hpp"

namespace coseg::hoi {

inline constexpr std::size_t kCylinderBins = 15;
inline constexpr std::size_t kGridSide = 6;
inline constexpr std::size_t kGridCells = kGridSide * kGridSide;

// Cylinder around a body part: 3 axial thirds times 5 concentric rings.
// The innermost disc of radius inner_exclusion_fraction * max_radius holds
// points of the body itself and is not counted.
struct CylinderBinning {
  static constexpr int kVerticalSegments = 3;
  static constexpr int kRadialRings = 5;
  double inner_exclusion_fraction = 1.0 / 6.0;
  double max_radius = 0.5;  // meters

  double inner_radius() const noexcept { return inner_exclusion_fraction * max_radius; }
  double ring_width() const noexcept { return (max_radius - inner_radius()) / kRadialRings; }
  // Throws kUsage when the geometry is not usable.
  void check() const;
};

using CylinderHistogram = std::array<std::uint64_t, kCylinderBins>;

// Bin index is vertical * 5 + ring. Axial thirds are lower-inclusive
// (the last one also includes the part end); rings are upper-inclusive
// in radius. Points outside the segment or the shell are dropped.
CylinderHistogram hoi_histogram_3d(std::span<const Point3> points, Point3 part_start,
                                   Point3 part_end, const CylinderBinning& binning);

struct InteractionFeature {
  Vec h;
  bool missing_points = false;  // proposal carried no 3D points
};

// Per-part histograms in topology order, each divided by the proposal's
// point count.
InteractionFeature hoi_feature_3d(std::span<const Point3> points, const HumanSkeleton& skeleton,
                                  const SkeletonTopology& topology,
                                  const CylinderBinning& binning);

// 6x6 grid over the human box, remainder pixels in the last row/column.
// Counts only proposal pixels inside the box, normalized by the proposal
// area.
Vec hoi_feature_2d(const Mask& proposal, const Rect& human_box);

// Entrywise maximum across humans; an empty list yields zeros of `dim`.
Vec pool_humans(std::span<const Vec> histograms, std::size_t dim);

}  // namespace coseg::hoi
