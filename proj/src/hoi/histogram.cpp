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

#include "hoi/histogram.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace coseg::hoi {

void CylinderBinning::check() const {
  if (!(max_radius > 0.0) || !std::isfinite(max_radius)) {
    fail(ErrorKind::kUsage, "cylinder max_radius must be positive");
  }
  if (!(inner_exclusion_fraction > 0.0 && inner_exclusion_fraction < 1.0)) {
    fail(ErrorKind::kUsage, "inner_exclusion_fraction must lie in (0, 1)");
  }
}

CylinderHistogram hoi_histogram_3d(std::span<const Point3> points, Point3 part_start,
                                   Point3 part_end, const CylinderBinning& binning) {
  binning.check();
  const Point3 axis = part_end - part_start;
  const double length = norm(axis);
  if (!(length > 0.0) || !std::isfinite(length)) {
    fail(ErrorKind::kValidation, "invalid skeleton: body part has zero length");
  }
  const Point3 unit = (1.0 / length) * axis;
  const double r_in = binning.inner_radius();
  const double width = binning.ring_width();
  const double third = length / CylinderBinning::kVerticalSegments;

  CylinderHistogram hist{};
  for (const Point3& p : points) {
    const Point3 rel = p - part_start;
    const double t = dot(rel, unit);
    if (t < 0.0 || t > length) continue;
    const double rho = norm(rel - t * unit);
    if (rho <= r_in || rho > binning.max_radius) continue;

    int vertical = static_cast<int>(t / third);
    vertical = std::min(vertical, CylinderBinning::kVerticalSegments - 1);
    int ring = CylinderBinning::kRadialRings - 1;
    for (int b = 0; b + 1 < CylinderBinning::kRadialRings; ++b) {
      if (rho <= r_in + (b + 1) * width) {
        ring = b;
        break;
      }
    }
    ++hist[static_cast<std::size_t>(vertical * CylinderBinning::kRadialRings + ring)];
  }
  return hist;
}

InteractionFeature hoi_feature_3d(std::span<const Point3> points, const HumanSkeleton& skeleton,
                                  const SkeletonTopology& topology,
                                  const CylinderBinning& binning) {
  InteractionFeature out;
  out.h.assign(topology.size() * kCylinderBins, 0.0);
  auto joint = [&](const std::string& name) {
    auto it = skeleton.joints.find(name);
    if (it == skeleton.joints.end()) {
      fail(ErrorKind::kValidation, "skeleton lacks joint '" + name + "' required by the topology");
    }
    return it->second;
  };
  // Resolve every part first so a bad skeleton fails even without points.
  std::vector<std::pair<Point3, Point3>> parts;
  parts.reserve(topology.size());
  for (const auto& [a, b] : topology.parts) parts.emplace_back(joint(a), joint(b));

  if (points.empty()) {
    out.missing_points = true;
    return out;
  }
  const double total = static_cast<double>(points.size());
  for (std::size_t part = 0; part < parts.size(); ++part) {
    const CylinderHistogram hist =
        hoi_histogram_3d(points, parts[part].first, parts[part].second, binning);
    for (std::size_t b = 0; b < kCylinderBins; ++b) {
      out.h[part * kCylinderBins + b] = static_cast<double>(hist[b]) / total;
    }
  }
  return out;
}

Vec hoi_feature_2d(const Mask& proposal, const Rect& human_box) {
  if (human_box.width <= 0 || human_box.height <= 0) {
    fail(ErrorKind::kValidation, "human box has zero area");
  }
  const std::uint64_t area = proposal.area();
  if (area == 0) fail(ErrorKind::kValidation, "proposal has zero area");

  const std::int64_t cell_w = human_box.width / static_cast<std::int64_t>(kGridSide);
  const std::int64_t cell_h = human_box.height / static_cast<std::int64_t>(kGridSide);
  auto span_of = [](std::int64_t origin, std::int64_t extent, std::int64_t cell, std::size_t i) {
    const std::int64_t lo = origin + cell * static_cast<std::int64_t>(i);
    const std::int64_t hi = i + 1 == kGridSide ? origin + extent : lo + cell;
    return std::pair{lo, hi};
  };

  Vec h(kGridCells, 0.0);
  for (std::size_t row = 0; row < kGridSide; ++row) {
    const auto [y0, y1] = span_of(human_box.y, human_box.height, cell_h, row);
    for (std::size_t col = 0; col < kGridSide; ++col) {
      const auto [x0, x1] = span_of(human_box.x, human_box.width, cell_w, col);
      if (x1 <= x0 || y1 <= y0) continue;
      const Mask cell =
          Mask::from_rect(proposal.width(), proposal.height(), {x0, y0, x1 - x0, y1 - y0});
      h[row * kGridSide + col] =
          static_cast<double>(proposal.intersection_area(cell)) / static_cast<double>(area);
    }
  }
  return h;
}

Vec pool_humans(std::span<const Vec> histograms, std::size_t dim) {
  Vec out(dim, 0.0);
  for (const Vec& h : histograms) {
    if (h.size() != dim) fail(ErrorKind::kValidation, "interaction histograms differ in dimension");
    for (std::size_t d = 0; d < dim; ++d) out[d] = std::max(out[d], h[d]);
  }
  return out;
}

}  // namespace coseg::hoi
