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

#include "cli/featurize.hpp"

#include <filesystem>
#include <optional>

#include "cli/depth.hpp"
#include "core/error.hpp"

namespace coseg::cli {

InteractionMode parse_interaction_mode(const std::string& text) {
  if (text == "3d") return InteractionMode::k3d;
  if (text == "2d") return InteractionMode::k2d;
  fail(ErrorKind::kUsage, "mode must be 3d or 2d, got '" + text + "'");
}

Dataset featurize(const Dataset& raw, const FeaturizeOptions& options, FeaturizeReport* report) {
  FeaturizeReport local;
  FeaturizeReport& rep = report ? *report : local;
  const std::size_t dim = options.mode == InteractionMode::k3d
                              ? options.topology.size() * hoi::kCylinderBins
                              : hoi::kGridCells;
  Dataset out = raw;
  for (auto& img : out.images) {
    std::optional<DepthMap> depth;
    for (auto& p : img.proposals) {
      ++rep.proposals;
      std::vector<Vec> per_human;
      const Mask region = p.region(img.width, img.height);
      if (options.mode == InteractionMode::k2d) {
        for (const Rect& box : img.human_boxes) per_human.push_back(hoi::hoi_feature_2d(region, box));
      } else {
        std::vector<Point3> projected;
        if (!p.points && img.depth_path && img.intrinsics) {
          if (!depth) {
            std::filesystem::path path(*img.depth_path);
            if (path.is_relative()) path = std::filesystem::path(options.base_dir) / path;
            depth = read_depth_pgm(path.string());
          }
          projected = depth_to_points(*depth, region, *img.intrinsics);
        }
        const std::vector<Point3>& pts = p.points ? *p.points : projected;
        if (pts.empty()) ++rep.without_points;
        for (const HumanSkeleton& h : img.humans) {
          per_human.push_back(hoi::hoi_feature_3d(pts, h, options.topology, options.binning).h);
        }
      }
      if (per_human.empty()) ++rep.without_humans;
      p.interaction = hoi::pool_humans(per_human, dim);
    }
  }
  return out;
}

}  // namespace coseg::cli
