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

#include "core/validate.hpp"

#include <cmath>
#include <optional>
#include <sstream>

namespace coseg {
namespace {

constexpr std::size_t kCylinderBins = 15;
constexpr double kBlockSumSlack = 1e-9;

std::size_t block_length(std::size_t d_h, std::size_t requested) {
  if (requested > 0) return requested;
  if (d_h > 0 && d_h % kCylinderBins == 0) return kCylinderBins;
  return d_h;
}

}  // namespace

std::vector<Violation> validate_dataset(const Dataset& dataset, ValidationOptions options) {
  std::vector<Violation> out;
  std::optional<std::size_t> d_f, d_h;
  for (const auto& img : dataset.images) {
    auto image_violation = [&](const std::string& rule, const std::string& detail) {
      out.push_back({img.image_id, "", rule, detail});
    };
    if (img.proposals.empty()) image_violation("non_empty", "image has no proposals");
    if (img.width <= 0 || img.height <= 0) image_violation("image_dims", "image size must be positive");
    for (const auto& [name, gt] : img.ground_truth) {
      if (gt.width() != img.width || gt.height() != img.height) {
        image_violation("ground_truth_frame", "ground truth '" + name + "' frame differs from image");
      }
    }
    for (const auto& h : img.humans) {
      for (const auto& [joint, pos] : h.joints) {
        if (!std::isfinite(pos.x) || !std::isfinite(pos.y) || !std::isfinite(pos.z)) {
          image_violation("finite_joints", "joint '" + joint + "' is not finite");
        }
      }
      for (const auto& [joint, c] : h.confidence) {
        if (!(c >= 0.0 && c <= 1.0)) {
          image_violation("joint_confidence", "confidence of '" + joint + "' outside [0,1]");
        }
      }
    }
    for (const auto& b : img.human_boxes) {
      if (b.area() <= 0) image_violation("human_box_area", "human box has zero area");
    }

    for (const auto& p : img.proposals) {
      auto violation = [&](const std::string& rule, const std::string& detail) {
        out.push_back({img.image_id, p.proposal_id, rule, detail});
      };
      if (p.image_id != img.image_id) {
        violation("image_id_match", "proposal image_id '" + p.image_id + "' differs from image");
      }
      if (p.bbox.x < 0 || p.bbox.y < 0 || p.bbox.width < 0 || p.bbox.height < 0) {
        violation("bbox_nonnegative", "bbox fields must be >= 0");
      }
      if (p.bbox.area() <= 0) violation("bbox_area", "bbox area must be positive");
      if (p.mask && (p.mask->width() != img.width || p.mask->height() != img.height)) {
        violation("mask_frame", "mask frame differs from image");
      }

      if (!d_f) d_f = p.appearance.size();
      if (!d_h) d_h = p.interaction.size();
      if (p.appearance.size() != *d_f) {
        std::ostringstream os;
        os << "appearance dimension " << p.appearance.size() << " != " << *d_f;
        violation("appearance_dim", os.str());
      }
      if (p.interaction.size() != *d_h) {
        std::ostringstream os;
        os << "interaction dimension " << p.interaction.size() << " != " << *d_h;
        violation("interaction_dim", os.str());
      }
      for (double v : p.appearance) {
        if (!std::isfinite(v)) {
          violation("finite_appearance", "appearance has a non-finite entry");
          break;
        }
      }
      bool bad_entry = false;
      for (double v : p.interaction) {
        if (!std::isfinite(v)) {
          violation("finite_interaction", "interaction has a non-finite entry");
          bad_entry = true;
          break;
        }
        if (v < 0.0) {
          violation("interaction_nonnegative", "interaction has a negative entry");
          bad_entry = true;
          break;
        }
      }
      if (!bad_entry && !p.interaction.empty()) {
        const std::size_t block = block_length(p.interaction.size(), options.interaction_block);
        for (std::size_t start = 0; start < p.interaction.size(); start += block) {
          double sum = 0.0;
          for (std::size_t d = start; d < std::min(start + block, p.interaction.size()); ++d) {
            sum += p.interaction[d];
          }
          if (sum > 1.0 + kBlockSumSlack) {
            violation("interaction_block_sum",
                      "interaction block at " + std::to_string(start) + " sums above 1");
          }
        }
      }
      if (p.points) {
        for (const auto& q : *p.points) {
          if (!std::isfinite(q.x) || !std::isfinite(q.y) || !std::isfinite(q.z)) {
            violation("finite_points", "point cloud has a non-finite point");
            break;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace coseg
