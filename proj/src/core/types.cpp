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

#include "core/types.hpp"

#include <cmath>
#include <sstream>

#include "core/error.hpp"

namespace coseg {

Mask ProposalRecord::region(std::int64_t image_width, std::int64_t image_height) const {
  if (mask) return *mask;
  return Mask::from_rect(image_width, image_height, bbox);
}

SkeletonTopology SkeletonTopology::kinect_default() {
  SkeletonTopology t;
  t.parts = {
      {"head", "neck"},
      {"neck", "spine_shoulder"},
      {"spine_shoulder", "spine_mid"},
      {"spine_mid", "spine_base"},
  };
  for (const char* side : {"left", "right"}) {
    const std::string s = side;
    t.parts.emplace_back("spine_shoulder", "shoulder_" + s);
    t.parts.emplace_back("shoulder_" + s, "elbow_" + s);
    t.parts.emplace_back("elbow_" + s, "wrist_" + s);
    t.parts.emplace_back("wrist_" + s, "hand_" + s);
  }
  for (const char* side : {"left", "right"}) {
    const std::string s = side;
    t.parts.emplace_back("spine_base", "hip_" + s);
    t.parts.emplace_back("hip_" + s, "knee_" + s);
    t.parts.emplace_back("knee_" + s, "ankle_" + s);
  }
  return t;
}

std::size_t Dataset::proposal_count() const noexcept {
  std::size_t n = 0;
  for (const auto& img : images) n += img.proposals.size();
  return n;
}

EncoderParams EncoderParams::initial(std::size_t k, std::size_t d_f, std::size_t d_h,
                                     double epsilon_p) {
  EncoderParams p;
  p.appearance = Table(k, d_f + 1);
  p.interaction = Table(k, d_h + 1);
  p.pair_object.assign(k, {epsilon_p, 0.0});
  p.pair_interaction.assign(k, {epsilon_p, 0.0});
  return p;
}

std::size_t EncoderParams::coordinate_count() const noexcept {
  return appearance.data().size() + interaction.data().size() + 4 * clusters();
}

Vec EncoderParams::flatten() const {
  Vec out;
  out.reserve(coordinate_count());
  out.insert(out.end(), appearance.data().begin(), appearance.data().end());
  out.insert(out.end(), interaction.data().begin(), interaction.data().end());
  for (const auto& w : pair_object) {
    out.push_back(w.weight);
    out.push_back(w.bias);
  }
  for (const auto& w : pair_interaction) {
    out.push_back(w.weight);
    out.push_back(w.bias);
  }
  return out;
}

void EncoderParams::assign(std::span<const double> flat) {
  if (flat.size() != coordinate_count()) {
    fail(ErrorKind::kUsage, "encoder coordinate vector has wrong length");
  }
  std::size_t pos = 0;
  for (double& v : appearance.data()) v = flat[pos++];
  for (double& v : interaction.data()) v = flat[pos++];
  for (auto& w : pair_object) {
    w.weight = flat[pos++];
    w.bias = flat[pos++];
  }
  for (auto& w : pair_interaction) {
    w.weight = flat[pos++];
    w.bias = flat[pos++];
  }
}

std::string EncoderParams::coordinate_name(std::size_t index) const {
  std::ostringstream os;
  const std::size_t na = appearance.data().size();
  const std::size_t nh = interaction.data().size();
  if (index < na) {
    const std::size_t k = index / appearance.cols(), d = index % appearance.cols();
    os << "appearance[" << k << "][" << (d == appearance_dim() ? "bias" : std::to_string(d)) << "]";
  } else if (index < na + nh) {
    index -= na;
    const std::size_t k = index / interaction.cols(), d = index % interaction.cols();
    os << "interaction[" << k << "][" << (d == interaction_dim() ? "bias" : std::to_string(d))
       << "]";
  } else {
    index -= na + nh;
    const std::size_t k = clusters();
    const bool obj = index < 2 * k;
    if (!obj) index -= 2 * k;
    os << (obj ? "pair_object[" : "pair_interaction[") << index / 2 << "]."
       << (index % 2 == 0 ? "weight" : "bias");
  }
  return os.str();
}

std::vector<std::string> EncoderParams::constraint_violations(double epsilon_p) const {
  std::vector<std::string> out;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) out.push_back(what);
  };
  const std::size_t k = clusters();
  check(interaction.rows() == k && pair_object.size() == k && pair_interaction.size() == k,
        "cluster count differs between parameter blocks");
  for (std::size_t c = 0; c < appearance.rows(); ++c) {
    check(appearance(c, appearance_dim()) >= 0.0,
          "appearance bias of cluster " + std::to_string(c) + " is negative");
  }
  for (std::size_t c = 0; c < interaction.rows(); ++c) {
    for (std::size_t d = 0; d < interaction_dim(); ++d) {
      check(interaction(c, d) >= 0.0, "interaction weight [" + std::to_string(c) + "][" +
                                          std::to_string(d) + "] is negative");
    }
    check(interaction(c, interaction_dim()) >= 0.0,
          "interaction bias of cluster " + std::to_string(c) + " is negative");
  }
  auto check_pair = [&](const std::vector<PairwiseWeight>& ws, const char* name) {
    for (std::size_t c = 0; c < ws.size(); ++c) {
      check(ws[c].weight >= epsilon_p, std::string(name) + " weight of cluster " +
                                           std::to_string(c) + " is below epsilon_p");
      check(ws[c].bias >= 0.0,
            std::string(name) + " bias of cluster " + std::to_string(c) + " is negative");
    }
  };
  check_pair(pair_object, "object pairwise");
  check_pair(pair_interaction, "interaction pairwise");
  for (double v : flatten()) {
    if (!std::isfinite(v)) {
      out.emplace_back("non-finite encoder coordinate");
      break;
    }
  }
  return out;
}

void check_config(const TrainConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorKind::kUsage, what);
  };
  require(c.k >= 1, "k must be at least 1");
  require(!c.delta_f || *c.delta_f > 0.0, "delta_f must be positive or auto");
  require(!c.delta_h || *c.delta_h > 0.0, "delta_h must be positive or auto");
  require(c.reg_lambda >= 0.0, "reg_lambda must be non-negative");
  require(c.learning_rate > 0.0, "learning_rate must be positive");
  require(c.outer_iters >= 1, "outer_iters must be at least 1");
  require(c.mf_max_sweeps >= 1, "mf_max_sweeps must be at least 1");
  require(c.mf_tol > 0.0, "mf_tol must be positive");
  require(c.epsilon_p > 0.0, "epsilon_p must be positive");
  require(c.variance_floor > 0.0, "variance_floor must be positive");
  require(c.convergence_rtol >= 0.0, "convergence_rtol must be non-negative");
}

const char* to_string(ForegroundMode mode) {
  return mode == ForegroundMode::kTop1 ? "top1" : "union";
}

ForegroundMode parse_foreground_mode(const std::string& text) {
  if (text == "top1") return ForegroundMode::kTop1;
  if (text == "union") return ForegroundMode::kUnion;
  fail(ErrorKind::kUsage, "foreground mode must be top1 or union, got '" + text + "'");
}

Vec Observations::reconstruction_target(std::size_t i) const {
  Vec x(appearance.row(i).begin(), appearance.row(i).end());
  x.insert(x.end(), interaction.row(i).begin(), interaction.row(i).end());
  return x;
}

Table Observations::reconstruction_targets() const {
  const std::size_t df = appearance.cols(), dh = interaction.cols();
  Table t(size(), df + dh);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t d = 0; d < df; ++d) t(i, d) = appearance(i, d);
    for (std::size_t d = 0; d < dh; ++d) t(i, df + d) = interaction(i, d);
  }
  return t;
}

Observations Observations::from_dataset(const Dataset& dataset) {
  const std::size_t n = dataset.proposal_count();
  std::size_t df = 0, dh = 0;
  for (const auto& img : dataset.images) {
    if (!img.proposals.empty()) {
      df = img.proposals.front().appearance.size();
      dh = img.proposals.front().interaction.size();
      break;
    }
  }
  Observations obs{Table(n, df), Table(n, dh)};
  std::size_t i = 0;
  for (const auto& img : dataset.images) {
    for (const auto& p : img.proposals) {
      if (p.appearance.size() != df || p.interaction.size() != dh) {
        fail(ErrorKind::kValidation, "proposal " + p.proposal_id + " in image " + img.image_id +
                                         " has inconsistent feature dimensions");
      }
      for (std::size_t d = 0; d < df; ++d) {
        if (!std::isfinite(p.appearance[d])) {
          fail(ErrorKind::kValidation, "proposal " + p.proposal_id + " has non-finite features");
        }
        obs.appearance(i, d) = p.appearance[d];
      }
      for (std::size_t d = 0; d < dh; ++d) {
        if (!std::isfinite(p.interaction[d])) {
          fail(ErrorKind::kValidation, "proposal " + p.proposal_id + " has non-finite features");
        }
        obs.interaction(i, d) = p.interaction[d];
      }
      ++i;
    }
  }
  return obs;
}

}  // namespace coseg
