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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core/rle.hpp"
#include "core/table.hpp"

namespace coseg {

using Vec = std::vector<double>;

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Point3 operator+(Point3 a, Point3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Point3 operator-(Point3 a, Point3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Point3 operator*(double s, Point3 a) { return {s * a.x, s * a.y, s * a.z}; }
  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double dot(Point3 a, Point3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Point3 a) { return std::sqrt(dot(a, a)); }

struct ProposalRecord {
  std::string image_id;
  std::string proposal_id;
  Rect bbox;
  std::optional<Mask> mask;
  Vec appearance;
  Vec interaction;
  std::optional<std::vector<Point3>> points;

  // Pixel support: the mask when present, otherwise the filled bbox.
  Mask region(std::int64_t image_width, std::int64_t image_height) const;

  friend bool operator==(const ProposalRecord&, const ProposalRecord&) = default;
};

struct HumanSkeleton {
  std::map<std::string, Point3> joints;
  std::map<std::string, double> confidence;

  friend bool operator==(const HumanSkeleton&, const HumanSkeleton&) = default;
};

// Ordered body parts, each a (start joint, end joint) pair. The order fixes
// the block layout of 3D interaction features.
struct SkeletonTopology {
  std::vector<std::pair<std::string, std::string>> parts;

  std::size_t size() const noexcept { return parts.size(); }

  // 18-part Kinect-style tree.
  static SkeletonTopology kinect_default();

  friend bool operator==(const SkeletonTopology&, const SkeletonTopology&) = default;
};

// Pinhole model used to back-project depth maps.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double depth_scale = 1.0;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

struct ImageRecord {
  std::string image_id;
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<ProposalRecord> proposals;
  std::vector<HumanSkeleton> humans;  // 3D mode
  std::vector<Rect> human_boxes;      // 2D mode
  std::map<std::string, Mask> ground_truth;
  std::optional<std::string> depth_path;
  std::optional<CameraIntrinsics> intrinsics;

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct Dataset {
  std::vector<ImageRecord> images;

  std::size_t proposal_count() const noexcept;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct PairwiseWeight {
  double weight = 0.0;
  double bias = 0.0;
  friend bool operator==(const PairwiseWeight&, const PairwiseWeight&) = default;
};

// CRF weights. Unary rows carry the feature weights followed by one bias
// column; the bias multiplies the augmented -1 entry, so a row r scores a
// feature f as dot(r[0..D), f) - r[D]. Pairwise weights exist only on the
// diagonal (same cluster); the off-diagonal ones are identically zero and
// not stored.
struct EncoderParams {
  Table appearance;   // K x (D_f + 1)
  Table interaction;  // K x (D_h + 1)
  std::vector<PairwiseWeight> pair_object;       // K
  std::vector<PairwiseWeight> pair_interaction;  // K

  // Zero unary weights, pairwise weights at epsilon_p, zero biases.
  static EncoderParams initial(std::size_t k, std::size_t d_f, std::size_t d_h, double epsilon_p);

  std::size_t clusters() const noexcept { return appearance.rows(); }
  std::size_t appearance_dim() const noexcept { return appearance.cols() - 1; }
  std::size_t interaction_dim() const noexcept { return interaction.cols() - 1; }

  // Flat coordinate layout: appearance rows, interaction rows, then
  // (weight, bias) per cluster for the object channel, then the same for
  // the interaction channel.
  std::size_t coordinate_count() const noexcept;
  Vec flatten() const;
  void assign(std::span<const double> flat);
  std::string coordinate_name(std::size_t index) const;

  // Human-readable descriptions of broken constraints; empty when feasible.
  std::vector<std::string> constraint_violations(double epsilon_p) const;

  friend bool operator==(const EncoderParams&, const EncoderParams&) = default;
};

// Per-cluster diagonal Gaussians over the reconstruction target [f; h].
struct ReconstructionParams {
  Table means;      // K x D_x
  Table variances;  // K x D_x

  std::size_t clusters() const noexcept { return means.rows(); }
  std::size_t dim() const noexcept { return means.cols(); }
  friend bool operator==(const ReconstructionParams&, const ReconstructionParams&) = default;
};

enum class ForegroundMode { kTop1, kUnion };

struct TrainConfig {
  std::size_t k = 4;
  std::optional<double> delta_f;  // nullopt = estimate from data
  std::optional<double> delta_h;
  double reg_lambda = 1e-3;
  double learning_rate = 5e-4;
  std::size_t outer_iters = 50;
  std::size_t mf_max_sweeps = 20;
  double mf_tol = 1e-4;
  double epsilon_p = 1e-4;
  double variance_floor = 1e-6;
  std::uint64_t seed = 0;
  ForegroundMode foreground_mode = ForegroundMode::kTop1;
  // Relative free-energy change that ends training early.
  double convergence_rtol = 1e-5;
  // Ablation switches. With use_pairwise off the pairwise channels are
  // dropped from every energy and message; with learn_encoder off the
  // encoder weights stay at their initial values.
  bool use_pairwise = true;
  bool learn_encoder = true;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

// Throws kUsage naming the first non-positive or inconsistent field.
void check_config(const TrainConfig& config);

const char* to_string(ForegroundMode mode);
ForegroundMode parse_foreground_mode(const std::string& text);

// Proposal features of a dataset laid out in dataset order (images, then
// proposals within an image).
struct Observations {
  Table appearance;   // N x D_f
  Table interaction;  // N x D_h

  std::size_t size() const noexcept { return appearance.rows(); }
  // [f_i ; h_i] for one proposal.
  Vec reconstruction_target(std::size_t i) const;
  // N x (D_f + D_h) table of all reconstruction targets.
  Table reconstruction_targets() const;

  static Observations from_dataset(const Dataset& dataset);
};

// Similarity channels over all proposal pairs. Symmetric, unit diagonal.
struct SimilarityChannels {
  Table object;
  Table interaction;
};

}  // namespace coseg
