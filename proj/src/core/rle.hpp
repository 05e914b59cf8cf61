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
#include <span>
#include <vector>

namespace coseg {

// Axis-aligned pixel rectangle; (x, y) is the top-left corner.
struct Rect {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t width = 0;
  std::int64_t height = 0;

  std::int64_t area() const noexcept { return width * height; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

// Binary pixel mask inside a width x height frame, stored as sorted,
// disjoint, non-adjacent runs of row-major linear pixel indices. The
// canonical form makes equality a structural comparison.
class Mask {
 public:
  struct Run {
    std::uint64_t start = 0;
    std::uint64_t length = 0;
    friend bool operator==(const Run&, const Run&) = default;
  };

  Mask() = default;
  Mask(std::int64_t width, std::int64_t height);

  // Alternating (skip, run) counts starting with a skip. Throws kValidation
  // when the counts overrun the frame.
  static Mask from_counts(std::int64_t width, std::int64_t height,
                          std::span<const std::uint64_t> counts);
  // Clips the rectangle to the frame.
  static Mask from_rect(std::int64_t width, std::int64_t height, const Rect& r);

  std::vector<std::uint64_t> counts() const;

  std::int64_t width() const noexcept { return width_; }
  std::int64_t height() const noexcept { return height_; }
  const std::vector<Run>& runs() const noexcept { return runs_; }

  std::uint64_t area() const noexcept;
  bool empty() const noexcept { return runs_.empty(); }
  bool contains(std::int64_t x, std::int64_t y) const;
  bool same_frame(const Mask& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  Mask intersect(const Mask& other) const;
  Mask unite(const Mask& other) const;
  std::uint64_t intersection_area(const Mask& other) const;
  // Pixels shifted out of the frame are dropped.
  Mask translated(std::int64_t dx, std::int64_t dy) const;
  Rect bounding_box() const;

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  void append(std::uint64_t start, std::uint64_t length);

  std::int64_t width_ = 0;
  std::int64_t height_ = 0;
  std::vector<Run> runs_;
};

}  // namespace coseg
