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

#include "core/rle.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace coseg {

Mask::Mask(std::int64_t width, std::int64_t height) : width_(width), height_(height) {
  if (width < 0 || height < 0) fail(ErrorKind::kValidation, "mask frame has negative size");
}

void Mask::append(std::uint64_t start, std::uint64_t length) {
  if (length == 0) return;
  if (!runs_.empty()) {
    Run& last = runs_.back();
    if (last.start + last.length >= start) {
      last.length = std::max(last.start + last.length, start + length) - last.start;
      return;
    }
  }
  runs_.push_back({start, length});
}

Mask Mask::from_counts(std::int64_t width, std::int64_t height,
                       std::span<const std::uint64_t> counts) {
  Mask m(width, height);
  const std::uint64_t total = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
  std::uint64_t pos = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] > total - pos) {
      fail(ErrorKind::kValidation, "mask run-length counts exceed the " + std::to_string(width) +
                                       "x" + std::to_string(height) + " frame");
    }
    if (i % 2 == 1) m.append(pos, counts[i]);
    pos += counts[i];
  }
  return m;
}

Mask Mask::from_rect(std::int64_t width, std::int64_t height, const Rect& r) {
  Mask m(width, height);
  const std::int64_t x0 = std::clamp<std::int64_t>(r.x, 0, width);
  const std::int64_t x1 = std::clamp<std::int64_t>(r.x + r.width, 0, width);
  const std::int64_t y0 = std::clamp<std::int64_t>(r.y, 0, height);
  const std::int64_t y1 = std::clamp<std::int64_t>(r.y + r.height, 0, height);
  if (x1 <= x0 || y1 <= y0) return m;
  for (std::int64_t y = y0; y < y1; ++y) {
    m.append(static_cast<std::uint64_t>(y * width + x0), static_cast<std::uint64_t>(x1 - x0));
  }
  return m;
}

std::vector<std::uint64_t> Mask::counts() const {
  std::vector<std::uint64_t> out;
  out.reserve(runs_.size() * 2);
  std::uint64_t pos = 0;
  for (const Run& r : runs_) {
    out.push_back(r.start - pos);
    out.push_back(r.length);
    pos = r.start + r.length;
  }
  return out;
}

std::uint64_t Mask::area() const noexcept {
  std::uint64_t a = 0;
  for (const Run& r : runs_) a += r.length;
  return a;
}

bool Mask::contains(std::int64_t x, std::int64_t y) const {
  if (x < 0 || y < 0 || x >= width_ || y >= height_) return false;
  const auto idx = static_cast<std::uint64_t>(y * width_ + x);
  auto it = std::upper_bound(runs_.begin(), runs_.end(), idx,
                             [](std::uint64_t v, const Run& r) { return v < r.start; });
  if (it == runs_.begin()) return false;
  --it;
  return idx < it->start + it->length;
}

Mask Mask::intersect(const Mask& other) const {
  Mask out(width_, height_);
  std::size_t i = 0, j = 0;
  while (i < runs_.size() && j < other.runs_.size()) {
    const Run& a = runs_[i];
    const Run& b = other.runs_[j];
    const std::uint64_t lo = std::max(a.start, b.start);
    const std::uint64_t hi = std::min(a.start + a.length, b.start + b.length);
    if (lo < hi) out.append(lo, hi - lo);
    if (a.start + a.length < b.start + b.length) {
      ++i;
    } else {
      ++j;
    }
  }
  return out;
}

Mask Mask::unite(const Mask& other) const {
  Mask out(width_, height_);
  std::size_t i = 0, j = 0;
  while (i < runs_.size() || j < other.runs_.size()) {
    const bool take_a =
        j == other.runs_.size() || (i < runs_.size() && runs_[i].start <= other.runs_[j].start);
    const Run& r = take_a ? runs_[i++] : other.runs_[j++];
    out.append(r.start, r.length);
  }
  return out;
}

std::uint64_t Mask::intersection_area(const Mask& other) const {
  return intersect(other).area();
}

Mask Mask::translated(std::int64_t dx, std::int64_t dy) const {
  Mask out(width_, height_);
  if (width_ == 0) return out;
  const auto w = static_cast<std::uint64_t>(width_);
  for (const Run& r : runs_) {
    std::uint64_t pos = r.start;
    const std::uint64_t end = r.start + r.length;
    while (pos < end) {
      const std::uint64_t row = pos / w;
      const std::uint64_t col = pos % w;
      const std::uint64_t seg_end = std::min(end, (row + 1) * w);
      const auto ny = static_cast<std::int64_t>(row) + dy;
      const std::int64_t x0 = std::max<std::int64_t>(static_cast<std::int64_t>(col) + dx, 0);
      const std::int64_t x1 =
          std::min<std::int64_t>(static_cast<std::int64_t>(col + (seg_end - pos)) + dx, width_);
      if (ny >= 0 && ny < height_ && x0 < x1) {
        out.append(static_cast<std::uint64_t>(ny * width_ + x0), static_cast<std::uint64_t>(x1 - x0));
      }
      pos = seg_end;
    }
  }
  return out;
}

Rect Mask::bounding_box() const {
  if (runs_.empty() || width_ == 0) return {};
  const auto w = static_cast<std::uint64_t>(width_);
  std::int64_t x0 = std::numeric_limits<std::int64_t>::max(), x1 = -1;
  const auto y0 = static_cast<std::int64_t>(runs_.front().start / w);
  const auto y1 = static_cast<std::int64_t>((runs_.back().start + runs_.back().length - 1) / w);
  for (const Run& r : runs_) {
    const std::uint64_t last = r.start + r.length - 1;
    if (r.start / w != last / w) {
      x0 = 0;
      x1 = width_ - 1;
      break;
    }
    x0 = std::min<std::int64_t>(x0, static_cast<std::int64_t>(r.start % w));
    x1 = std::max<std::int64_t>(x1, static_cast<std::int64_t>(last % w));
  }
  return {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
}

}  // namespace coseg
