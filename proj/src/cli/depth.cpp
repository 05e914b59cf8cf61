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

#include "cli/depth.hpp"

#include <cctype>
#include <fstream>

#include "core/error.hpp"

namespace coseg::cli {

std::vector<Point3> depth_to_points(const DepthMap& depth, const Mask& mask,
                                    const CameraIntrinsics& k) {
  if (depth.width != mask.width() || depth.height != mask.height()) {
    fail(ErrorKind::kValidation, "depth map and mask dimensions differ");
  }
  if (depth.values.size() != static_cast<std::size_t>(depth.width * depth.height)) {
    fail(ErrorKind::kValidation, "depth map has the wrong number of values");
  }
  if (!(k.fx > 0.0 && k.fy > 0.0 && k.depth_scale > 0.0)) {
    fail(ErrorKind::kUsage, "camera intrinsics need positive fx, fy, and depth_scale");
  }
  std::vector<Point3> out;
  const auto w = static_cast<std::uint64_t>(depth.width);
  for (const auto& run : mask.runs()) {
    for (std::uint64_t idx = run.start; idx < run.start + run.length; ++idx) {
      const double d = depth.values[idx];
      if (!(d > 0.0)) continue;
      const auto u = static_cast<double>(idx % w);
      const auto v = static_cast<double>(idx / w);
      const double z = d * k.depth_scale;
      out.push_back({(u - k.cx) * z / k.fx, (v - k.cy) * z / k.fy, z});
    }
  }
  return out;
}

namespace {

std::int64_t read_header_int(std::istream& in) {
  while (true) {
    const int c = in.peek();
    if (c == '#') {
      std::string skip;
      std::getline(in, skip);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  std::int64_t v = -1;
  in >> v;
  if (!in || v < 0) fail(ErrorKind::kValidation, "malformed PGM header");
  return v;
}

}  // namespace

DepthMap read_depth_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open depth map '" + path + "'");
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (magic != "P2" && magic != "P5") fail(ErrorKind::kValidation, "'" + path + "' is not a PGM file");
  DepthMap d;
  d.width = read_header_int(in);
  d.height = read_header_int(in);
  const std::int64_t maxval = read_header_int(in);
  if (maxval < 1 || maxval > 65535) fail(ErrorKind::kValidation, "PGM maxval out of range");
  const auto count = static_cast<std::size_t>(d.width * d.height);
  d.values.resize(count);
  if (magic == "P2") {
    for (auto& v : d.values) {
      std::int64_t x = 0;
      if (!(in >> x)) fail(ErrorKind::kValidation, "PGM data ends early");
      v = static_cast<double>(x);
    }
    return d;
  }
  in.get();  // single whitespace after maxval
  const int bytes = maxval > 255 ? 2 : 1;
  for (auto& v : d.values) {
    unsigned char buf[2] = {0, 0};
    in.read(reinterpret_cast<char*>(buf), bytes);
    if (!in) fail(ErrorKind::kValidation, "PGM data ends early");
    v = bytes == 2 ? static_cast<double>((buf[0] << 8) | buf[1]) : static_cast<double>(buf[0]);
  }
  return d;
}

}  // namespace coseg::cli
