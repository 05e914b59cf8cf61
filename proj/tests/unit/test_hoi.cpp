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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "cli/depth.hpp"
#include "cli/featurize.hpp"
#include "core/error.hpp"
#include "core/grid.hpp"
#include "hoi/histogram.hpp"
#include "hoi/similarity.hpp"
#include "support/oracles.hpp"

using namespace coseg;
using doctest::Approx;

namespace {

// Point at axial position t (meters from start), radius rho, angle phi
// around the z axis part from the origin to (0, 0, len).
Point3 around_z(double t, double rho, double phi) {
  return {rho * std::cos(phi), rho * std::sin(phi), t};
}

}  // namespace

TEST_CASE("cylinder histogram single-bin and exclusion cases") {
  const hoi::CylinderBinning bins;
  const Point3 a{0, 0, 0}, b{0, 0, 0.6};
  SUBCASE("axial middle, outer ring") {
    std::vector<Point3> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(around_z(0.3, 0.9 * bins.max_radius, 0.3 * i));
    const auto h = hoi::hoi_histogram_3d(pts, a, b, bins);
    for (std::size_t bin = 0; bin < h.size(); ++bin) CHECK(h[bin] == (bin == 1 * 5 + 4 ? 20u : 0u));
  }
  SUBCASE("points on the axis are excluded") {
    std::vector<Point3> pts{{0, 0, 0.1}, {0, 0, 0.3}, {0, 0, 0.5}};
    const auto h = hoi::hoi_histogram_3d(pts, a, b, bins);
    CHECK(std::all_of(h.begin(), h.end(), [](auto c) { return c == 0; }));
  }
  SUBCASE("beyond the shell or the segment") {
    std::vector<Point3> pts{around_z(0.3, 0.51, 0), around_z(-0.01, 0.2, 0), around_z(0.61, 0.2, 0)};
    const auto h = hoi::hoi_histogram_3d(pts, a, b, bins);
    CHECK(std::all_of(h.begin(), h.end(), [](auto c) { return c == 0; }));
  }
  CHECK_THROWS_AS(hoi::hoi_histogram_3d({}, a, a, bins), Error);
}

TEST_CASE("cylinder histogram matches per-point classification of 1000 shell points") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const hoi::CylinderBinning bins;
  const Point3 a{0.3, -0.2, 1.1}, b{0.5, 0.4, 1.6};
  std::vector<Point3> pts;
  for (int i = 0; i < 1000; ++i) {
    // Uniform in a box around the segment; many land inside the shell.
    pts.push_back({a.x + (u(rng) - 0.3) * 1.2, a.y + (u(rng) - 0.3) * 1.4, a.z + (u(rng) - 0.3) * 1.2});
  }
  const auto h = hoi::hoi_histogram_3d(pts, a, b, bins);
  std::array<std::uint64_t, 15> expect{};
  for (const auto& p : pts) {
    const int bin = testing::naive_cylinder_bin(p, a, b, bins.max_radius, bins.inner_exclusion_fraction);
    if (bin >= 0) ++expect[bin];
  }
  CHECK(std::equal(h.begin(), h.end(), expect.begin()));
  std::uint64_t counted = 0;
  for (auto c : h) counted += c;
  CHECK(counted > 100);
}

TEST_CASE("hoi_feature_3d normalization and missing points") {
  const auto topo = SkeletonTopology::kinect_default();
  HumanSkeleton s;
  double z = 0.0;
  for (const auto& [j1, j2] : topo.parts) {
    if (!s.joints.count(j1)) s.joints[j1] = {0, 0, z += 0.3};
    if (!s.joints.count(j2)) s.joints[j2] = {0, 0, z += 0.3};
  }
  const hoi::CylinderBinning bins;
  const Point3 start = s.joints.at(topo.parts[0].first), end = s.joints.at(topo.parts[0].second);
  const Point3 dir = end - start;
  std::vector<Point3> pts;
  for (int i = 0; i < 10; ++i) {
    pts.push_back(start + 0.1 * dir + Point3{0.0, 0.15 + 0.001 * i, 0.0} + Point3{10.0, 0, 0});
  }
  // Far from every part.
  auto far = hoi::hoi_feature_3d(pts, s, topo, bins);
  CHECK(far.h.size() == topo.size() * 15);
  CHECK(std::all_of(far.h.begin(), far.h.end(), [](double v) { return v == 0.0; }));
  for (auto& p : pts) p.x -= 10.0;
  const auto near = hoi::hoi_feature_3d(pts, s, topo, bins);
  // Every point sits in one bin of part 0; other parts may see them too,
  // but part 0's block is one-hot at 1.0.
  double block = 0.0;
  int nonzero = 0;
  for (std::size_t b = 0; b < 15; ++b) {
    block += near.h[b];
    nonzero += near.h[b] > 0.0;
  }
  CHECK(block == Approx(1.0));
  CHECK(nonzero == 1);
  const auto none = hoi::hoi_feature_3d({}, s, topo, bins);
  CHECK(none.missing_points);
  HumanSkeleton broken = s;
  broken.joints.erase(topo.parts[3].second);
  CHECK_THROWS_AS(hoi::hoi_feature_3d(pts, broken, topo, bins), Error);
}

TEST_CASE("3D histogram is invariant to rigid motions") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const hoi::CylinderBinning bins;
  for (int trial = 0; trial < 10; ++trial) {
    const Point3 a{u(rng), u(rng), u(rng)}, b{u(rng), u(rng), u(rng) + 2.0};
    std::vector<Point3> pts;
    for (int i = 0; i < 300; ++i) pts.push_back({u(rng), u(rng), u(rng) + 1.0});
    const double ang = u(rng) * 3.0;
    const Point3 shift{u(rng) * 5, u(rng) * 5, u(rng) * 5};
    auto move = [&](Point3 p) {
      return Point3{std::cos(ang) * p.x - std::sin(ang) * p.y, std::sin(ang) * p.x + std::cos(ang) * p.y,
                    p.z} + shift;
    };
    std::vector<Point3> moved;
    for (const auto& p : pts) moved.push_back(move(p));
    const auto h1 = hoi::hoi_histogram_3d(pts, a, b, bins);
    const auto h2 = hoi::hoi_histogram_3d(moved, move(a), move(b), bins);
    for (std::size_t k = 0; k < 15; ++k) {
      CHECK(std::abs(static_cast<double>(h1[k]) - static_cast<double>(h2[k])) / 300.0 <= 1e-9);
    }
  }
}

TEST_CASE("2D grid feature") {
  const Rect box{10, 10, 60, 60};
  SUBCASE("inside cell (0,0)") {
    const Mask p = Mask::from_rect(100, 100, {11, 11, 5, 5});
    const Vec h = hoi::hoi_feature_2d(p, box);
    CHECK(h[0] == 1.0);
    for (std::size_t i = 1; i < 36; ++i) CHECK(h[i] == 0.0);
  }
  SUBCASE("disjoint") {
    const Vec h = hoi::hoi_feature_2d(Mask::from_rect(100, 100, {80, 80, 5, 5}), box);
    CHECK(std::all_of(h.begin(), h.end(), [](double v) { return v == 0.0; }));
  }
  SUBCASE("left half") {
    const Mask p = Mask::from_rect(100, 100, {10, 10, 30, 60});
    const Vec h = hoi::hoi_feature_2d(p, box);
    const auto oracle = testing::naive_grid_feature(p, box);
    for (std::size_t r = 0; r < 6; ++r) {
      for (std::size_t c = 0; c < 6; ++c) {
        CHECK(h[r * 6 + c] == Approx(c < 3 ? 1.0 / 18.0 : 0.0).epsilon(1e-15));
        CHECK(h[r * 6 + c] == oracle[r * 6 + c]);
      }
    }
  }
  CHECK_THROWS_AS(hoi::hoi_feature_2d(Mask(10, 10), box), Error);
  CHECK_THROWS_AS(hoi::hoi_feature_2d(Mask::from_rect(10, 10, {0, 0, 2, 2}), Rect{0, 0, 0, 4}), Error);
}

TEST_CASE("2D grid feature matches per-pixel counting on random fixtures") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::int64_t> c(0, 70);
  for (int trial = 0; trial < 40; ++trial) {
    const Rect box{c(rng), c(rng), c(rng) % 40 + 1, c(rng) % 40 + 1};
    Mask p = Mask::from_rect(80, 80, {c(rng), c(rng), c(rng) % 30 + 1, c(rng) % 30 + 1});
    p = p.unite(Mask::from_rect(80, 80, {c(rng), c(rng), 7, 3}));
    const Vec h = hoi::hoi_feature_2d(p, box);
    const auto oracle = testing::naive_grid_feature(p, box);
    for (std::size_t i = 0; i < 36; ++i) CHECK(h[i] == oracle[i]);
  }
}

TEST_CASE("pool_humans") {
  const std::vector<Vec> two{{0.2, 0.0}, {0.0, 0.3}};
  CHECK(hoi::pool_humans(two, 2) == Vec{0.2, 0.3});
  CHECK(hoi::pool_humans(std::vector<Vec>{{0.1, 0.4}}, 2) == Vec{0.1, 0.4});
  CHECK(hoi::pool_humans({}, 3) == Vec{0, 0, 0});
}

TEST_CASE("gaussian similarity") {
  const Vec a{0.0, 0.0}, b{1.0, 1.0};
  CHECK(hoi::gaussian_similarity(a, a, 2.0) == 1.0);
  CHECK(hoi::gaussian_similarity(a, b, 2.0) == Approx(0.367879).epsilon(1e-6));
  CHECK(hoi::gaussian_similarity(a, b, 4.0) == Approx(0.606531).epsilon(1e-6));
  CHECK_THROWS_AS(hoi::gaussian_similarity(a, b, 0.0), Error);
}

TEST_CASE("bandwidth estimate") {
  Table two(2, 1);
  two(1, 0) = 3.0;
  CHECK(hoi::estimate_bandwidth(two) == 9.0);
  CHECK(hoi::estimate_bandwidth(Table(5, 3, 0.7)) == 1.0);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Table x(50, 4);
  for (double& v : x.data()) v = g(rng);
  std::vector<double> d;
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t j = i + 1; j < 50; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < 4; ++t) s += (x(i, t) - x(j, t)) * (x(i, t) - x(j, t));
      d.push_back(s);
    }
  }
  std::sort(d.begin(), d.end());
  const double median = d.size() % 2 ? d[d.size() / 2] : 0.5 * (d[d.size() / 2 - 1] + d[d.size() / 2]);
  CHECK(hoi::estimate_bandwidth(x) == median);
}

TEST_CASE("augment") {
  CHECK(hoi::augment(Vec{1, 2}) == Vec{1, 2, -1});
  CHECK(hoi::augment(Vec{}) == Vec{-1});
  CHECK(hoi::augment(Vec{0}) == Vec{0, -1});
}

TEST_CASE("similarity table is thread-count independent") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Table x(40, 3);
  for (double& v : x.data()) v = g(rng);
  const Table a = hoi::similarity_table(x, 1.7, {1});
  const Table b = hoi::similarity_table(x, 1.7, {7});
  CHECK(a == b);
  for (std::size_t i = 0; i < 40; ++i) CHECK(a(i, i) == 1.0);
}

TEST_CASE("depth back-projection") {
  cli::DepthMap depth{4, 3, std::vector<double>(12, 0.0)};
  const CameraIntrinsics cam{2.0, 3.0, 1.0, 2.0, 0.001};
  depth.values[2 * 4 + 1] = 1000.0;  // (u, v) = (1, 2) is the principal point
  const Mask all = Mask::from_rect(4, 3, {0, 0, 4, 3});
  auto pts = cli::depth_to_points(depth, all, cam);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].x == 0.0);
  CHECK(pts[0].y == 0.0);
  CHECK(pts[0].z == Approx(1.0));
  CHECK(cli::depth_to_points({4, 3, std::vector<double>(12, 0.0)}, all, cam).empty());
  CHECK_THROWS_AS(cli::depth_to_points(depth, Mask(3, 3), cam), Error);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 3000.0);
  cli::DepthMap rnd{9, 7, std::vector<double>(63)};
  for (double& v : rnd.values) v = u(rng) < 500.0 ? 0.0 : u(rng);
  const Mask m = Mask::from_rect(9, 7, {1, 1, 6, 5}).unite(Mask::from_rect(9, 7, {0, 6, 9, 1}));
  const CameraIntrinsics c2{520.0, 515.0, 4.2, 3.1, 0.001};
  pts = cli::depth_to_points(rnd, m, c2);
  std::size_t next = 0;
  for (std::int64_t v = 0; v < 7; ++v) {
    for (std::int64_t uu = 0; uu < 9; ++uu) {
      const double d = rnd.values[v * 9 + uu];
      if (!m.contains(uu, v) || d <= 0.0) continue;
      REQUIRE(next < pts.size());
      const double zz = d * 0.001;
      CHECK(pts[next].x == Approx((uu - 4.2) * zz / 520.0).epsilon(1e-14));
      CHECK(pts[next].y == Approx((v - 3.1) * zz / 515.0).epsilon(1e-14));
      CHECK(pts[next].z == Approx(zz).epsilon(1e-14));
      ++next;
    }
  }
  CHECK(next == pts.size());
}

TEST_CASE("featurize 2D fills the interaction vectors") {
  Dataset raw;
  ImageRecord img;
  img.image_id = "im";
  img.width = 40;
  img.height = 40;
  img.human_boxes.push_back({0, 0, 12, 12});
  img.human_boxes.push_back({20, 20, 12, 12});
  for (auto p : make_grid_proposals("im", 40, 40, 2, 2)) {
    p.appearance = {1.0, 2.0};
    img.proposals.push_back(p);
  }
  raw.images.push_back(img);
  cli::FeaturizeOptions opts;
  opts.mode = cli::InteractionMode::k2d;
  cli::FeaturizeReport report;
  const Dataset out = cli::featurize(raw, opts, &report);
  CHECK(report.proposals == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = out.images[0].proposals[i];
    CHECK(p.appearance == Vec{1.0, 2.0});
    REQUIRE(p.interaction.size() == 36);
    const Mask region = p.region(40, 40);
    const auto h0 = testing::naive_grid_feature(region, img.human_boxes[0]);
    const auto h1 = testing::naive_grid_feature(region, img.human_boxes[1]);
    for (std::size_t b = 0; b < 36; ++b) CHECK(p.interaction[b] == std::max(h0[b], h1[b]));
  }
}

TEST_CASE("featurize 3D back-projects the depth map") {
  const auto dir = std::filesystem::temp_directory_path() / "coseg_unit_depth";
  std::filesystem::create_directories(dir);
  const std::int64_t w = 8, h = 6;
  std::vector<std::uint16_t> raw(w * h);
  for (std::int64_t i = 0; i < w * h; ++i) raw[i] = static_cast<std::uint16_t>(1500 + 37 * (i % 11));
  {
    std::ofstream out(dir / "d.pgm", std::ios::binary);
    out << "P5\n" << w << " " << h << "\n65535\n";
    for (auto v : raw) {
      out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xff));
    }
  }
  Dataset ds;
  ImageRecord img;
  img.image_id = "scene";
  img.width = w;
  img.height = h;
  img.depth_path = "d.pgm";
  img.intrinsics = CameraIntrinsics{4.0, 4.0, 4.0, 3.0, 0.001};
  HumanSkeleton s;
  const auto topo = SkeletonTopology::kinect_default();
  double y = -1.0;
  for (const auto& [a, b] : topo.parts) {
    if (!s.joints.count(a)) s.joints[a] = {0.0, y += 0.15, 1.6};
    if (!s.joints.count(b)) s.joints[b] = {0.0, y += 0.15, 1.6};
  }
  img.humans.push_back(s);
  for (auto p : make_grid_proposals("scene", w, h, 2, 2)) {
    p.appearance = {0.0};
    img.proposals.push_back(p);
  }
  ds.images.push_back(img);
  cli::FeaturizeOptions opts;
  opts.base_dir = dir.string();
  cli::FeaturizeReport report;
  const Dataset out = cli::featurize(ds, opts, &report);
  CHECK(report.without_points == 0);
  const cli::DepthMap depth = cli::read_depth_pgm((dir / "d.pgm").string());
  CHECK(depth.at(3, 2) == raw[2 * w + 3]);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& p = out.images[0].proposals[i];
    CHECK_FALSE(p.points.has_value());
    REQUIRE(p.interaction.size() == topo.size() * 15);
    const auto pts = cli::depth_to_points(depth, p.region(w, h), *img.intrinsics);
    const auto expect = hoi::hoi_feature_3d(pts, s, topo, opts.binning).h;
    CHECK(p.interaction == expect);
  }
  std::filesystem::remove_all(dir);
}
