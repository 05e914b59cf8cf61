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

#include "io/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace coseg::io {
namespace {

Vec vec_from_json(const Json& j) {
  Vec v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(x.get<double>());
  return v;
}

Json point_to_json(const Point3& p) { return Json::array({p.x, p.y, p.z}); }

Point3 point_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) fail(ErrorKind::kValidation, "3D point must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Json mask_to_json(const Mask& m) { return m.counts(); }

Mask mask_from_json(const Json& j, std::int64_t w, std::int64_t h) {
  const auto counts = j.get<std::vector<std::uint64_t>>();
  return Mask::from_counts(w, h, counts);
}

}  // namespace

Json to_json(const Rect& r) { return Json::array({r.x, r.y, r.width, r.height}); }

Rect rect_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 4) {
    fail(ErrorKind::kValidation, "rectangle must be [x, y, width, height]");
  }
  return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>(), j[2].get<std::int64_t>(),
          j[3].get<std::int64_t>()};
}

Json to_json(const ImageRecord& img) {
  Json j;
  j["image_id"] = img.image_id;
  j["width"] = img.width;
  j["height"] = img.height;
  Json props = Json::array();
  for (const auto& p : img.proposals) {
    Json pj;
    pj["image_id"] = p.image_id;
    pj["proposal_id"] = p.proposal_id;
    pj["bbox"] = to_json(p.bbox);
    if (p.mask) pj["mask"] = mask_to_json(*p.mask);
    pj["appearance"] = p.appearance;
    pj["interaction"] = p.interaction;
    if (p.points) {
      Json pts = Json::array();
      for (const auto& q : *p.points) pts.push_back(point_to_json(q));
      pj["points"] = std::move(pts);
    }
    props.push_back(std::move(pj));
  }
  j["proposals"] = std::move(props);
  Json humans = Json::array();
  for (const auto& h : img.humans) {
    Json hj;
    Json joints = Json::object();
    for (const auto& [name, pos] : h.joints) joints[name] = point_to_json(pos);
    hj["joints"] = std::move(joints);
    if (!h.confidence.empty()) hj["confidence"] = h.confidence;
    humans.push_back(std::move(hj));
  }
  for (const auto& b : img.human_boxes) humans.push_back(to_json(b));
  j["humans"] = std::move(humans);
  if (!img.ground_truth.empty()) {
    Json gt = Json::object();
    for (const auto& [name, m] : img.ground_truth) gt[name] = {{"mask", mask_to_json(m)}};
    j["ground_truth"] = std::move(gt);
  }
  if (img.depth_path) j["depth_path"] = *img.depth_path;
  if (img.intrinsics) {
    const auto& c = *img.intrinsics;
    j["intrinsics"] = {{"fx", c.fx}, {"fy", c.fy}, {"cx", c.cx}, {"cy", c.cy},
                       {"depth_scale", c.depth_scale}};
  }
  return j;
}

ImageRecord image_from_json(const Json& j) {
  ImageRecord img;
  img.image_id = j.at("image_id").get<std::string>();
  img.width = j.at("width").get<std::int64_t>();
  img.height = j.at("height").get<std::int64_t>();
  for (const auto& pj : j.at("proposals")) {
    ProposalRecord p;
    p.image_id = pj.value("image_id", img.image_id);
    p.proposal_id = pj.at("proposal_id").get<std::string>();
    p.bbox = rect_from_json(pj.at("bbox"));
    if (pj.contains("mask") && !pj["mask"].is_null()) {
      p.mask = mask_from_json(pj["mask"], img.width, img.height);
    }
    if (pj.contains("appearance")) p.appearance = vec_from_json(pj["appearance"]);
    if (pj.contains("interaction")) p.interaction = vec_from_json(pj["interaction"]);
    if (pj.contains("points") && !pj["points"].is_null()) {
      std::vector<Point3> pts;
      pts.reserve(pj["points"].size());
      for (const auto& q : pj["points"]) pts.push_back(point_from_json(q));
      p.points = std::move(pts);
    }
    img.proposals.push_back(std::move(p));
  }
  if (j.contains("humans")) {
    for (const auto& hj : j["humans"]) {
      if (hj.is_array()) {
        img.human_boxes.push_back(rect_from_json(hj));
        continue;
      }
      HumanSkeleton h;
      for (const auto& [name, pos] : hj.at("joints").items()) h.joints[name] = point_from_json(pos);
      if (hj.contains("confidence")) {
        h.confidence = hj["confidence"].get<std::map<std::string, double>>();
      }
      img.humans.push_back(std::move(h));
    }
  }
  if (j.contains("ground_truth")) {
    for (const auto& [name, gj] : j["ground_truth"].items()) {
      if (gj.contains("mask")) {
        img.ground_truth.emplace(name, mask_from_json(gj["mask"], img.width, img.height));
      } else {
        img.ground_truth.emplace(
            name, Mask::from_rect(img.width, img.height, rect_from_json(gj.at("bbox"))));
      }
    }
  }
  if (j.contains("depth_path")) img.depth_path = j["depth_path"].get<std::string>();
  if (j.contains("intrinsics")) {
    const auto& c = j["intrinsics"];
    img.intrinsics = CameraIntrinsics{c.at("fx").get<double>(), c.at("fy").get<double>(),
                                      c.at("cx").get<double>(), c.at("cy").get<double>(),
                                      c.value("depth_scale", 1.0)};
  }
  return img;
}

Json to_json(const TrainConfig& c) {
  Json j;
  j["k"] = c.k;
  j["delta_f"] = c.delta_f ? Json(*c.delta_f) : Json("auto");
  j["delta_h"] = c.delta_h ? Json(*c.delta_h) : Json("auto");
  j["reg_lambda"] = c.reg_lambda;
  j["learning_rate"] = c.learning_rate;
  j["outer_iters"] = c.outer_iters;
  j["mf_max_sweeps"] = c.mf_max_sweeps;
  j["mf_tol"] = c.mf_tol;
  j["epsilon_p"] = c.epsilon_p;
  j["variance_floor"] = c.variance_floor;
  j["seed"] = c.seed;
  j["foreground_mode"] = to_string(c.foreground_mode);
  j["convergence_rtol"] = c.convergence_rtol;
  j["use_pairwise"] = c.use_pairwise;
  j["learn_encoder"] = c.learn_encoder;
  return j;
}

TrainConfig config_from_json(const Json& j) {
  TrainConfig c;
  auto bandwidth = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key) || (j[key].is_string() && j[key] == "auto")) return std::nullopt;
    return j[key].get<double>();
  };
  c.k = j.value("k", c.k);
  c.delta_f = bandwidth("delta_f");
  c.delta_h = bandwidth("delta_h");
  c.reg_lambda = j.value("reg_lambda", c.reg_lambda);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.outer_iters = j.value("outer_iters", c.outer_iters);
  c.mf_max_sweeps = j.value("mf_max_sweeps", c.mf_max_sweeps);
  c.mf_tol = j.value("mf_tol", c.mf_tol);
  c.epsilon_p = j.value("epsilon_p", c.epsilon_p);
  c.variance_floor = j.value("variance_floor", c.variance_floor);
  c.seed = j.value("seed", c.seed);
  c.foreground_mode = parse_foreground_mode(j.value("foreground_mode", std::string("top1")));
  c.convergence_rtol = j.value("convergence_rtol", c.convergence_rtol);
  c.use_pairwise = j.value("use_pairwise", c.use_pairwise);
  c.learn_encoder = j.value("learn_encoder", c.learn_encoder);
  return c;
}

Json to_json(const Table& t) {
  return {{"rows", t.rows()}, {"cols", t.cols()}, {"data", t.data()}};
}

Table table_from_json(const Json& j) {
  Table t(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto& data = j.at("data");
  if (data.size() != t.data().size()) fail(ErrorKind::kValidation, "table data has wrong length");
  for (std::size_t i = 0; i < data.size(); ++i) t.data()[i] = data[i].get<double>();
  return t;
}

Json to_json(const EncoderParams& p) {
  auto pairs = [](const std::vector<PairwiseWeight>& ws) {
    Json a = Json::array();
    for (const auto& w : ws) a.push_back({{"weight", w.weight}, {"bias", w.bias}});
    return a;
  };
  return {{"appearance", to_json(p.appearance)},
          {"interaction", to_json(p.interaction)},
          {"pair_object", pairs(p.pair_object)},
          {"pair_interaction", pairs(p.pair_interaction)}};
}

EncoderParams encoder_from_json(const Json& j) {
  auto pairs = [](const Json& a) {
    std::vector<PairwiseWeight> ws;
    for (const auto& w : a) ws.push_back({w.at("weight").get<double>(), w.at("bias").get<double>()});
    return ws;
  };
  EncoderParams p;
  p.appearance = table_from_json(j.at("appearance"));
  p.interaction = table_from_json(j.at("interaction"));
  p.pair_object = pairs(j.at("pair_object"));
  p.pair_interaction = pairs(j.at("pair_interaction"));
  return p;
}

Json to_json(const ReconstructionParams& p) {
  return {{"means", to_json(p.means)}, {"variances", to_json(p.variances)}};
}

ReconstructionParams reconstruction_from_json(const Json& j) {
  return {table_from_json(j.at("means")), table_from_json(j.at("variances"))};
}

Manifest read_manifest(std::istream& in) {
  Manifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      if (j.contains("meta") && !j.contains("image_id")) {
        m.meta = j["meta"];
        continue;
      }
      m.dataset.images.push_back(image_from_json(j));
    } catch (const Json::exception& e) {
      fail(ErrorKind::kValidation,
           "manifest line " + std::to_string(line_no) + ": " + std::string(e.what()));
    } catch (const Error& e) {
      fail(e.kind(), "manifest line " + std::to_string(line_no) + ": " + std::string(e.what()));
    }
  }
  return m;
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open manifest '" + path + "'");
  return read_manifest(in);
}

void write_manifest(std::ostream& out, const Manifest& manifest) {
  if (!manifest.meta.empty()) out << Json{{"meta", manifest.meta}}.dump() << '\n';
  for (const auto& img : manifest.dataset.images) out << to_json(img).dump() << '\n';
}

void write_manifest(const std::string& path, const Manifest& manifest) {
  std::ostringstream os;
  write_manifest(os, manifest);
  write_file(path, os.str());
}

void write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::kIo, "cannot open '" + tmp + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::remove(tmp.c_str());
      fail(ErrorKind::kIo, "failed writing '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    fail(ErrorKind::kIo, "cannot replace '" + path + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace coseg::io
