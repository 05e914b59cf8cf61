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

#include "io/model_file.hpp"

#include <sstream>

#include "core/error.hpp"

namespace coseg::io {
namespace {

std::vector<std::string> json_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
  }
  return out;
}

}  // namespace

Json iteration_to_json(const crf::IterationRecord& rec, bool with_wall_time) {
  Json j{{"iteration", rec.iteration},     {"log_z", rec.log_z},
         {"log_z_prime", rec.log_z_prime}, {"objective", rec.objective},
         {"max_delta_q", rec.max_delta_q}, {"sweeps", rec.sweeps},
         {"delta_history", rec.delta_history}};
  if (with_wall_time) j["wall_seconds"] = rec.wall_seconds;
  return j;
}

Json model_to_json(const crf::TrainedModel& m) {
  Json trace = Json::array();
  for (const auto& rec : m.trace) trace.push_back(iteration_to_json(rec, false));
  return {{"format_version", kFormatVersion},
          {"config", to_json(m.config)},
          {"bandwidths", {{"delta_f", m.delta_f}, {"delta_h", m.delta_h}}},
          {"encoder", to_json(m.encoder)},
          {"reconstruction", to_json(m.reconstruction)},
          {"final_state",
           {{"q", to_json(m.final_state.q)},
            {"q_prime", to_json(m.final_state.q_prime)},
            {"sweeps", m.final_state.sweeps},
            {"converged", m.final_state.converged},
            {"delta_history", m.final_state.delta_history}}},
          {"dataset_fingerprint", m.dataset_fingerprint},
          {"trace", std::move(trace)}};
}

crf::TrainedModel model_from_json(const Json& j) {
  const int version = j.value("format_version", 0);
  if (version != kFormatVersion) {
    fail(ErrorKind::kValidation, "unsupported model format_version " + std::to_string(version));
  }
  crf::TrainedModel m;
  m.config = config_from_json(j.at("config"));
  m.delta_f = j.at("bandwidths").at("delta_f").get<double>();
  m.delta_h = j.at("bandwidths").at("delta_h").get<double>();
  m.encoder = encoder_from_json(j.at("encoder"));
  m.reconstruction = reconstruction_from_json(j.at("reconstruction"));
  const auto& fs = j.at("final_state");
  m.final_state.q = table_from_json(fs.at("q"));
  m.final_state.q_prime = table_from_json(fs.at("q_prime"));
  m.final_state.sweeps = fs.value("sweeps", std::size_t{0});
  m.final_state.converged = fs.value("converged", false);
  m.final_state.delta_history = fs.value("delta_history", std::vector<double>{});
  m.dataset_fingerprint = j.value("dataset_fingerprint", std::uint64_t{0});
  for (const auto& r : j.value("trace", Json::array())) {
    crf::IterationRecord rec;
    rec.iteration = r.at("iteration").get<std::size_t>();
    rec.log_z = r.at("log_z").get<double>();
    rec.log_z_prime = r.at("log_z_prime").get<double>();
    rec.objective = r.at("objective").get<double>();
    rec.max_delta_q = r.at("max_delta_q").get<double>();
    rec.sweeps = r.at("sweeps").get<std::size_t>();
    rec.delta_history = r.at("delta_history").get<std::vector<double>>();
    m.trace.push_back(std::move(rec));
  }
  return m;
}

void save_model(const std::string& path, const crf::TrainedModel& model) {
  write_file(path, model_to_json(model).dump(1) + "\n");
}

crf::TrainedModel load_model(const std::string& path) {
  try {
    return model_from_json(Json::parse(read_file(path)));
  } catch (const Json::exception& e) {
    fail(ErrorKind::kValidation, "model file '" + path + "': " + e.what());
  }
}

std::string progress_log(const std::vector<crf::IterationRecord>& trace) {
  std::string out;
  for (const auto& rec : trace) out += iteration_to_json(rec, true).dump() + "\n";
  return out;
}

std::string distributions_to_string(const Dataset& dataset, const Table& q, const Json& meta) {
  if (q.rows() != dataset.proposal_count()) {
    fail(ErrorKind::kValidation, "distribution table does not match the dataset");
  }
  const auto labels = crf::hard_assignment(q);
  std::string out = Json{{"meta", meta}}.dump() + "\n";
  std::size_t i = 0;
  for (const auto& img : dataset.images) {
    for (const auto& p : img.proposals) {
      const auto row = q.row(i);
      out += Json{{"image_id", img.image_id},
                  {"proposal_id", p.proposal_id},
                  {"q", std::vector<double>(row.begin(), row.end())},
                  {"argmax", labels[i]}}
                 .dump() +
             "\n";
      ++i;
    }
  }
  return out;
}

Distributions read_distributions(const std::string& path) {
  Distributions d;
  std::vector<std::vector<double>> rows;
  try {
    for (const auto& line : json_lines(read_file(path))) {
      const Json j = Json::parse(line);
      if (j.contains("meta")) {
        d.meta = j["meta"];
        continue;
      }
      d.keys.push_back({j.at("image_id").get<std::string>(), j.at("proposal_id").get<std::string>()});
      rows.push_back(j.at("q").get<std::vector<double>>());
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::kValidation, "distribution file '" + path + "': " + e.what());
  }
  const std::size_t k = rows.empty() ? 0 : rows.front().size();
  d.q = Table(rows.size(), k);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != k) fail(ErrorKind::kValidation, "distribution rows differ in length");
    for (std::size_t c = 0; c < k; ++c) d.q(i, c) = rows[i][c];
  }
  return d;
}

Selections make_selections(const Dataset& dataset, const std::vector<crf::ImageSelection>& sel,
                           const Json& meta) {
  if (sel.size() != dataset.images.size()) {
    fail(ErrorKind::kValidation, "selection does not cover every image");
  }
  Selections out;
  out.meta = meta;
  for (std::size_t m = 0; m < sel.size(); ++m) {
    const ImageRecord& img = dataset.images[m];
    SelectionRecord rec{img.image_id, img.width, img.height, {}, {}, {}};
    for (const auto& cs : sel[m].clusters) {
      std::vector<std::string> ids;
      for (std::size_t p : cs.proposals) ids.push_back(img.proposals[p].proposal_id);
      rec.proposal_ids.push_back(std::move(ids));
      rec.confidence.push_back(cs.confidence);
      rec.regions.push_back(cs.region);
    }
    out.images.push_back(std::move(rec));
  }
  return out;
}

std::string selections_to_string(const Selections& s) {
  std::string out = Json{{"meta", s.meta}}.dump() + "\n";
  for (const auto& rec : s.images) {
    Json clusters = Json::array();
    for (std::size_t c = 0; c < rec.regions.size(); ++c) {
      clusters.push_back({{"k", c},
                          {"proposals", rec.proposal_ids[c]},
                          {"confidence", rec.confidence[c]},
                          {"area", rec.regions[c].area()},
                          {"mask", rec.regions[c].counts()}});
    }
    out += Json{{"image_id", rec.image_id},
                {"width", rec.width},
                {"height", rec.height},
                {"clusters", std::move(clusters)}}
               .dump() +
           "\n";
  }
  return out;
}

Selections read_selections(const std::string& path) {
  Selections s;
  try {
    for (const auto& line : json_lines(read_file(path))) {
      const Json j = Json::parse(line);
      if (j.contains("meta")) {
        s.meta = j["meta"];
        continue;
      }
      SelectionRecord rec;
      rec.image_id = j.at("image_id").get<std::string>();
      rec.width = j.at("width").get<std::int64_t>();
      rec.height = j.at("height").get<std::int64_t>();
      for (const auto& cj : j.at("clusters")) {
        rec.proposal_ids.push_back(cj.at("proposals").get<std::vector<std::string>>());
        rec.confidence.push_back(cj.at("confidence").get<std::vector<double>>());
        const auto counts = cj.at("mask").get<std::vector<std::uint64_t>>();
        rec.regions.push_back(Mask::from_counts(rec.width, rec.height, counts));
      }
      s.images.push_back(std::move(rec));
    }
  } catch (const Json::exception& e) {
    fail(ErrorKind::kValidation, "selection file '" + path + "': " + e.what());
  }
  return s;
}

}  // namespace coseg::io
