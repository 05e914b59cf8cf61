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

#include <string>
#include <vector>

#include "core/types.hpp"
#include "crf/inference.hpp"
#include "crf/train.hpp"
#include "io/manifest.hpp"

namespace coseg::io {

// Model document: format_version, config, resolved bandwidths, encoder and
// reconstruction parameters, final marginals, and the iteration trace
// (without wall times, so identical runs give identical files).
Json model_to_json(const crf::TrainedModel& model);
crf::TrainedModel model_from_json(const Json& j);
void save_model(const std::string& path, const crf::TrainedModel& model);
crf::TrainedModel load_model(const std::string& path);

// One JSON record per outer iteration.
Json iteration_to_json(const crf::IterationRecord& rec, bool with_wall_time);
std::string progress_log(const std::vector<crf::IterationRecord>& trace);

struct ProposalKey {
  std::string image_id;
  std::string proposal_id;
  friend bool operator==(const ProposalKey&, const ProposalKey&) = default;
};

// Per-proposal distribution file: a {"meta": ...} line, then one record
// per proposal with its Q row and argmax cluster.
struct Distributions {
  Json meta = Json::object();
  std::vector<ProposalKey> keys;
  Table q;
};

std::string distributions_to_string(const Dataset& dataset, const Table& q, const Json& meta);
Distributions read_distributions(const std::string& path);

// Selected-foreground file: a {"meta": ...} line, then one record per image
// with the frame size and, per cluster, the selected proposal ids, their
// confidences, and the region as run-length counts.
struct SelectionRecord {
  std::string image_id;
  std::int64_t width = 0;
  std::int64_t height = 0;
  std::vector<std::vector<std::string>> proposal_ids;  // per cluster
  std::vector<std::vector<double>> confidence;         // per cluster
  std::vector<Mask> regions;                           // per cluster
};

struct Selections {
  Json meta = Json::object();
  std::vector<SelectionRecord> images;
};

Selections make_selections(const Dataset& dataset, const std::vector<crf::ImageSelection>& sel,
                           const Json& meta);
std::string selections_to_string(const Selections& s);
Selections read_selections(const std::string& path);

}  // namespace coseg::io
