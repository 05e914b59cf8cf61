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

#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "core/types.hpp"

namespace coseg::io {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// A dataset manifest: one ImageRecord per line, optionally preceded by a
// {"meta": {...}} line describing how the file was produced.
struct Manifest {
  Json meta = Json::object();
  Dataset dataset;
};

Json to_json(const Rect& r);
Rect rect_from_json(const Json& j);
Json to_json(const ImageRecord& img);
ImageRecord image_from_json(const Json& j);
Json to_json(const TrainConfig& c);
TrainConfig config_from_json(const Json& j);
Json to_json(const EncoderParams& p);
EncoderParams encoder_from_json(const Json& j);
Json to_json(const ReconstructionParams& p);
ReconstructionParams reconstruction_from_json(const Json& j);
Json to_json(const Table& t);
Table table_from_json(const Json& j);

Manifest read_manifest(std::istream& in);
Manifest read_manifest(const std::string& path);
void write_manifest(std::ostream& out, const Manifest& manifest);
void write_manifest(const std::string& path, const Manifest& manifest);

// Writes to a sibling temporary file and renames it into place, so a failed
// write never leaves a truncated file behind.
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace coseg::io
