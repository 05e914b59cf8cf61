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
#include <string>
#include <vector>

#include "core/types.hpp"

namespace coseg {

// Tiles a width x height image with rows x cols boxes; remainder pixels go
// to the later rows/columns so box sizes differ by at most one. Features are
// left empty. Proposal ids are "g<row>_<col>".
std::vector<ProposalRecord> make_grid_proposals(const std::string& image_id, std::int64_t width,
                                                std::int64_t height, int rows, int cols);

}  // namespace coseg
