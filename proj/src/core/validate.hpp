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

#include <cstddef>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace coseg {

struct Violation {
  std::string image_id;
  std::string proposal_id;  // empty for image-level violations
  std::string rule;
  std::string detail;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationOptions {
  // Interaction block length for the per-block sum rule. Zero picks one
  // from D_h: 15 when it divides D_h (3D cylinder bins), otherwise the
  // whole vector is one block (2D grid).
  std::size_t interaction_block = 0;
};

// Checks every dataset invariant; never throws on parseable input.
std::vector<Violation> validate_dataset(const Dataset& dataset, ValidationOptions options = {});

}  // namespace coseg
