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
#include <cstdint>
#include <string>
#include <vector>

namespace coseg::oracle {

struct CheckResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;      // worst observed error
  double tolerance = 0.0;  // threshold it was compared against
  std::size_t instances = 0;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t instances = 10;
};

// Oracle agreement on generated small instances: mean-field marginals vs
// exact marginals under weak coupling, the gradient formula on exact
// moments vs finite differences of exact log Z - log Z', and single-node
// exactness of mean field and free energy.
std::vector<CheckResult> run_verification(const VerifyOptions& options);

}  // namespace coseg::oracle
