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
#include <vector>

#include "core/table.hpp"
#include "core/types.hpp"

namespace coseg::oracle {

// Largest K^N the enumerator accepts.
inline constexpr double kMaxAssignments = 1e7;

struct ExactResult {
  double log_z = 0.0;
  double log_z_prime = 0.0;
  Table marginals;        // N x K under P(Y) with reconstruction
  Table marginals_prime;  // N x K under P'(Y)
  // Same-cluster pair marginals P(y_i = k, y_j = k), one N x N table per k.
  // Filled only when requested.
  std::vector<Table> pair_same;
  std::vector<Table> pair_same_prime;
};

struct EnumerateOptions {
  bool pairwise = true;
  bool pair_moments = false;
};

// Exhaustive sum over all K^N assignments in mixed-radix order (node 0 is
// the fastest digit) with incremental energy updates. Throws kUsage when
// K^N exceeds kMaxAssignments.
ExactResult enumerate_exact(const EncoderParams& params, const ReconstructionParams& theta,
                            const Observations& obs, const SimilarityChannels& sim,
                            EnumerateOptions options = {});

// Exact log Z - log Z'.
double exact_objective(const EncoderParams& params, const ReconstructionParams& theta,
                       const Observations& obs, const SimilarityChannels& sim);

// Central difference of exact_objective along one flat encoder coordinate.
double exact_objective_fd(const EncoderParams& params, const ReconstructionParams& theta,
                          const Observations& obs, const SimilarityChannels& sim,
                          std::size_t coordinate, double step);

// Exact gradient of log Z - log Z' from exact node and pair marginals.
Vec exact_gradient(const ExactResult& exact, const Observations& obs,
                   const SimilarityChannels& sim);

// A small random model instance for oracle comparisons.
struct Instance {
  EncoderParams params;
  ReconstructionParams theta;
  Observations obs;
  SimilarityChannels sim;
};

struct InstanceSpec {
  std::size_t n = 5;
  std::size_t k = 2;
  std::size_t d_f = 3;
  std::size_t d_h = 2;
  // Upper bound on |pair_score(i, j, k)| over all pairs and clusters.
  double max_coupling = 0.1;
  double epsilon_p = 1e-4;
  std::uint64_t seed = 0;
};

// Random features, a feasible random encoder, and random Gaussians. The
// pairwise weights and biases are scaled so every pair score stays within
// max_coupling in absolute value.
Instance make_instance(const InstanceSpec& spec);

// max |pair_score| over all pairs and clusters.
double max_pair_coupling(const Instance& inst);

}  // namespace coseg::oracle
