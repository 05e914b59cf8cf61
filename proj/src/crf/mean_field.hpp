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
#include <vector>

#include "core/parallel.hpp"
#include "core/table.hpp"
#include "core/types.hpp"

namespace coseg::crf {

struct MeanFieldOptions {
  std::size_t max_sweeps = 20;
  double tol = 1e-4;
  bool pairwise = true;
};

// Factorized marginals of the two chains: q includes the reconstruction
// term, q_prime is the encoder alone.
struct MeanFieldState {
  Table q;        // N x K
  Table q_prime;  // N x K
  std::size_t sweeps = 0;
  bool converged = false;
  // max |dQ| over both tables, one entry per sweep.
  std::vector<double> delta_history;

  // First sweep (1-based) whose change fell below `threshold`; 0 if none.
  std::size_t sweeps_to_reach(double threshold) const;
};

// Max-shifted softmax of `scores`, written into `out`.
void softmax_row(std::span<const double> scores, std::span<double> out);

// Synchronous (Jacobi) mean-field iteration for both chains. Every sweep
// reads only the previous sweep's tables.
MeanFieldState mean_field(const EncoderParams& params, const ReconstructionParams& theta,
                          const Observations& obs, const SimilarityChannels& sim,
                          const MeanFieldOptions& options, ExecPolicy policy = {});

// Mean-field lower bounds on log Z and log Z'.
struct FreeEnergy {
  double log_z = 0.0;
  double log_z_prime = 0.0;
};

FreeEnergy free_energy(const MeanFieldState& state, const EncoderParams& params,
                       const ReconstructionParams& theta, const Observations& obs,
                       const SimilarityChannels& sim, bool pairwise = true);

}  // namespace coseg::crf
