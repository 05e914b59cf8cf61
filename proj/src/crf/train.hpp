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
#include <functional>
#include <vector>

#include "core/parallel.hpp"
#include "core/types.hpp"
#include "crf/mean_field.hpp"

namespace coseg::crf {

// One record per outer iteration, taken after mean field and before the
// parameter updates of that iteration.
struct IterationRecord {
  std::size_t iteration = 0;
  double log_z = 0.0;
  double log_z_prime = 0.0;
  double objective = 0.0;  // log Z - log Z' - reg/2 |lambda|^2
  double max_delta_q = 0.0;
  std::size_t sweeps = 0;
  std::vector<double> delta_history;
  double wall_seconds = 0.0;
};

struct TrainedModel {
  EncoderParams encoder;
  ReconstructionParams reconstruction;
  TrainConfig config;
  double delta_f = 1.0;  // resolved bandwidths
  double delta_h = 1.0;
  // Mean field under the final parameters on the training set.
  MeanFieldState final_state;
  std::vector<IterationRecord> trace;
  std::uint64_t dataset_fingerprint = 0;
};

// Called once per outer iteration with the record, the mean-field state
// used for the updates, and the parameters after the updates.
using IterationObserver =
    std::function<void(const IterationRecord&, const MeanFieldState&, const EncoderParams&,
                       const ReconstructionParams&)>;

// Greedy max-min seeding: the first center is drawn with `seed`, each next
// one is the point farthest from the chosen set (lowest index on ties).
// Variances start at the global per-dimension variance.
ReconstructionParams initial_reconstruction(const Table& xhat, std::size_t k, std::uint64_t seed,
                                            double variance_floor);

// FNV-1a over proposal ids and feature bytes; identifies a training set.
std::uint64_t dataset_fingerprint(const Dataset& dataset);

double regularizer(const EncoderParams& params, double reg_lambda);

TrainedModel train(const Dataset& dataset, const TrainConfig& config, ExecPolicy policy = {},
                   const IterationObserver& observer = {});

}  // namespace coseg::crf
