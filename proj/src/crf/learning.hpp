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
#include <functional>
#include <span>
#include <vector>

#include "core/table.hpp"
#include "core/types.hpp"
#include "crf/mean_field.hpp"

namespace coseg::crf {

// Same-cluster pair probability P(y_i = k, y_j = k) for one chain.
using PairMoment = std::function<double(std::size_t i, std::size_t j, std::size_t k)>;

// Gradient of (log Z - log Z') in EncoderParams::flatten() order, given the
// node and same-cluster pair moments of both chains. Unary blocks use the
// augmented features, so bias coordinates get -sum(node - node_prime).
// Pairwise coordinates sum over i < j, matching the energy. With `pairwise`
// false those coordinates are zero.
Vec gradient_from_moments(const Table& node, const Table& node_prime, const PairMoment& pair,
                          const PairMoment& pair_prime, const Observations& obs,
                          const SimilarityChannels& sim, bool pairwise = true);

// Mean-field gradient: pair moments factorize as Q_i(k) Q_j(k).
Vec gradients(const MeanFieldState& state, const Observations& obs, const SimilarityChannels& sim,
              bool pairwise = true);

struct AdagradState {
  static constexpr double kStabilizer = 1e-8;
  Vec accumulator;  // sum of squared regularized gradients, per coordinate
  double learning_rate = 0.05;

  AdagradState(std::size_t coordinates, double rate)
      : accumulator(coordinates, 0.0), learning_rate(rate) {}
};

// Projects onto the feasible set: interaction weights >= 0, pairwise
// weights >= epsilon_p, every bias >= 0.
void project(EncoderParams& params, double epsilon_p);

// One projected Adagrad ascent step on (log Z - log Z') - reg/2 |lambda|^2.
EncoderParams adagrad_step(const EncoderParams& params, std::span<const double> grad,
                           double reg_lambda, double epsilon_p, AdagradState& state);

// Clusters whose responsibility mass falls below this are revived.
inline constexpr double kEmptyClusterMass = 1e-12;

// Weighted means and diagonal variances of the rows of `xhat`. An empty
// cluster is re-seeded at the point with the lowest maximum responsibility
// (lowest index on ties, each point used once) with the global variance.
ReconstructionParams em_update(const Table& q, const Table& xhat, double variance_floor);

// Per-dimension population variance of the rows of `xhat`, floored.
Vec global_variance(const Table& xhat, double variance_floor);

}  // namespace coseg::crf
