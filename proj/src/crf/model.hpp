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
#include <span>

#include "core/table.hpp"
#include "core/types.hpp"

namespace coseg::crf {

// unary(i, k) = w_uo(k).f_i - b_uo(k) + w_uh(k).h_i - b_uh(k).
Table unary_scores(const EncoderParams& params, const Observations& obs);

// Diagonal-covariance Gaussian log density of `xhat` under cluster k.
double log_gaussian(std::span<const double> xhat, std::size_t k, const ReconstructionParams& theta);

// N x K table of log_gaussian over the rows of `xhat`.
Table log_gaussian_table(const Table& xhat, const ReconstructionParams& theta);

// Same-cluster pair score for nodes i and j in cluster k:
// w_po(k) S_obj(i,j) - b_po(k) + w_ph(k) S_int(i,j) - b_ph(k).
inline double pair_score(const EncoderParams& params, const SimilarityChannels& sim,
                         std::size_t i, std::size_t j, std::size_t k) {
  const PairwiseWeight& o = params.pair_object[k];
  const PairwiseWeight& h = params.pair_interaction[k];
  return o.weight * sim.object(i, j) - o.bias + h.weight * sim.interaction(i, j) - h.bias;
}

// Energy of a full assignment; pairs are summed once (i < j). With
// `pairwise` false only the unary terms contribute.
double energy(const EncoderParams& params, std::span<const std::size_t> assignment,
              const Observations& obs, const SimilarityChannels& sim, bool pairwise = true);

// Checks that params, observations, and similarity tables agree in shape.
void check_shapes(const EncoderParams& params, const Observations& obs,
                  const SimilarityChannels& sim);

}  // namespace coseg::crf
