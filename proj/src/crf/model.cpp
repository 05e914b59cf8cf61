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

#include "crf/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace coseg::crf {

Table unary_scores(const EncoderParams& params, const Observations& obs) {
  const std::size_t n = obs.size(), k = params.clusters();
  const std::size_t df = params.appearance_dim(), dh = params.interaction_dim();
  Table u(n, k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0.0;
      for (std::size_t d = 0; d < df; ++d) s += params.appearance(c, d) * obs.appearance(i, d);
      s -= params.appearance(c, df);
      for (std::size_t d = 0; d < dh; ++d) s += params.interaction(c, d) * obs.interaction(i, d);
      s -= params.interaction(c, dh);
      u(i, c) = s;
    }
  }
  return u;
}

double log_gaussian(std::span<const double> xhat, std::size_t k, const ReconstructionParams& theta) {
  static const double kLog2Pi = std::log(2.0 * std::numbers::pi);
  double s = 0.0;
  for (std::size_t d = 0; d < xhat.size(); ++d) {
    const double var = theta.variances(k, d);
    const double diff = xhat[d] - theta.means(k, d);
    s += -0.5 * (kLog2Pi + std::log(var)) - diff * diff / (2.0 * var);
  }
  return s;
}

Table log_gaussian_table(const Table& xhat, const ReconstructionParams& theta) {
  if (xhat.cols() != theta.dim()) {
    fail(ErrorKind::kValidation, "reconstruction target dimension differs from the model");
  }
  Table out(xhat.rows(), theta.clusters());
  for (std::size_t i = 0; i < xhat.rows(); ++i) {
    for (std::size_t k = 0; k < theta.clusters(); ++k) out(i, k) = log_gaussian(xhat.row(i), k, theta);
  }
  return out;
}

double energy(const EncoderParams& params, std::span<const std::size_t> assignment,
              const Observations& obs, const SimilarityChannels& sim, bool pairwise) {
  const std::size_t n = obs.size(), k = params.clusters();
  if (assignment.size() != n) fail(ErrorKind::kUsage, "assignment length differs from N");
  for (std::size_t i = 0; i < n; ++i) {
    if (assignment[i] >= k) {
      fail(ErrorKind::kUsage, "assignment of node " + std::to_string(i) + " is out of range");
    }
  }
  const Table u = unary_scores(params, obs);
  double e = 0.0;
  for (std::size_t i = 0; i < n; ++i) e += u(i, assignment[i]);
  if (!pairwise) return e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (assignment[i] == assignment[j]) e += pair_score(params, sim, i, j, assignment[i]);
    }
  }
  return e;
}

void check_shapes(const EncoderParams& params, const Observations& obs,
                  const SimilarityChannels& sim) {
  const std::size_t n = obs.size();
  if (params.appearance_dim() != obs.appearance.cols() ||
      params.interaction_dim() != obs.interaction.cols()) {
    fail(ErrorKind::kValidation, "feature dimensions differ from the encoder parameters");
  }
  if (sim.object.rows() != n || sim.object.cols() != n || sim.interaction.rows() != n ||
      sim.interaction.cols() != n) {
    fail(ErrorKind::kValidation, "similarity tables do not match the proposal count");
  }
}

}  // namespace coseg::crf
