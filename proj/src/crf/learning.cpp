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

#include "crf/learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace coseg::crf {

Vec gradient_from_moments(const Table& node, const Table& node_prime, const PairMoment& pair,
                          const PairMoment& pair_prime, const Observations& obs,
                          const SimilarityChannels& sim, bool pairwise) {
  const std::size_t n = obs.size(), k = node.cols();
  const std::size_t df = obs.appearance.cols(), dh = obs.interaction.cols();
  const std::size_t na = k * (df + 1), nh = k * (dh + 1);
  Vec g(na + nh + 4 * k, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      const double diff = node(i, c) - node_prime(i, c);
      double* row = g.data() + c * (df + 1);
      for (std::size_t d = 0; d < df; ++d) row[d] += obs.appearance(i, d) * diff;
      row[df] -= diff;
      row = g.data() + na + c * (dh + 1);
      for (std::size_t d = 0; d < dh; ++d) row[d] += obs.interaction(i, d) * diff;
      row[dh] -= diff;
    }
  }
  if (!pairwise) return g;

  double* pair_obj = g.data() + na + nh;
  double* pair_int = pair_obj + 2 * k;
  for (std::size_t c = 0; c < k; ++c) {
    double w_obj = 0.0, w_int = 0.0, bias = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double diff = pair(i, j, c) - pair_prime(i, j, c);
        w_obj += sim.object(i, j) * diff;
        w_int += sim.interaction(i, j) * diff;
        bias -= diff;
      }
    }
    pair_obj[2 * c] = w_obj;
    pair_obj[2 * c + 1] = bias;
    pair_int[2 * c] = w_int;
    pair_int[2 * c + 1] = bias;
  }
  return g;
}

Vec gradients(const MeanFieldState& state, const Observations& obs, const SimilarityChannels& sim,
              bool pairwise) {
  const Table& q = state.q;
  const Table& qp = state.q_prime;
  return gradient_from_moments(
      q, qp, [&](std::size_t i, std::size_t j, std::size_t c) { return q(i, c) * q(j, c); },
      [&](std::size_t i, std::size_t j, std::size_t c) { return qp(i, c) * qp(j, c); }, obs, sim,
      pairwise);
}

void project(EncoderParams& params, double epsilon_p) {
  const std::size_t df = params.appearance_dim(), dh = params.interaction_dim();
  for (std::size_t c = 0; c < params.clusters(); ++c) {
    params.appearance(c, df) = std::max(params.appearance(c, df), 0.0);
    for (std::size_t d = 0; d <= dh; ++d) {
      params.interaction(c, d) = std::max(params.interaction(c, d), 0.0);
    }
  }
  for (auto* channel : {&params.pair_object, &params.pair_interaction}) {
    for (PairwiseWeight& w : *channel) {
      w.weight = std::max(w.weight, epsilon_p);
      w.bias = std::max(w.bias, 0.0);
    }
  }
}

EncoderParams adagrad_step(const EncoderParams& params, std::span<const double> grad,
                           double reg_lambda, double epsilon_p, AdagradState& state) {
  Vec lambda = params.flatten();
  if (grad.size() != lambda.size() || state.accumulator.size() != lambda.size()) {
    fail(ErrorKind::kUsage, "gradient and parameter shapes differ");
  }
  for (std::size_t c = 0; c < lambda.size(); ++c) {
    const double g = grad[c] - reg_lambda * lambda[c];
    state.accumulator[c] += g * g;
    lambda[c] += state.learning_rate * g / std::sqrt(state.accumulator[c] + AdagradState::kStabilizer);
  }
  EncoderParams out = params;
  out.assign(lambda);
  project(out, epsilon_p);
  return out;
}

Vec global_variance(const Table& xhat, double variance_floor) {
  const std::size_t n = xhat.rows(), dim = xhat.cols();
  Vec mean(dim, 0.0), var(dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) mean[d] += xhat(i, d);
  }
  for (double& m : mean) m /= static_cast<double>(std::max<std::size_t>(n, 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t d = 0; d < dim; ++d) {
      const double diff = xhat(i, d) - mean[d];
      var[d] += diff * diff;
    }
  }
  for (double& v : var) v = std::max(v / static_cast<double>(std::max<std::size_t>(n, 1)), variance_floor);
  return var;
}

ReconstructionParams em_update(const Table& q, const Table& xhat, double variance_floor) {
  const std::size_t n = q.rows(), k = q.cols(), dim = xhat.cols();
  if (xhat.rows() != n) fail(ErrorKind::kUsage, "responsibility and target row counts differ");
  ReconstructionParams theta{Table(k, dim), Table(k, dim)};
  std::vector<bool> used(n, false);
  for (std::size_t c = 0; c < k; ++c) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) mass += q(i, c);
    if (mass < kEmptyClusterMass) {
      std::size_t pick = n;
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const auto row = q.row(i);
        const double top = *std::max_element(row.begin(), row.end());
        if (top < lowest) {
          lowest = top;
          pick = i;
        }
      }
      if (pick == n) pick = 0;
      used[pick] = true;
      const Vec var = global_variance(xhat, variance_floor);
      for (std::size_t d = 0; d < dim; ++d) {
        theta.means(c, d) = xhat(pick, d);
        theta.variances(c, d) = var[d];
      }
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < dim; ++d) theta.means(c, d) += q(i, c) * xhat(i, d);
    }
    for (std::size_t d = 0; d < dim; ++d) theta.means(c, d) /= mass;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = xhat(i, d) - theta.means(c, d);
        theta.variances(c, d) += q(i, c) * diff * diff;
      }
    }
    for (std::size_t d = 0; d < dim; ++d) {
      theta.variances(c, d) = std::max(theta.variances(c, d) / mass, variance_floor);
    }
  }
  return theta;
}

}  // namespace coseg::crf
