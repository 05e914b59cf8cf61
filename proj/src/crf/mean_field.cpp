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

#include "crf/mean_field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"
#include "crf/model.hpp"

namespace coseg::crf {
namespace {

constexpr double kProbabilityFloor = 1e-300;

struct Messages {
  Table q;
  Table q_prime;
};

// Pairwise message of node i in cluster k for one chain:
// sum_{j != i} pair_score(i, j, k) * table(j, k).
void accumulate_messages(const EncoderParams& params, const SimilarityChannels& sim,
                         const Table& q, const Table& q_prime, std::size_t i, Messages& out) {
  const std::size_t n = q.rows(), k = q.cols();
  for (std::size_t c = 0; c < k; ++c) {
    const PairwiseWeight& o = params.pair_object[c];
    const PairwiseWeight& h = params.pair_interaction[c];
    double so = 0.0, sh = 0.0, mass = 0.0;
    double so_p = 0.0, sh_p = 0.0, mass_p = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double a = sim.object(i, j), b = sim.interaction(i, j);
      const double qj = q(j, c), qpj = q_prime(j, c);
      so += a * qj;
      sh += b * qj;
      mass += qj;
      so_p += a * qpj;
      sh_p += b * qpj;
      mass_p += qpj;
    }
    out.q(i, c) = o.weight * so + h.weight * sh - (o.bias + h.bias) * mass;
    out.q_prime(i, c) = o.weight * so_p + h.weight * sh_p - (o.bias + h.bias) * mass_p;
  }
}

void check_row(std::span<const double> row, std::size_t node) {
  for (double v : row) {
    if (!std::isfinite(v)) {
      fail(ErrorKind::kNumerical, "mean field produced a non-finite value at node " + std::to_string(node));
    }
  }
}

}  // namespace

std::size_t MeanFieldState::sweeps_to_reach(double threshold) const {
  for (std::size_t s = 0; s < delta_history.size(); ++s) {
    if (delta_history[s] < threshold) return s + 1;
  }
  return 0;
}

void softmax_row(std::span<const double> scores, std::span<double> out) {
  const double top = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    out[c] = std::exp(scores[c] - top);
    z += out[c];
  }
  for (double& v : out) v /= z;
}

MeanFieldState mean_field(const EncoderParams& params, const ReconstructionParams& theta,
                          const Observations& obs, const SimilarityChannels& sim,
                          const MeanFieldOptions& options, ExecPolicy policy) {
  check_shapes(params, obs, sim);
  const std::size_t n = obs.size(), k = params.clusters();
  if (n == 0) fail(ErrorKind::kUsage, "mean field needs at least one proposal");
  if (theta.clusters() != k) fail(ErrorKind::kValidation, "reconstruction and encoder cluster counts differ");

  const Table unary = unary_scores(params, obs);
  const Table recon = log_gaussian_table(obs.reconstruction_targets(), theta);

  MeanFieldState state{Table(n, k), Table(n, k)};
  std::vector<double> scores(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) scores[c] = unary(i, c) + recon(i, c);
    check_row(scores, i);
    softmax_row(scores, state.q.row(i));
    check_row(unary.row(i), i);
    softmax_row(unary.row(i), state.q_prime.row(i));
  }
  if (!options.pairwise || n == 1) {
    state.converged = true;
    return state;
  }

  Messages msg{Table(n, k), Table(n, k)};
  Table next_q(n, k), next_qp(n, k);
  std::vector<double> row_delta(n);
  for (std::size_t sweep = 0; sweep < options.max_sweeps; ++sweep) {
    parallel_for(n, policy, [&](std::size_t begin, std::size_t end) {
      std::vector<double> s(k), sp(k);
      for (std::size_t i = begin; i < end; ++i) {
        accumulate_messages(params, sim, state.q, state.q_prime, i, msg);
        for (std::size_t c = 0; c < k; ++c) {
          s[c] = unary(i, c) + msg.q(i, c) + recon(i, c);
          sp[c] = unary(i, c) + msg.q_prime(i, c);
        }
        check_row(s, i);
        check_row(sp, i);
        softmax_row(s, next_q.row(i));
        softmax_row(sp, next_qp.row(i));
        double d = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
          d = std::max(d, std::abs(next_q(i, c) - state.q(i, c)));
          d = std::max(d, std::abs(next_qp(i, c) - state.q_prime(i, c)));
        }
        row_delta[i] = d;
      }
    });
    std::swap(state.q, next_q);
    std::swap(state.q_prime, next_qp);
    ++state.sweeps;
    const double delta = *std::max_element(row_delta.begin(), row_delta.end());
    state.delta_history.push_back(delta);
    if (delta < options.tol) {
      state.converged = true;
      break;
    }
  }
  return state;
}

namespace {

double entropy(const Table& q) {
  double h = 0.0;
  for (double v : q.data()) h -= v * std::log(std::max(v, kProbabilityFloor));
  return h;
}

}  // namespace

FreeEnergy free_energy(const MeanFieldState& state, const EncoderParams& params,
                       const ReconstructionParams& theta, const Observations& obs,
                       const SimilarityChannels& sim, bool pairwise) {
  const std::size_t n = obs.size(), k = params.clusters();
  const Table unary = unary_scores(params, obs);
  const Table recon = log_gaussian_table(obs.reconstruction_targets(), theta);

  double ez = 0.0, ezp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) {
      ez += state.q(i, c) * (unary(i, c) + recon(i, c));
      ezp += state.q_prime(i, c) * unary(i, c);
    }
  }
  if (pairwise) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        for (std::size_t c = 0; c < k; ++c) {
          const double w = pair_score(params, sim, i, j, c);
          ez += state.q(i, c) * state.q(j, c) * w;
          ezp += state.q_prime(i, c) * state.q_prime(j, c) * w;
        }
      }
    }
  }
  return {ez + entropy(state.q), ezp + entropy(state.q_prime)};
}

}  // namespace coseg::crf
