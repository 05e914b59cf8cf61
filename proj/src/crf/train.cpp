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

#include "crf/train.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <string>

#include "core/error.hpp"
#include "crf/learning.hpp"
#include "hoi/similarity.hpp"

namespace coseg::crf {
namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      hash_ ^= p[i];
      hash_ *= 1099511628211ull;
    }
  }
  void text(const std::string& s) {
    const std::uint64_t n = s.size();
    bytes(&n, sizeof n);
    bytes(s.data(), s.size());
  }
  void values(const Vec& v) {
    const std::uint64_t n = v.size();
    bytes(&n, sizeof n);
    bytes(v.data(), v.size() * sizeof(double));
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 14695981039346656037ull;
};

}  // namespace

std::uint64_t dataset_fingerprint(const Dataset& dataset) {
  Fnv1a h;
  for (const auto& img : dataset.images) {
    h.text(img.image_id);
    for (const auto& p : img.proposals) {
      h.text(p.proposal_id);
      h.values(p.appearance);
      h.values(p.interaction);
    }
  }
  return h.value();
}

ReconstructionParams initial_reconstruction(const Table& xhat, std::size_t k, std::uint64_t seed,
                                            double variance_floor) {
  const std::size_t n = xhat.rows(), dim = xhat.cols();
  if (n < k) fail(ErrorKind::kUsage, "seeding needs at least K points");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> centers{static_cast<std::size_t>(rng() % n)};
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    const std::size_t last = centers.back();
    std::size_t pick = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double diff = xhat(i, d) - xhat(last, d);
        d2 += diff * diff;
      }
      nearest[i] = std::min(nearest[i], d2);
      if (nearest[i] > best) {
        best = nearest[i];
        pick = i;
      }
    }
    centers.push_back(pick);
  }
  const Vec var = global_variance(xhat, variance_floor);
  ReconstructionParams theta{Table(k, dim), Table(k, dim)};
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t d = 0; d < dim; ++d) {
      theta.means(c, d) = xhat(centers[c], d);
      theta.variances(c, d) = var[d];
    }
  }
  return theta;
}

double regularizer(const EncoderParams& params, double reg_lambda) {
  double s = 0.0;
  for (double v : params.flatten()) s += v * v;
  return -0.5 * reg_lambda * s;
}

TrainedModel train(const Dataset& dataset, const TrainConfig& config, ExecPolicy policy,
                   const IterationObserver& observer) {
  check_config(config);
  const Observations obs = Observations::from_dataset(dataset);
  const std::size_t n = obs.size();
  if (n < config.k) {
    fail(ErrorKind::kUsage, "K = " + std::to_string(config.k) + " exceeds the proposal count N = " +
                                std::to_string(n));
  }

  TrainedModel model;
  model.config = config;
  model.dataset_fingerprint = dataset_fingerprint(dataset);
  model.delta_f = config.delta_f ? *config.delta_f
                                 : (n >= 2 ? hoi::estimate_bandwidth(obs.appearance) : 1.0);
  model.delta_h = config.delta_h ? *config.delta_h
                                 : (n >= 2 ? hoi::estimate_bandwidth(obs.interaction) : 1.0);
  const SimilarityChannels sim = hoi::build_similarity(obs, model.delta_f, model.delta_h, policy);
  const Table xhat = obs.reconstruction_targets();

  model.encoder = EncoderParams::initial(config.k, obs.appearance.cols(), obs.interaction.cols(),
                                         config.epsilon_p);
  model.reconstruction = initial_reconstruction(xhat, config.k, config.seed, config.variance_floor);
  AdagradState adagrad(model.encoder.coordinate_count(), config.learning_rate);
  const MeanFieldOptions mf{config.mf_max_sweeps, config.mf_tol, config.use_pairwise};

  double previous = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t it = 0; it < config.outer_iters; ++it) {
    const auto started = std::chrono::steady_clock::now();
    const MeanFieldState state = mean_field(model.encoder, model.reconstruction, obs, sim, mf, policy);
    const FreeEnergy fe =
        free_energy(state, model.encoder, model.reconstruction, obs, sim, config.use_pairwise);

    IterationRecord rec;
    rec.iteration = it;
    rec.log_z = fe.log_z;
    rec.log_z_prime = fe.log_z_prime;
    rec.objective = fe.log_z - fe.log_z_prime + regularizer(model.encoder, config.reg_lambda);
    rec.sweeps = state.sweeps;
    rec.delta_history = state.delta_history;
    rec.max_delta_q = state.delta_history.empty() ? 0.0 : state.delta_history.back();
    if (!std::isfinite(rec.objective)) {
      fail(ErrorKind::kNumerical, "training objective became non-finite at iteration " +
                                      std::to_string(it));
    }

    if (config.learn_encoder) {
      const Vec grad = gradients(state, obs, sim, config.use_pairwise);
      model.encoder =
          adagrad_step(model.encoder, grad, config.reg_lambda, config.epsilon_p, adagrad);
    }
    model.reconstruction = em_update(state.q, xhat, config.variance_floor);

    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (observer) observer(rec, state, model.encoder, model.reconstruction);
    model.trace.push_back(std::move(rec));

    const double objective = model.trace.back().objective;
    if (it > 0 && std::abs(objective - previous) < config.convergence_rtol * std::abs(objective)) {
      break;
    }
    previous = objective;
  }

  model.final_state = mean_field(model.encoder, model.reconstruction, obs, sim, mf, policy);
  return model;
}

}  // namespace coseg::crf
