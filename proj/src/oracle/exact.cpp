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

#include "oracle/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "core/error.hpp"
#include "crf/learning.hpp"
#include "crf/model.hpp"
#include "hoi/similarity.hpp"

namespace coseg::oracle {
namespace {

// Visits every assignment in mixed-radix order and calls
// visit(assignment, energy, log_reconstruction).
template <typename Visit>
void for_each_assignment(const Table& unary, const Table& recon, const EncoderParams& params,
                         const SimilarityChannels& sim, bool pairwise, Visit&& visit) {
  const std::size_t n = unary.rows(), k = unary.cols();
  std::vector<std::size_t> y(n, 0);
  // Energy and reconstruction of the all-zeros assignment.
  double e = 0.0, r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    e += unary(i, 0);
    r += recon(i, 0);
  }
  if (pairwise) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) e += crf::pair_score(params, sim, i, j, 0);
    }
  }
  // Change in energy when node i moves from cluster a to cluster b.
  auto move = [&](std::size_t i, std::size_t a, std::size_t b) {
    double d = unary(i, b) - unary(i, a);
    if (pairwise) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        if (y[j] == a) d -= crf::pair_score(params, sim, i, j, a);
        if (y[j] == b) d += crf::pair_score(params, sim, i, j, b);
      }
    }
    return d;
  };
  while (true) {
    visit(std::as_const(y), e, r);
    std::size_t i = 0;
    while (i < n) {
      const std::size_t a = y[i];
      const std::size_t b = (a + 1) % k;
      e += move(i, a, b);
      r += recon(i, b) - recon(i, a);
      y[i] = b;
      if (b != 0) break;
      ++i;
    }
    if (i == n) break;
  }
}

void check_size(std::size_t n, std::size_t k) {
  if (std::pow(static_cast<double>(k), static_cast<double>(n)) > kMaxAssignments) {
    fail(ErrorKind::kUsage, "instance too large for exact enumeration");
  }
}

}  // namespace

ExactResult enumerate_exact(const EncoderParams& params, const ReconstructionParams& theta,
                            const Observations& obs, const SimilarityChannels& sim,
                            EnumerateOptions options) {
  crf::check_shapes(params, obs, sim);
  const std::size_t n = obs.size(), k = params.clusters();
  if (n == 0) fail(ErrorKind::kUsage, "enumeration needs at least one node");
  check_size(n, k);
  const Table unary = crf::unary_scores(params, obs);
  const Table recon = crf::log_gaussian_table(obs.reconstruction_targets(), theta);

  // Two passes: the first finds the log-sum-exp shifts.
  double top = -std::numeric_limits<double>::infinity();
  double top_prime = top;
  for_each_assignment(unary, recon, params, sim, options.pairwise,
                      [&](const std::vector<std::size_t>&, double e, double r) {
                        top = std::max(top, e + r);
                        top_prime = std::max(top_prime, e);
                      });

  ExactResult out;
  out.marginals = Table(n, k);
  out.marginals_prime = Table(n, k);
  if (options.pair_moments) {
    out.pair_same.assign(k, Table(n, n));
    out.pair_same_prime.assign(k, Table(n, n));
  }
  double z = 0.0, zp = 0.0;
  for_each_assignment(unary, recon, params, sim, options.pairwise,
                      [&](const std::vector<std::size_t>& y, double e, double r) {
                        const double w = std::exp(e + r - top);
                        const double wp = std::exp(e - top_prime);
                        z += w;
                        zp += wp;
                        for (std::size_t i = 0; i < n; ++i) {
                          out.marginals(i, y[i]) += w;
                          out.marginals_prime(i, y[i]) += wp;
                        }
                        if (!options.pair_moments) return;
                        for (std::size_t i = 0; i < n; ++i) {
                          for (std::size_t j = i + 1; j < n; ++j) {
                            if (y[i] != y[j]) continue;
                            out.pair_same[y[i]](i, j) += w;
                            out.pair_same_prime[y[i]](i, j) += wp;
                          }
                        }
                      });
  for (double& v : out.marginals.data()) v /= z;
  for (double& v : out.marginals_prime.data()) v /= zp;
  for (std::size_t c = 0; c < out.pair_same.size(); ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        out.pair_same[c](i, j) /= z;
        out.pair_same_prime[c](i, j) /= zp;
        out.pair_same[c](j, i) = out.pair_same[c](i, j);
        out.pair_same_prime[c](j, i) = out.pair_same_prime[c](i, j);
      }
    }
  }
  out.log_z = top + std::log(z);
  out.log_z_prime = top_prime + std::log(zp);
  return out;
}

double exact_objective(const EncoderParams& params, const ReconstructionParams& theta,
                       const Observations& obs, const SimilarityChannels& sim) {
  const ExactResult r = enumerate_exact(params, theta, obs, sim);
  return r.log_z - r.log_z_prime;
}

double exact_objective_fd(const EncoderParams& params, const ReconstructionParams& theta,
                          const Observations& obs, const SimilarityChannels& sim,
                          std::size_t coordinate, double step) {
  Vec flat = params.flatten();
  if (coordinate >= flat.size()) fail(ErrorKind::kUsage, "encoder coordinate out of range");
  const double base = flat[coordinate];
  EncoderParams p = params;
  flat[coordinate] = base + step;
  p.assign(flat);
  const double up = exact_objective(p, theta, obs, sim);
  flat[coordinate] = base - step;
  p.assign(flat);
  const double down = exact_objective(p, theta, obs, sim);
  return (up - down) / (2.0 * step);
}

Vec exact_gradient(const ExactResult& exact, const Observations& obs,
                   const SimilarityChannels& sim) {
  if (exact.pair_same.empty()) {
    fail(ErrorKind::kUsage, "exact gradient needs pair moments from enumerate_exact");
  }
  return crf::gradient_from_moments(
      exact.marginals, exact.marginals_prime,
      [&](std::size_t i, std::size_t j, std::size_t c) { return exact.pair_same[c](i, j); },
      [&](std::size_t i, std::size_t j, std::size_t c) { return exact.pair_same_prime[c](i, j); },
      obs, sim);
}

Instance make_instance(const InstanceSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  Instance inst;
  inst.obs = Observations{Table(spec.n, spec.d_f), Table(spec.n, spec.d_h)};
  for (double& v : inst.obs.appearance.data()) v = normal(rng);
  for (double& v : inst.obs.interaction.data()) v = unit(rng) / static_cast<double>(spec.d_h + 1);

  inst.params = EncoderParams::initial(spec.k, spec.d_f, spec.d_h, spec.epsilon_p);
  for (std::size_t c = 0; c < spec.k; ++c) {
    for (std::size_t d = 0; d < spec.d_f; ++d) inst.params.appearance(c, d) = 0.5 * normal(rng);
    inst.params.appearance(c, spec.d_f) = 0.3 * unit(rng);
    for (std::size_t d = 0; d <= spec.d_h; ++d) inst.params.interaction(c, d) = 0.5 * unit(rng);
  }
  // Pair score |w_o S_o + w_h S_h - b_o - b_h| <= w_o + w_h + b_o + b_h, so
  // splitting max_coupling four ways bounds it.
  const double quarter = spec.max_coupling / 4.0;
  for (std::size_t c = 0; c < spec.k; ++c) {
    inst.params.pair_object[c] = {spec.epsilon_p + (quarter - spec.epsilon_p) * unit(rng),
                                  quarter * unit(rng)};
    inst.params.pair_interaction[c] = {spec.epsilon_p + (quarter - spec.epsilon_p) * unit(rng),
                                       quarter * unit(rng)};
  }

  const std::size_t dx = spec.d_f + spec.d_h;
  inst.theta = ReconstructionParams{Table(spec.k, dx), Table(spec.k, dx)};
  for (double& v : inst.theta.means.data()) v = 0.5 * normal(rng);
  for (double& v : inst.theta.variances.data()) v = 0.5 + unit(rng);

  const double delta_f = spec.n >= 2 ? hoi::estimate_bandwidth(inst.obs.appearance) : 1.0;
  const double delta_h = spec.n >= 2 ? hoi::estimate_bandwidth(inst.obs.interaction) : 1.0;
  inst.sim = hoi::build_similarity(inst.obs, delta_f, delta_h);
  return inst;
}

double max_pair_coupling(const Instance& inst) {
  double m = 0.0;
  const std::size_t n = inst.obs.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t c = 0; c < inst.params.clusters(); ++c) {
        m = std::max(m, std::abs(crf::pair_score(inst.params, inst.sim, i, j, c)));
      }
    }
  }
  return m;
}

}  // namespace coseg::oracle
