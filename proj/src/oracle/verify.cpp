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

#include "oracle/verify.hpp"

#include <algorithm>
#include <cmath>

#include "crf/learning.hpp"
#include "crf/mean_field.hpp"
#include "crf/model.hpp"
#include "oracle/exact.hpp"

namespace coseg::oracle {
namespace {

double linf(const Table& a, const Table& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double log_sum_exp(const Vec& v) {
  const double top = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - top);
  return top + std::log(s);
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  CheckResult marginals{"mean_field_marginals", true, 0.0, 0.05, 0};
  CheckResult gradient{"gradient_finite_difference", true, 0.0, 1e-4, 0};
  CheckResult single{"single_node_exactness", true, 0.0, 1e-10, 0};
  const crf::MeanFieldOptions mf{200, 1e-12, true};

  for (std::size_t t = 0; t < options.instances; ++t) {
    const std::uint64_t seed = options.seed * 1000003u + t;
    {
      InstanceSpec spec;
      spec.n = 4 + t % 3;
      spec.k = 2 + t % 2;
      spec.seed = seed;
      const Instance inst = make_instance(spec);
      const auto exact = enumerate_exact(inst.params, inst.theta, inst.obs, inst.sim);
      const auto state = crf::mean_field(inst.params, inst.theta, inst.obs, inst.sim, mf);
      marginals.worst = std::max(marginals.worst, linf(state.q, exact.marginals));
      ++marginals.instances;
    }
    {
      InstanceSpec spec;
      spec.n = 3 + t % 3;
      spec.k = 2;
      spec.max_coupling = 1.0;
      spec.seed = seed;
      const Instance inst = make_instance(spec);
      const auto exact = enumerate_exact(inst.params, inst.theta, inst.obs, inst.sim,
                                         {.pairwise = true, .pair_moments = true});
      const Vec analytic = exact_gradient(exact, inst.obs, inst.sim);
      for (std::size_t c = 0; c < analytic.size(); ++c) {
        const double fd = exact_objective_fd(inst.params, inst.theta, inst.obs, inst.sim, c, 1e-5);
        const double err = std::abs(analytic[c] - fd) / std::max(std::abs(fd), 1e-8 / 1e-4);
        gradient.worst = std::max(gradient.worst, err);
      }
      ++gradient.instances;
    }
    {
      InstanceSpec spec;
      spec.n = 1;
      spec.k = 2 + t % 3;
      spec.seed = seed;
      const Instance inst = make_instance(spec);
      const auto state = crf::mean_field(inst.params, inst.theta, inst.obs, inst.sim, mf);
      const Table u = crf::unary_scores(inst.params, inst.obs);
      const Table r = crf::log_gaussian_table(inst.obs.reconstruction_targets(), inst.theta);
      Vec s(spec.k), sp(spec.k), q(spec.k), qp(spec.k);
      for (std::size_t c = 0; c < spec.k; ++c) {
        s[c] = u(0, c) + r(0, c);
        sp[c] = u(0, c);
      }
      crf::softmax_row(s, q);
      crf::softmax_row(sp, qp);
      const auto fe = crf::free_energy(state, inst.params, inst.theta, inst.obs, inst.sim);
      double err = std::max(std::abs(fe.log_z - log_sum_exp(s)), std::abs(fe.log_z_prime - log_sum_exp(sp)));
      for (std::size_t c = 0; c < spec.k; ++c) {
        err = std::max(err, std::abs(state.q(0, c) - q[c]));
        err = std::max(err, std::abs(state.q_prime(0, c) - qp[c]));
      }
      single.worst = std::max(single.worst, err);
      ++single.instances;
    }
  }
  for (CheckResult* c : {&marginals, &gradient, &single}) c->passed = c->worst <= c->tolerance;
  return {marginals, gradient, single};
}

}  // namespace coseg::oracle
