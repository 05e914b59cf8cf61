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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "core/error.hpp"
#include "crf/inference.hpp"
#include "crf/learning.hpp"
#include "crf/mean_field.hpp"
#include "crf/model.hpp"
#include "crf/train.hpp"
#include "hoi/similarity.hpp"
#include "oracle/exact.hpp"
#include "support/oracles.hpp"
#include "synth/synth.hpp"

using namespace coseg;
using doctest::Approx;

namespace {

oracle::Instance instance(std::size_t n, std::size_t k, std::uint64_t seed, double coupling = 0.1) {
  oracle::InstanceSpec spec;
  spec.n = n;
  spec.k = k;
  spec.seed = seed;
  spec.max_coupling = coupling;
  return oracle::make_instance(spec);
}

Vec softmax(const Vec& s) {
  double top = s[0];
  for (double v : s) top = std::max(top, v);
  Vec out(s.size());
  double z = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) z += (out[i] = std::exp(s[i] - top));
  for (double& v : out) v /= z;
  return out;
}

double logsumexp(const Vec& s) {
  double top = s[0];
  for (double v : s) top = std::max(top, v);
  double z = 0.0;
  for (double v : s) z += std::exp(v - top);
  return top + std::log(z);
}

Vec unary_oracle(const oracle::Instance& inst, std::size_t i) {
  Vec out;
  for (std::size_t c = 0; c < inst.params.clusters(); ++c) {
    std::vector<std::size_t> y{c};
    Observations one{Table(1, inst.obs.appearance.cols()), Table(1, inst.obs.interaction.cols())};
    for (std::size_t d = 0; d < one.appearance.cols(); ++d) one.appearance(0, d) = inst.obs.appearance(i, d);
    for (std::size_t d = 0; d < one.interaction.cols(); ++d) one.interaction(0, d) = inst.obs.interaction(i, d);
    out.push_back(testing::naive_score(inst.params, one, {Table(1, 1, 1.0), Table(1, 1, 1.0)}, y, false));
  }
  return out;
}

Vec recon_oracle(const oracle::Instance& inst, std::size_t i) {
  Vec x = testing::row_of(inst.obs.appearance, i);
  const Vec h = testing::row_of(inst.obs.interaction, i);
  x.insert(x.end(), h.begin(), h.end());
  Vec out;
  for (std::size_t c = 0; c < inst.params.clusters(); ++c) {
    out.push_back(testing::naive_log_gaussian(x, testing::row_of(inst.theta.means, c),
                                              testing::row_of(inst.theta.variances, c)));
  }
  return out;
}

}  // namespace

TEST_CASE("energy") {
  SUBCASE("N=1 is the unary value") {
    const auto inst = instance(1, 3, 1);
    const Vec u = unary_oracle(inst, 0);
    for (std::size_t c = 0; c < 3; ++c) {
      const std::vector<std::size_t> y{c};
      CHECK(crf::energy(inst.params, y, inst.obs, inst.sim) == Approx(u[c]).epsilon(1e-14));
    }
  }
  SUBCASE("zero pairwise terms leave the unary sum") {
    auto inst = instance(4, 2, 2);
    for (auto* ch : {&inst.params.pair_object, &inst.params.pair_interaction}) {
      for (auto& w : *ch) w = {0.0, 0.0};
    }
    const std::vector<std::size_t> y{0, 0, 1, 0};
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) sum += unary_oracle(inst, i)[y[i]];
    CHECK(crf::energy(inst.params, y, inst.obs, inst.sim) == Approx(sum).epsilon(1e-13));
  }
  SUBCASE("N=3, K=2 matches term-by-term summation") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto inst = instance(3, 2, seed, 2.0);
      for (std::size_t code = 0; code < 8; ++code) {
        const std::vector<std::size_t> y{code & 1, (code >> 1) & 1, (code >> 2) & 1};
        CHECK(crf::energy(inst.params, y, inst.obs, inst.sim) ==
              Approx(testing::naive_score(inst.params, inst.obs, inst.sim, y, true)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("log_gaussian") {
  ReconstructionParams theta{Table(1, 2, 0.0), Table(1, 2, 1.0)};
  CHECK(crf::log_gaussian(Vec{0.0, 0.0}, 0, theta) == Approx(-1.837877).epsilon(1e-6));
  ReconstructionParams one{Table(1, 1, 0.0), Table(1, 1, 1.0)};
  CHECK(crf::log_gaussian(Vec{1.0}, 0, one) == Approx(-1.418939).epsilon(1e-6));
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    ReconstructionParams th{Table(2, 5), Table(2, 5)};
    Vec x(5);
    for (double& v : th.means.data()) v = g(rng);
    for (double& v : th.variances.data()) v = 0.1 + std::abs(g(rng));
    for (double& v : x) v = g(rng);
    for (std::size_t c = 0; c < 2; ++c) {
      const double expect = testing::naive_log_gaussian(x, testing::row_of(th.means, c),
                                                        testing::row_of(th.variances, c));
      CHECK(std::abs(crf::log_gaussian(x, c, th) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST_CASE("mean field at N=1 is the closed-form softmax") {
  const auto inst = instance(1, 3, 4);
  const auto st = crf::mean_field(inst.params, inst.theta, inst.obs, inst.sim, {});
  const Vec u = unary_oracle(inst, 0), r = recon_oracle(inst, 0);
  Vec ur(3);
  for (std::size_t c = 0; c < 3; ++c) ur[c] = u[c] + r[c];
  const Vec q = softmax(ur), qp = softmax(u);
  for (std::size_t c = 0; c < 3; ++c) {
    CHECK(std::abs(st.q(0, c) - q[c]) < 1e-12);
    CHECK(std::abs(st.q_prime(0, c) - qp[c]) < 1e-12);
  }
  CHECK(st.converged);
  const auto fe = crf::free_energy(st, inst.params, inst.theta, inst.obs, inst.sim);
  CHECK(fe.log_z == Approx(logsumexp(ur)).epsilon(1e-12));
  CHECK(fe.log_z_prime == Approx(logsumexp(u)).epsilon(1e-12));
}

TEST_CASE("decoupled nodes stay at their initialization") {
  auto inst = instance(6, 2, 5);
  for (auto* ch : {&inst.params.pair_object, &inst.params.pair_interaction}) {
    for (auto& w : *ch) w = {1e-12, 0.0};
  }
  const auto st = crf::mean_field(inst.params, inst.theta, inst.obs, inst.sim, {});
  CHECK(st.sweeps == 1);
  CHECK(st.converged);
}

TEST_CASE("mean field tracks exact marginals under weak coupling") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto inst = instance(6, 2, 100 + seed);
    CHECK(oracle::max_pair_coupling(inst) <= 0.1);
    const auto st = crf::mean_field(inst.params, inst.theta, inst.obs, inst.sim, {200, 1e-12, true});
    const auto exact = testing::naive_enumerate(inst.params, inst.theta, inst.obs, inst.sim);
    for (std::size_t i = 0; i < 6; ++i) {
      double sum = 0.0, sum_p = 0.0;
      for (std::size_t c = 0; c < 2; ++c) {
        CHECK(std::abs(st.q(i, c) - exact.marginals[i][c]) <= 0.05);
        CHECK(st.q(i, c) >= 0.0);
        sum += st.q(i, c);
        sum_p += st.q_prime(i, c);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
      CHECK(std::abs(sum_p - 1.0) <= 1e-9);
    }
    const auto fe = crf::free_energy(st, inst.params, inst.theta, inst.obs, inst.sim);
    CHECK(std::abs(fe.log_z - exact.log_z) <= 0.02 * std::abs(exact.log_z));
    CHECK(fe.log_z <= exact.log_z + 1e-9);
  }
}

TEST_CASE("mean field is thread-count independent") {
  const auto inst = instance(60, 3, 12, 5.0);
  const auto a = crf::mean_field(inst.params, inst.theta, inst.obs, inst.sim, {}, {1});
  const auto b = crf::mean_field(inst.params, inst.theta, inst.obs, inst.sim, {}, {8});
  CHECK(a.q == b.q);
  CHECK(a.q_prime == b.q_prime);
  CHECK(a.delta_history == b.delta_history);
}

TEST_CASE("free energy with K=1 and no pairwise terms is exact") {
  auto inst = instance(4, 1, 6);
  inst.params.pair_object[0] = {0.0, 0.0};
  inst.params.pair_interaction[0] = {0.0, 0.0};
  const auto st = crf::mean_field(inst.params, inst.theta, inst.obs, inst.sim, {});
  const auto fe = crf::free_energy(st, inst.params, inst.theta, inst.obs, inst.sim);
  double expect = 0.0;
  for (std::size_t i = 0; i < 4; ++i) expect += unary_oracle(inst, i)[0] + recon_oracle(inst, i)[0];
  CHECK(fe.log_z == Approx(expect).epsilon(1e-12));
}

TEST_CASE("gradients") {
  SUBCASE("Q equal to Q' gives zero") {
    const auto inst = instance(5, 2, 3);
    crf::MeanFieldState st{Table(5, 2, 0.5), Table(5, 2, 0.5)};
    st.q(1, 0) = st.q_prime(1, 0) = 0.8;
    st.q(1, 1) = st.q_prime(1, 1) = 0.2;
    for (double g : crf::gradients(st, inst.obs, inst.sim)) CHECK(g == 0.0);
  }
  SUBCASE("N=1 closed form") {
    const auto inst = instance(1, 2, 9);
    const auto st = crf::mean_field(inst.params, inst.theta, inst.obs, inst.sim, {});
    const Vec g = crf::gradients(st, inst.obs, inst.sim);
    const std::size_t df = inst.obs.appearance.cols(), dh = inst.obs.interaction.cols();
    for (std::size_t c = 0; c < 2; ++c) {
      const double diff = st.q(0, c) - st.q_prime(0, c);
      for (std::size_t d = 0; d < df; ++d) CHECK(g[c * (df + 1) + d] == Approx(inst.obs.appearance(0, d) * diff));
      CHECK(g[c * (df + 1) + df] == Approx(-diff));
      const std::size_t base = 2 * (df + 1) + c * (dh + 1);
      for (std::size_t d = 0; d < dh; ++d) CHECK(g[base + d] == Approx(inst.obs.interaction(0, d) * diff));
    }
    for (std::size_t t = 2 * (df + 1) + 2 * (dh + 1); t < g.size(); ++t) CHECK(g[t] == 0.0);
    // Finite difference of the exact objective agrees at N=1.
    for (std::size_t coord = 0; coord < 2 * (df + 1); ++coord) {
      const double fd = oracle::exact_objective_fd(inst.params, inst.theta, inst.obs, inst.sim, coord, 1e-5);
      CHECK(std::abs(fd - g[coord]) <= 1e-6);
    }
  }
  SUBCASE("exact moments match finite differences") {
    const auto inst = instance(5, 2, 21, 1.0);
    const auto exact = oracle::enumerate_exact(inst.params, inst.theta, inst.obs, inst.sim, {true, true});
    const Vec g = oracle::exact_gradient(exact, inst.obs, inst.sim);
    for (std::size_t coord = 0; coord < g.size(); ++coord) {
      const double fd = oracle::exact_objective_fd(inst.params, inst.theta, inst.obs, inst.sim, coord, 1e-5);
      CHECK(std::abs(g[coord] - fd) <= 1e-4 * std::max(std::abs(fd), 1e-4));
    }
  }
}

TEST_CASE("adagrad") {
  EncoderParams p = EncoderParams::initial(2, 1, 1, 1e-4);
  p.appearance(0, 0) = 0.3;
  p.interaction(1, 0) = 0.2;
  SUBCASE("zero gradient, no regularization") {
    crf::AdagradState st(p.coordinate_count(), 0.1);
    const Vec zero(p.coordinate_count(), 0.0);
    CHECK(crf::adagrad_step(p, zero, 0.0, 1e-4, st) == p);
  }
  SUBCASE("projection clamps to exactly zero") {
    crf::AdagradState st(p.coordinate_count(), 1.0);
    Vec g(p.coordinate_count(), 0.0);
    const std::size_t idx = 2 * 2 + 2;  // interaction weight of cluster 1
    g[idx] = -5.0;
    const auto out = crf::adagrad_step(p, g, 0.0, 1e-4, st);
    CHECK(out.interaction(1, 0) == 0.0);
    CHECK(out.constraint_violations(1e-4).empty());
  }
  SUBCASE("two scripted steps") {
    const double lr = 0.1, reg = 0.01;
    crf::AdagradState st(p.coordinate_count(), lr);
    Vec g1(p.coordinate_count(), 0.0), g2(p.coordinate_count(), 0.0);
    g1[0] = 0.5;
    g2[0] = -0.25;
    double x = 0.3, acc = 0.0;
    for (const Vec* g : {&g1, &g2}) {
      p = crf::adagrad_step(p, *g, reg, 1e-4, st);
      const double step = (*g)[0] - reg * x;
      acc += step * step;
      x += lr * step / std::sqrt(acc + 1e-8);
      CHECK(p.appearance(0, 0) == Approx(x).epsilon(1e-15));
      CHECK(st.accumulator[0] == Approx(acc).epsilon(1e-15));
    }
  }
}

TEST_CASE("em_update") {
  SUBCASE("all mass on cluster 0") {
    Table x(4, 1);
    x(0, 0) = 1;
    x(1, 0) = 2;
    x(2, 0) = 4;
    x(3, 0) = 5;
    Table q(4, 2, 0.0);
    for (std::size_t i = 0; i < 4; ++i) q(i, 0) = 1.0;
    const auto th = crf::em_update(q, x, 1e-6);
    CHECK(th.means(0, 0) == Approx(3.0));
    CHECK(th.variances(0, 0) == Approx(2.5));
  }
  SUBCASE("two points, uniform responsibilities") {
    Table x(2, 2);
    x(0, 0) = 0;
    x(0, 1) = 2;
    x(1, 0) = 4;
    x(1, 1) = 6;
    const auto th = crf::em_update(Table(2, 2, 0.5), x, 1e-6);
    for (std::size_t c = 0; c < 2; ++c) {
      CHECK(th.means(c, 0) == Approx(2.0));
      CHECK(th.means(c, 1) == Approx(4.0));
    }
  }
  SUBCASE("random weighted moments") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.01, 1.0);
    Table x(30, 3), q(30, 3);
    for (double& v : x.data()) v = 5.0 * u(rng);
    for (std::size_t i = 0; i < 30; ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < 3; ++c) s += (q(i, c) = u(rng));
      for (std::size_t c = 0; c < 3; ++c) q(i, c) /= s;
    }
    const auto th = crf::em_update(q, x, 1e-6);
    std::vector<std::vector<double>> xs(30), rs(30);
    for (std::size_t i = 0; i < 30; ++i) {
      xs[i] = testing::row_of(x, i);
      rs[i] = testing::row_of(q, i);
    }
    testing::ReferenceGmm ref{std::vector<std::vector<double>>(3), std::vector<std::vector<double>>(3), 1e-6};
    ref.maximize(xs, rs);
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t d = 0; d < 3; ++d) {
        CHECK(std::abs(th.means(c, d) - ref.means[c][d]) <= 1e-10);
        CHECK(std::abs(th.variances(c, d) - ref.vars[c][d]) <= 1e-10);
      }
    }
  }
  SUBCASE("empty clusters are revived") {
    Table x(3, 1);
    x(0, 0) = 0;
    x(1, 0) = 1;
    x(2, 0) = 10;
    Table q(3, 2, 0.0);
    q(0, 0) = q(1, 0) = 1.0;
    q(2, 0) = 0.6;
    q(2, 1) = 0.0;
    q(2, 0) = 1.0;
    const auto th = crf::em_update(q, x, 1e-6);
    CHECK(std::isfinite(th.means(1, 0)));
    CHECK(th.variances(1, 0) > 0.0);
  }
}

namespace {

Dataset small_synth(std::uint64_t seed, std::size_t images = 6) {
  synth::SynthSpec s;
  s.seed = seed;
  s.images = images;
  s.proposals_per_image = 5;
  return synth::generate(s).dataset;
}

}  // namespace

TEST_CASE("training") {
  const Dataset ds = small_synth(1);
  SUBCASE("K=1 puts everything in cluster 0") {
    TrainConfig c;
    c.k = 1;
    c.outer_iters = 3;
    const auto m = crf::train(ds, c);
    for (double v : m.final_state.q.data()) CHECK(v == 1.0);
  }
  SUBCASE("K larger than N is rejected") {
    TrainConfig c;
    c.k = 31;
    CHECK_THROWS_AS(crf::train(ds, c), Error);
  }
  SUBCASE("thread count does not change the model") {
    TrainConfig c;
    c.outer_iters = 8;
    c.learning_rate = 0.05;
    const auto a = crf::train(ds, c, {1});
    const auto b = crf::train(ds, c, {6});
    CHECK(a.encoder == b.encoder);
    CHECK(a.reconstruction == b.reconstruction);
    CHECK(a.final_state.q == b.final_state.q);
  }
  SUBCASE("constraints hold after every step") {
    TrainConfig c;
    c.outer_iters = 15;
    c.learning_rate = 0.2;
    std::size_t steps = 0;
    crf::train(ds, c, {}, [&](const crf::IterationRecord&, const crf::MeanFieldState&,
                              const EncoderParams& e, const ReconstructionParams&) {
      CHECK(e.constraint_violations(c.epsilon_p).empty());
      ++steps;
    });
    CHECK(steps > 0);
  }
}

TEST_CASE("training without pairwise terms or encoder learning is GMM EM") {
  const Dataset ds = small_synth(2);
  TrainConfig c;
  c.outer_iters = 10;
  c.use_pairwise = false;
  c.learn_encoder = false;
  c.convergence_rtol = 0.0;
  const Observations obs = Observations::from_dataset(ds);
  const Table xhat = obs.reconstruction_targets();
  const auto init = crf::initial_reconstruction(xhat, c.k, c.seed, c.variance_floor);
  testing::ReferenceGmm ref;
  for (std::size_t k = 0; k < c.k; ++k) {
    ref.means.push_back(testing::row_of(init.means, k));
    ref.vars.push_back(testing::row_of(init.variances, k));
  }
  std::vector<std::vector<double>> xs;
  for (std::size_t i = 0; i < xhat.rows(); ++i) xs.push_back(testing::row_of(xhat, i));
  std::size_t seen = 0;
  crf::train(ds, c, {}, [&](const crf::IterationRecord&, const crf::MeanFieldState& st,
                            const EncoderParams&, const ReconstructionParams& th) {
    const auto r = ref.responsibilities(xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      for (std::size_t k = 0; k < c.k; ++k) CHECK(std::abs(st.q(i, k) - r[i][k]) <= 1e-6);
    }
    ref.maximize(xs, r);
    for (std::size_t k = 0; k < c.k; ++k) {
      for (std::size_t d = 0; d < xs[0].size(); ++d) {
        CHECK(std::abs(th.means(k, d) - ref.means[k][d]) <= 1e-6);
        CHECK(std::abs(th.variances(k, d) - ref.vars[k][d]) <= 1e-6);
      }
    }
    ++seen;
  });
  CHECK(seen == 10);
}

TEST_CASE("inference") {
  const Dataset ds = small_synth(3);
  TrainConfig c;
  c.outer_iters = 5;
  const auto m = crf::train(ds, c);
  CHECK(crf::infer(m, ds) == m.final_state.q);

  Dataset one;
  one.images.push_back(ds.images[0]);
  one.images[0].proposals.resize(1);
  const Table q = crf::infer(m, one);
  const Observations obs = Observations::from_dataset(one);
  const Table u = crf::unary_scores(m.encoder, obs);
  const Table r = crf::log_gaussian_table(obs.reconstruction_targets(), m.reconstruction);
  Vec s(c.k);
  for (std::size_t k = 0; k < c.k; ++k) s[k] = u(0, k) + r(0, k);
  const Vec expect = softmax(s);
  for (std::size_t k = 0; k < c.k; ++k) CHECK(q(0, k) == Approx(expect[k]).epsilon(1e-12));

  Dataset wrong = one;
  wrong.images[0].proposals[0].appearance.push_back(0.0);
  CHECK_THROWS_AS(crf::infer(m, wrong), Error);
}

TEST_CASE("foreground selection") {
  Dataset ds;
  ImageRecord img;
  img.image_id = "x";
  img.width = 10;
  img.height = 10;
  ProposalRecord a, b;
  a.proposal_id = "a";
  a.bbox = {0, 0, 3, 3};
  b.proposal_id = "b";
  b.bbox = {5, 5, 2, 2};
  img.proposals = {a};
  ds.images.push_back(img);

  SUBCASE("one proposal is selected for every cluster") {
    Table q(1, 2);
    q(0, 0) = 0.3;
    q(0, 1) = 0.7;
    const auto sel = crf::select_foregrounds(q, ds, ForegroundMode::kTop1);
    REQUIRE(sel[0].clusters.size() == 2);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(sel[0].clusters[k].proposals == std::vector<std::size_t>{0});
      CHECK(sel[0].clusters[k].confidence[0] == q(0, k));
    }
  }
  ds.images[0].proposals = {a, b};
  SUBCASE("top1 takes the argmax") {
    Table q(2, 2);
    q(0, 0) = 0.9;
    q(0, 1) = 0.1;
    q(1, 0) = 0.4;
    q(1, 1) = 0.6;
    const auto sel = crf::select_foregrounds(q, ds, ForegroundMode::kTop1);
    CHECK(sel[0].clusters[0].proposals == std::vector<std::size_t>{0});
    CHECK(sel[0].clusters[0].region.area() == 9);
  }
  SUBCASE("union of disjoint masks") {
    Table q(2, 2);
    q(0, 0) = 0.9;
    q(0, 1) = 0.1;
    q(1, 0) = 0.6;
    q(1, 1) = 0.4;
    const auto sel = crf::select_foregrounds(q, ds, ForegroundMode::kUnion);
    CHECK(sel[0].clusters[0].region.area() == 9 + 4);
    CHECK(sel[0].clusters[1].region.empty());
  }
}

TEST_CASE("free-energy objective trends upward on the synthetic benchmark") {
  int rising = 0, steps = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    synth::SynthSpec s;
    s.seed = seed;
    TrainConfig c;
    c.seed = seed;
    const auto m = crf::train(synth::generate(s).dataset, c);
    for (std::size_t t = 1; t < m.trace.size(); ++t) {
      ++steps;
      rising += m.trace[t].objective >= m.trace[t - 1].objective - 1e-6;
    }
  }
  CHECK(steps > 0);
  CHECK(rising >= 0.95 * steps);
}
