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

#include "synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "core/error.hpp"
#include "core/grid.hpp"

namespace coseg::synth {

void SynthSpec::check() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorKind::kUsage, what);
  };
  require(k_true >= 1 && images >= 1 && proposals_per_image >= 1, "synth counts must be >= 1");
  require(d_f >= 1 && d_f + 1 >= k_true, "d_f must be at least k_true - 1");
  require(d_h >= 1, "d_h must be >= 1");
  require(sigma > 0.0, "sigma must be positive");
  require(separation >= 0.0, "separation must be non-negative");
  require(signal_strength >= 0.0 && signal_strength <= 1.0, "signal strength must lie in [0, 1]");
  require(interaction_noise >= 0.0, "interaction noise must be non-negative");
  require(image_width > 0 && image_height > 0, "image size must be positive");
}

Table simplex_centers(std::size_t k, std::size_t dim, double distance) {
  Table centers(k, dim);
  if (k < 2) return centers;
  // Vertices e_c - mean, written in an orthonormal basis of the
  // (k - 1)-dimensional subspace orthogonal to the all-ones vector.
  std::vector<Vec> basis;
  for (std::size_t b = 0; b + 1 < k; ++b) {
    Vec v(k, 0.0);
    v[b] = 1.0;
    v[b + 1] = -1.0;
    for (const Vec& u : basis) {
      double proj = 0.0;
      for (std::size_t c = 0; c < k; ++c) proj += v[c] * u[c];
      for (std::size_t c = 0; c < k; ++c) v[c] -= proj * u[c];
    }
    double len = 0.0;
    for (double x : v) len += x * x;
    len = std::sqrt(len);
    for (double& x : v) x /= len;
    basis.push_back(std::move(v));
  }
  // Unit-vector vertices sit sqrt(2) apart.
  const double scale = distance / std::sqrt(2.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t b = 0; b + 1 < k && b < dim; ++b) {
      double coord = 0.0;
      for (std::size_t e = 0; e < k; ++e) {
        const double vertex = (e == c ? 1.0 : 0.0) - 1.0 / static_cast<double>(k);
        coord += vertex * basis[b][e];
      }
      centers(c, b) = scale * coord;
    }
  }
  return centers;
}

SynthResult generate(const SynthSpec& spec) {
  spec.check();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SynthResult out;
  out.centers = simplex_centers(spec.k_true, spec.d_f, spec.separation * spec.sigma);

  const auto signaled = static_cast<std::size_t>(
      std::llround(spec.signal_strength * static_cast<double>(spec.k_true)));
  const std::size_t block = std::max<std::size_t>(spec.d_h / spec.k_true, 1);
  constexpr double kTemplatePeak = 0.6;
  Table templates(spec.k_true, spec.d_h);
  for (std::size_t c = 0; c < signaled; ++c) {
    templates(c, std::min(c * block, spec.d_h - 1)) = kTemplatePeak;
  }

  const auto grid_rows = static_cast<int>(
      std::ceil(std::sqrt(static_cast<double>(spec.proposals_per_image))));
  const int grid_cols = static_cast<int>(
      (spec.proposals_per_image + static_cast<std::size_t>(grid_rows) - 1) /
      static_cast<std::size_t>(grid_rows));

  const std::size_t n = spec.proposal_count();
  out.dataset.images.resize(spec.images);
  out.planted_labels.reserve(n);
  for (std::size_t m = 0; m < spec.images; ++m) {
    ImageRecord& img = out.dataset.images[m];
    img.image_id = "img" + std::to_string(m);
    img.width = spec.image_width;
    img.height = spec.image_height;
    const auto tiles =
        make_grid_proposals(img.image_id, img.width, img.height, grid_rows, grid_cols);
    Mask truth(img.width, img.height);
    for (std::size_t s = 0; s < spec.proposals_per_image; ++s) {
      const std::size_t g = m + spec.images * s;
      const std::size_t label = g % spec.k_true;
      ProposalRecord p = tiles[s];
      p.proposal_id = "p" + std::to_string(g);
      const Rect inner{p.bbox.x + (p.bbox.width > 2 ? 1 : 0), p.bbox.y + (p.bbox.height > 2 ? 1 : 0),
                       std::max<std::int64_t>(p.bbox.width - 2, 1),
                       std::max<std::int64_t>(p.bbox.height - 2, 1)};
      p.mask = Mask::from_rect(img.width, img.height, inner);
      p.appearance.resize(spec.d_f);
      for (std::size_t d = 0; d < spec.d_f; ++d) {
        p.appearance[d] = out.centers(label, d) + spec.sigma * normal(rng);
      }
      p.interaction.resize(spec.d_h);
      double sum = 0.0;
      for (std::size_t d = 0; d < spec.d_h; ++d) {
        const double v = templates(label, d) + spec.interaction_noise * normal(rng);
        p.interaction[d] = std::clamp(v, 0.0, 1.0);
        sum += p.interaction[d];
      }
      if (sum > 1.0) {
        for (double& v : p.interaction) v /= sum;
      }
      if (label == out.foreground_cluster) truth = truth.unite(*p.mask);
      out.planted_labels.push_back(label);
      img.proposals.push_back(std::move(p));
    }
    img.ground_truth.emplace(kPlantedClass, truth);
    out.planted_foreground.push_back(std::move(truth));
  }
  return out;
}

double bayes_accuracy(const SynthSpec& spec) {
  spec.check();
  constexpr std::size_t kDraws = 100000;
  constexpr std::uint64_t kSeed = 0x5eedu;
  const Table centers = simplex_centers(spec.k_true, spec.d_f, spec.separation * spec.sigma);
  std::mt19937_64 rng(kSeed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t correct = 0;
  Vec x(spec.d_f);
  for (std::size_t t = 0; t < kDraws; ++t) {
    const std::size_t label = rng() % spec.k_true;
    for (std::size_t d = 0; d < spec.d_f; ++d) x[d] = centers(label, d) + spec.sigma * normal(rng);
    std::size_t best = 0;
    double best_d2 = 0.0;
    for (std::size_t c = 0; c < spec.k_true; ++c) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < spec.d_f; ++d) {
        const double diff = x[d] - centers(c, d);
        d2 += diff * diff;
      }
      if (c == 0 || d2 < best_d2) {
        best = c;
        best_d2 = d2;
      }
    }
    if (best == label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(kDraws);
}

}  // namespace coseg::synth
