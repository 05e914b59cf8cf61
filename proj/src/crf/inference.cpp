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

#include "crf/inference.hpp"

#include "core/error.hpp"
#include "hoi/similarity.hpp"

namespace coseg::crf {

Table infer(const TrainedModel& model, const Dataset& dataset, ExecPolicy policy) {
  const Observations obs = Observations::from_dataset(dataset);
  if (obs.size() == 0) fail(ErrorKind::kValidation, "inference needs at least one proposal");
  if (obs.appearance.cols() != model.encoder.appearance_dim() ||
      obs.interaction.cols() != model.encoder.interaction_dim()) {
    fail(ErrorKind::kValidation, "dataset feature dimensions differ from the model");
  }
  if (dataset_fingerprint(dataset) == model.dataset_fingerprint &&
      model.final_state.q.rows() == obs.size()) {
    return model.final_state.q;
  }
  const SimilarityChannels sim = hoi::build_similarity(obs, model.delta_f, model.delta_h, policy);
  const MeanFieldOptions mf{model.config.mf_max_sweeps, model.config.mf_tol,
                            model.config.use_pairwise};
  return mean_field(model.encoder, model.reconstruction, obs, sim, mf, policy).q;
}

std::vector<std::size_t> hard_assignment(const Table& q) {
  std::vector<std::size_t> out(q.rows(), 0);
  for (std::size_t i = 0; i < q.rows(); ++i) {
    for (std::size_t c = 1; c < q.cols(); ++c) {
      if (q(i, c) > q(i, out[i])) out[i] = c;
    }
  }
  return out;
}

std::vector<ImageSelection> select_foregrounds(const Table& q, const Dataset& dataset,
                                               ForegroundMode mode) {
  if (q.rows() != dataset.proposal_count()) {
    fail(ErrorKind::kValidation, "distribution table does not cover every proposal");
  }
  const std::size_t k = q.cols();
  const std::vector<std::size_t> labels = hard_assignment(q);
  std::vector<ImageSelection> out;
  out.reserve(dataset.images.size());
  std::size_t offset = 0;
  for (const auto& img : dataset.images) {
    ImageSelection sel{img.image_id, std::vector<ClusterSelection>(k)};
    for (std::size_t c = 0; c < k; ++c) {
      ClusterSelection& cs = sel.clusters[c];
      cs.region = Mask(img.width, img.height);
      if (mode == ForegroundMode::kTop1) {
        if (img.proposals.empty()) continue;
        std::size_t best = 0;
        for (std::size_t p = 1; p < img.proposals.size(); ++p) {
          if (q(offset + p, c) > q(offset + best, c)) best = p;
        }
        cs.proposals.push_back(best);
        cs.confidence.push_back(q(offset + best, c));
        cs.region = img.proposals[best].region(img.width, img.height);
      } else {
        for (std::size_t p = 0; p < img.proposals.size(); ++p) {
          if (labels[offset + p] != c) continue;
          cs.proposals.push_back(p);
          cs.confidence.push_back(q(offset + p, c));
          cs.region = cs.region.unite(img.proposals[p].region(img.width, img.height));
        }
      }
    }
    offset += img.proposals.size();
    out.push_back(std::move(sel));
  }
  return out;
}

}  // namespace coseg::crf
