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

#include "coseg/coseg.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <string>
#include <utility>

#include "cli/depth.hpp"
#include "cli/featurize.hpp"
#include "core/error.hpp"
#include "core/validate.hpp"
#include "crf/inference.hpp"
#include "crf/train.hpp"
#include "eval/metrics.hpp"
#include "io/manifest.hpp"
#include "io/model_file.hpp"
#include "oracle/verify.hpp"
#include "synth/synth.hpp"

using coseg::ErrorKind;
using coseg::io::Json;

struct coseg_dataset {
  coseg::io::Manifest manifest;
};

struct coseg_model {
  coseg::crf::TrainedModel model;
};

struct coseg_distributions {
  coseg::io::Distributions dist;
};

struct coseg_selections {
  coseg::io::Selections sel;
};

namespace {

thread_local std::string g_last_error;

coseg_status to_status(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage: return COSEG_ERR_USAGE;
    case ErrorKind::kValidation: return COSEG_ERR_VALIDATION;
    case ErrorKind::kNumerical: return COSEG_ERR_NUMERICAL;
    case ErrorKind::kIo: return COSEG_ERR_IO;
  }
  return COSEG_ERR_INTERNAL;
}

template <typename Fn>
coseg_status guarded(Fn&& fn) {
  try {
    fn();
    return COSEG_OK;
  } catch (const coseg::Error& e) {
    g_last_error = e.what();
    return to_status(e.kind());
  } catch (const Json::exception& e) {
    g_last_error = e.what();
    return COSEG_ERR_VALIDATION;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return COSEG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return COSEG_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) coseg::fail(ErrorKind::kUsage, what);
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

coseg::TrainConfig to_config(const coseg_train_config& c) {
  coseg::TrainConfig out;
  out.k = c.k;
  if (c.delta_f > 0.0) out.delta_f = c.delta_f;
  if (c.delta_h > 0.0) out.delta_h = c.delta_h;
  out.reg_lambda = c.reg_lambda;
  out.learning_rate = c.learning_rate;
  out.outer_iters = c.outer_iters;
  out.mf_max_sweeps = c.mf_max_sweeps;
  out.mf_tol = c.mf_tol;
  out.epsilon_p = c.epsilon_p;
  out.variance_floor = c.variance_floor;
  out.seed = c.seed;
  out.foreground_mode =
      coseg::parse_foreground_mode(c.foreground_mode ? c.foreground_mode : "top1");
  out.convergence_rtol = c.convergence_rtol;
  out.use_pairwise = c.use_pairwise != 0;
  out.learn_encoder = c.learn_encoder != 0;
  return out;
}

coseg::SkeletonTopology load_topology(const char* path) {
  if (!path) return coseg::SkeletonTopology::kinect_default();
  const Json j = Json::parse(coseg::io::read_file(path));
  coseg::SkeletonTopology t;
  for (const auto& part : j) {
    if (!part.is_array() || part.size() != 2) {
      coseg::fail(ErrorKind::kValidation, "topology entries must be [start_joint, end_joint]");
    }
    t.parts.emplace_back(part[0].get<std::string>(), part[1].get<std::string>());
  }
  for (std::size_t a = 0; a < t.parts.size(); ++a) {
    for (std::size_t b = a + 1; b < t.parts.size(); ++b) {
      if (t.parts[a] == t.parts[b]) coseg::fail(ErrorKind::kValidation, "topology repeats a part");
    }
  }
  return t;
}

Json model_meta(const coseg::crf::TrainedModel& m) {
  return {{"config", coseg::io::to_json(m.config)},
          {"seed", m.config.seed},
          {"bandwidths", {{"delta_f", m.delta_f}, {"delta_h", m.delta_h}}}};
}

}  // namespace

extern "C" {

const char* coseg_last_error(void) { return g_last_error.c_str(); }

const char* coseg_version(void) { return "0.1.0"; }

void coseg_string_free(char* s) { delete[] s; }

coseg_status coseg_dataset_load(const char* path, coseg_dataset** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new coseg_dataset{coseg::io::read_manifest(std::string(path))};
  });
}

coseg_status coseg_dataset_save(const coseg_dataset* dataset, const char* path) {
  return guarded([&] {
    require(dataset && path, "null argument");
    coseg::io::write_manifest(std::string(path), dataset->manifest);
  });
}

void coseg_dataset_free(coseg_dataset* dataset) { delete dataset; }

size_t coseg_dataset_image_count(const coseg_dataset* dataset) {
  return dataset ? dataset->manifest.dataset.images.size() : 0;
}

size_t coseg_dataset_proposal_count(const coseg_dataset* dataset) {
  return dataset ? dataset->manifest.dataset.proposal_count() : 0;
}

coseg_status coseg_dataset_validate(const coseg_dataset* dataset, size_t* violations,
                                    char** report_json) {
  return guarded([&] {
    require(dataset && violations, "null argument");
    const auto report = coseg::validate_dataset(dataset->manifest.dataset);
    *violations = report.size();
    if (report_json) {
      Json arr = Json::array();
      for (const auto& v : report) {
        arr.push_back({{"image_id", v.image_id},
                       {"proposal_id", v.proposal_id},
                       {"rule", v.rule},
                       {"detail", v.detail}});
      }
      *report_json = dup_string(arr.dump());
    }
  });
}

void coseg_featurize_options_default(coseg_featurize_options* options) {
  if (!options) return;
  const coseg::hoi::CylinderBinning b;
  *options = {"3d", nullptr, b.max_radius, b.inner_exclusion_fraction, nullptr};
}

coseg_status coseg_featurize(const coseg_dataset* raw, const coseg_featurize_options* options,
                             coseg_dataset** out) {
  return guarded([&] {
    require(raw && options && out, "null argument");
    coseg::cli::FeaturizeOptions opts;
    opts.mode = coseg::cli::parse_interaction_mode(options->mode ? options->mode : "3d");
    opts.topology = load_topology(options->topology_path);
    opts.binning.max_radius = options->max_radius;
    opts.binning.inner_exclusion_fraction = options->inner_exclusion_fraction;
    opts.binning.check();
    if (options->base_dir) opts.base_dir = options->base_dir;
    coseg::cli::FeaturizeReport report;
    auto result = std::make_unique<coseg_dataset>();
    result->manifest.dataset = coseg::cli::featurize(raw->manifest.dataset, opts, &report);
    Json topology = Json::array();
    for (const auto& [a, b] : opts.topology.parts) topology.push_back({a, b});
    result->manifest.meta = raw->manifest.meta;
    result->manifest.meta["featurizer"] = {
        {"mode", options->mode ? options->mode : "3d"},
        {"max_radius", opts.binning.max_radius},
        {"inner_exclusion_fraction", opts.binning.inner_exclusion_fraction},
        {"topology", opts.mode == coseg::cli::InteractionMode::k3d ? topology : Json::array()},
        {"proposals", report.proposals},
        {"proposals_without_points", report.without_points},
        {"proposals_without_humans", report.without_humans}};
    *out = result.release();
  });
}

void coseg_train_config_default(coseg_train_config* config) {
  if (!config) return;
  const coseg::TrainConfig d;
  *config = {d.k,        0.0,       0.0,          d.reg_lambda,     d.learning_rate,
             d.outer_iters, d.mf_max_sweeps, d.mf_tol, d.epsilon_p, d.variance_floor,
             d.seed,     "top1",    d.convergence_rtol, 1,          1};
}

coseg_status coseg_train(const coseg_dataset* dataset, const coseg_train_config* config,
                         unsigned threads, coseg_model** out) {
  return guarded([&] {
    require(dataset && config && out, "null argument");
    const coseg::TrainConfig cfg = to_config(*config);
    const auto violations = coseg::validate_dataset(dataset->manifest.dataset);
    if (!violations.empty()) {
      const auto& v = violations.front();
      coseg::fail(ErrorKind::kValidation,
                  std::to_string(violations.size()) + " dataset violation(s); first: image '" +
                      v.image_id + "' proposal '" + v.proposal_id + "': " + v.rule + " (" +
                      v.detail + ")");
    }
    *out = new coseg_model{coseg::crf::train(dataset->manifest.dataset, cfg, {threads})};
  });
}

coseg_status coseg_model_save(const coseg_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "null argument");
    coseg::io::save_model(path, model->model);
  });
}

coseg_status coseg_model_load(const char* path, coseg_model** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new coseg_model{coseg::io::load_model(path)};
  });
}

coseg_status coseg_model_write_progress_log(const coseg_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "null argument");
    coseg::io::write_file(path, coseg::io::progress_log(model->model.trace));
  });
}

size_t coseg_model_iterations(const coseg_model* model) {
  return model ? model->model.trace.size() : 0;
}

void coseg_model_free(coseg_model* model) { delete model; }

coseg_status coseg_infer(const coseg_model* model, const coseg_dataset* dataset, unsigned threads,
                         coseg_distributions** out) {
  return guarded([&] {
    require(model && dataset && out, "null argument");
    const auto& ds = dataset->manifest.dataset;
    auto result = std::make_unique<coseg_distributions>();
    result->dist.q = coseg::crf::infer(model->model, ds, {threads});
    result->dist.meta = model_meta(model->model);
    for (const auto& img : ds.images) {
      for (const auto& p : img.proposals) result->dist.keys.push_back({img.image_id, p.proposal_id});
    }
    *out = result.release();
  });
}

coseg_status coseg_distributions_save(const coseg_distributions* d, const char* path) {
  return guarded([&] {
    require(d && path, "null argument");
    std::string text = Json{{"meta", d->dist.meta}}.dump() + "\n";
    const auto labels = coseg::crf::hard_assignment(d->dist.q);
    for (std::size_t i = 0; i < d->dist.keys.size(); ++i) {
      const auto row = d->dist.q.row(i);
      text += Json{{"image_id", d->dist.keys[i].image_id},
                   {"proposal_id", d->dist.keys[i].proposal_id},
                   {"q", std::vector<double>(row.begin(), row.end())},
                   {"argmax", labels[i]}}
                  .dump() +
              "\n";
    }
    coseg::io::write_file(path, text);
  });
}

coseg_status coseg_distributions_load(const char* path, coseg_distributions** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new coseg_distributions{coseg::io::read_distributions(path)};
  });
}

size_t coseg_distributions_rows(const coseg_distributions* d) { return d ? d->dist.q.rows() : 0; }

size_t coseg_distributions_clusters(const coseg_distributions* d) {
  return d ? d->dist.q.cols() : 0;
}

coseg_status coseg_distributions_copy(const coseg_distributions* d, double* buffer,
                                      size_t capacity) {
  return guarded([&] {
    require(d && buffer, "null argument");
    require(capacity >= d->dist.q.data().size(), "buffer too small");
    std::copy(d->dist.q.data().begin(), d->dist.q.data().end(), buffer);
  });
}

void coseg_distributions_free(coseg_distributions* d) { delete d; }

coseg_status coseg_select_foregrounds(const coseg_distributions* d, const coseg_dataset* dataset,
                                      const char* mode, coseg_selections** out) {
  return guarded([&] {
    require(d && dataset && out, "null argument");
    const auto& ds = dataset->manifest.dataset;
    std::size_t i = 0;
    for (const auto& img : ds.images) {
      for (const auto& p : img.proposals) {
        if (i >= d->dist.keys.size() || d->dist.keys[i].image_id != img.image_id ||
            d->dist.keys[i].proposal_id != p.proposal_id) {
          coseg::fail(ErrorKind::kValidation,
                      "distributions do not match the dataset at proposal '" + p.proposal_id + "'");
        }
        ++i;
      }
    }
    if (i != d->dist.keys.size()) {
      coseg::fail(ErrorKind::kValidation, "distributions cover more proposals than the dataset");
    }
    std::string mode_text = mode ? mode : "";
    if (mode_text.empty()) {
      mode_text = d->dist.meta.contains("config")
                      ? d->dist.meta["config"].value("foreground_mode", std::string("top1"))
                      : "top1";
    }
    const auto fg = coseg::parse_foreground_mode(mode_text);
    Json meta = d->dist.meta;
    meta["foreground_mode"] = coseg::to_string(fg);
    const auto selection = coseg::crf::select_foregrounds(d->dist.q, ds, fg);
    *out = new coseg_selections{coseg::io::make_selections(ds, selection, meta)};
  });
}

coseg_status coseg_selections_save(const coseg_selections* s, const char* path) {
  return guarded([&] {
    require(s && path, "null argument");
    coseg::io::write_file(path, coseg::io::selections_to_string(s->sel));
  });
}

coseg_status coseg_selections_load(const char* path, coseg_selections** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new coseg_selections{coseg::io::read_selections(path)};
  });
}

void coseg_selections_free(coseg_selections* s) { delete s; }

coseg_status coseg_evaluate(const coseg_selections* selections, const coseg_dataset* ground_truth,
                            const char* class_name, char** report_json) {
  return guarded([&] {
    require(selections && ground_truth && class_name && report_json, "null argument");
    const auto& images = ground_truth->manifest.dataset.images;
    std::vector<std::vector<coseg::eval::Region>> regions;
    std::vector<coseg::eval::Region> truth;
    std::size_t k = 0;
    for (const auto& rec : selections->sel.images) {
      const auto it = std::find_if(images.begin(), images.end(),
                                   [&](const auto& img) { return img.image_id == rec.image_id; });
      if (it == images.end()) {
        coseg::fail(ErrorKind::kValidation, "no ground truth for image '" + rec.image_id + "'");
      }
      const auto gt = it->ground_truth.find(class_name);
      truth.push_back(gt != it->ground_truth.end() ? gt->second
                                                   : coseg::Mask(it->width, it->height));
      regions.push_back(rec.regions);
      k = std::max(k, rec.regions.size());
    }
    const auto score = coseg::eval::coseg_score(regions, truth, std::max<std::size_t>(k, 1));
    Json per_image = Json::array();
    for (std::size_t i = 0; i < truth.size(); ++i) {
      per_image.push_back(
          {{"image_id", selections->sel.images[i].image_id}, {"iou", score.per_image_iou[i]}});
    }
    const Json report{{"class", class_name},
                      {"score", score.score},
                      {"best_k", score.best_k},
                      {"per_cluster", score.per_cluster},
                      {"per_image", std::move(per_image)},
                      {"meta", selections->sel.meta}};
    *report_json = dup_string(report.dump(1));
  });
}

coseg_status coseg_adjusted_rand_index(const size_t* a, const size_t* b, size_t n, double* out) {
  return guarded([&] {
    require((a && b) || n == 0, "null argument");
    require(out != nullptr, "null argument");
    *out = coseg::eval::adjusted_rand_index({a, n}, {b, n});
  });
}

void coseg_synth_spec_default(coseg_synth_spec* spec) {
  if (!spec) return;
  const coseg::synth::SynthSpec d;
  *spec = {d.k_true,        d.images,          d.proposals_per_image, d.d_f,
           d.d_h,           d.separation,      d.sigma,               d.signal_strength,
           d.interaction_noise, d.image_width, d.image_height,        d.seed};
}

namespace {

coseg::synth::SynthSpec to_spec(const coseg_synth_spec& s) {
  coseg::synth::SynthSpec out;
  out.k_true = s.k_true;
  out.images = s.images;
  out.proposals_per_image = s.proposals_per_image;
  out.d_f = s.d_f;
  out.d_h = s.d_h;
  out.separation = s.separation;
  out.sigma = s.sigma;
  out.signal_strength = s.signal_strength;
  out.interaction_noise = s.interaction_noise;
  out.image_width = s.image_width;
  out.image_height = s.image_height;
  out.seed = s.seed;
  return out;
}

Json spec_to_json(const coseg::synth::SynthSpec& s) {
  return {{"k_true", s.k_true},
          {"images", s.images},
          {"proposals_per_image", s.proposals_per_image},
          {"d_f", s.d_f},
          {"d_h", s.d_h},
          {"separation", s.separation},
          {"sigma", s.sigma},
          {"signal_strength", s.signal_strength},
          {"interaction_noise", s.interaction_noise},
          {"image_width", s.image_width},
          {"image_height", s.image_height},
          {"seed", s.seed}};
}

}  // namespace

coseg_status coseg_synth_generate(const coseg_synth_spec* spec, coseg_dataset** out,
                                  char** planted_json) {
  return guarded([&] {
    require(spec && out, "null argument");
    const auto s = to_spec(*spec);
    auto result = coseg::synth::generate(s);
    auto ds = std::make_unique<coseg_dataset>();
    ds->manifest.meta = {{"synth", spec_to_json(s)}, {"seed", s.seed}};
    if (planted_json) {
      Json labels = Json::array();
      std::size_t i = 0;
      for (const auto& img : result.dataset.images) {
        for (const auto& p : img.proposals) {
          labels.push_back({{"image_id", img.image_id},
                            {"proposal_id", p.proposal_id},
                            {"label", result.planted_labels[i++]}});
        }
      }
      const Json planted{{"spec", spec_to_json(s)},
                         {"seed", s.seed},
                         {"foreground_cluster", result.foreground_cluster},
                         {"ground_truth_class", coseg::synth::kPlantedClass},
                         {"bayes_accuracy", coseg::synth::bayes_accuracy(s)},
                         {"labels", std::move(labels)}};
      *planted_json = dup_string(planted.dump(1));
    }
    ds->manifest.dataset = std::move(result.dataset);
    *out = ds.release();
  });
}

coseg_status coseg_synth_bayes_accuracy(const coseg_synth_spec* spec, double* out) {
  return guarded([&] {
    require(spec && out, "null argument");
    *out = coseg::synth::bayes_accuracy(to_spec(*spec));
  });
}

coseg_status coseg_verify(uint64_t seed, size_t instances, int* all_passed, char** report_json) {
  return guarded([&] {
    require(all_passed != nullptr, "null argument");
    const auto checks = coseg::oracle::run_verification({seed, instances});
    Json arr = Json::array();
    bool ok = true;
    for (const auto& c : checks) {
      ok = ok && c.passed;
      arr.push_back({{"name", c.name},
                     {"passed", c.passed},
                     {"worst", c.worst},
                     {"tolerance", c.tolerance},
                     {"instances", c.instances}});
    }
    *all_passed = ok ? 1 : 0;
    if (report_json) *report_json = dup_string(arr.dump(1));
  });
}

coseg_status coseg_depth_to_points(const double* depth, const unsigned char* mask, int64_t width,
                                   int64_t height, double fx, double fy, double cx, double cy,
                                   double depth_scale, double* points, size_t capacity,
                                   size_t* count) {
  return guarded([&] {
    require(depth && mask && count, "null argument");
    require(width >= 0 && height >= 0, "negative image size");
    const auto total = static_cast<std::size_t>(width * height);
    coseg::cli::DepthMap map{width, height, std::vector<double>(depth, depth + total)};
    std::vector<std::uint64_t> counts;
    bool inside = false;
    std::uint64_t run = 0;
    for (std::size_t i = 0; i < total; ++i) {
      const bool on = mask[i] != 0;
      if (on != inside) {
        counts.push_back(run);
        run = 0;
        inside = on;
      }
      ++run;
    }
    counts.push_back(run);
    const auto m = coseg::Mask::from_counts(width, height, counts);
    const auto pts = coseg::cli::depth_to_points(map, m, {fx, fy, cx, cy, depth_scale});
    *count = pts.size();
    require(pts.size() <= capacity || pts.empty(), "point buffer too small");
    require(points != nullptr || pts.empty(), "null argument");
    for (std::size_t i = 0; i < pts.size(); ++i) {
      points[3 * i] = pts[i].x;
      points[3 * i + 1] = pts[i].y;
      points[3 * i + 2] = pts[i].z;
    }
  });
}

}  // extern "C"
