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

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "coseg/coseg.h"

namespace {

using Json = nlohmann::json;

// Thrown to unwind with a specific exit status and message.
struct Exit {
  int code;
  std::string message;
};

void check(coseg_status s, const std::string& stage) {
  if (s != COSEG_OK) {
    const int code = s == COSEG_ERR_IO ? 2 : s == COSEG_ERR_INTERNAL ? 3 : static_cast<int>(s);
    throw Exit{code, stage + ": " + coseg_last_error()};
  }
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : ptr(std::exchange(other.ptr, nullptr)) {}
  ~Handle() { Free(ptr); }
  T** out() { return &ptr; }
  T* get() const { return ptr; }
};

using Dataset = Handle<coseg_dataset, coseg_dataset_free>;
using Model = Handle<coseg_model, coseg_model_free>;
using Distributions = Handle<coseg_distributions, coseg_distributions_free>;
using Selections = Handle<coseg_selections, coseg_selections_free>;

struct OwnedString {
  char* ptr = nullptr;
  ~OwnedString() { coseg_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

void write_text(const std::string& path, const std::string& text, const std::string& stage) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << text;
    out.flush();
    if (!out) throw Exit{2, stage + ": cannot write " + path};
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw Exit{2, stage + ": cannot write " + path};
  }
}

std::string read_text(const std::string& path, const std::string& stage) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{2, stage + ": cannot read " + path};
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_delta(const std::string& text, const std::string& flag) {
  if (text == "auto") return 0.0;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size() && v > 0.0) return v;
  } catch (const std::exception&) {
  }
  throw Exit{1, flag + " must be a positive number or 'auto'"};
}

Dataset load_dataset(const std::string& path, const std::string& stage) {
  Dataset d;
  check(coseg_dataset_load(path.c_str(), d.out()), stage);
  return d;
}

struct TrainArgs {
  std::string manifest;
  std::string output = "model.json";
  std::string log;
  std::size_t k = 4;
  std::uint64_t seed = 0;
  std::string delta_f = "auto";
  std::string delta_h = "auto";
  double reg = 1e-3;
  double lr = 5e-4;
  std::size_t outer_iters = 50;
  std::size_t mf_sweeps = 20;
  double mf_tol = 1e-4;
  std::string foreground_mode = "top1";
  unsigned threads = 1;
};

int run_train(const TrainArgs& a) {
  Dataset ds = load_dataset(a.manifest, "train");
  coseg_train_config cfg;
  coseg_train_config_default(&cfg);
  cfg.k = a.k;
  cfg.seed = a.seed;
  cfg.delta_f = parse_delta(a.delta_f, "--delta-f");
  cfg.delta_h = parse_delta(a.delta_h, "--delta-h");
  cfg.reg_lambda = a.reg;
  cfg.learning_rate = a.lr;
  cfg.outer_iters = a.outer_iters;
  cfg.mf_max_sweeps = a.mf_sweeps;
  cfg.mf_tol = a.mf_tol;
  cfg.foreground_mode = a.foreground_mode.c_str();
  Model model;
  check(coseg_train(ds.get(), &cfg, a.threads, model.out()), "train");
  check(coseg_model_save(model.get(), a.output.c_str()), "train");
  const std::string log = a.log.empty() ? a.output + ".log" : a.log;
  check(coseg_model_write_progress_log(model.get(), log.c_str()), "train");
  std::cerr << "trained " << coseg_model_iterations(model.get()) << " iterations -> " << a.output
            << "\n";
  return 0;
}

struct InferArgs {
  std::string model;
  std::string manifest;
  std::string output = "distributions.jsonl";
  std::string selections = "selections.jsonl";
  std::string foreground_mode;
  unsigned threads = 1;
};

int run_infer(const InferArgs& a) {
  Model model;
  check(coseg_model_load(a.model.c_str(), model.out()), "infer");
  Dataset ds = load_dataset(a.manifest, "infer");
  Distributions dist;
  check(coseg_infer(model.get(), ds.get(), a.threads, dist.out()), "infer");
  check(coseg_distributions_save(dist.get(), a.output.c_str()), "infer");
  Selections sel;
  check(coseg_select_foregrounds(dist.get(), ds.get(),
                                 a.foreground_mode.empty() ? nullptr : a.foreground_mode.c_str(),
                                 sel.out()),
        "infer");
  check(coseg_selections_save(sel.get(), a.selections.c_str()), "infer");
  return 0;
}

struct EvalArgs {
  std::string selections;
  std::string ground_truth;
  std::string class_name = "planted";
  std::string labels;
  std::string distributions;
  std::string output = "score.json";
};

std::vector<std::size_t> hard_labels(const coseg_distributions* d) {
  const std::size_t n = coseg_distributions_rows(d);
  const std::size_t k = coseg_distributions_clusters(d);
  std::vector<double> q(n * k);
  check(coseg_distributions_copy(d, q.data(), q.size()), "eval");
  std::vector<std::size_t> out(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 1; c < k; ++c) {
      if (q[i * k + c] > q[i * k + out[i]]) out[i] = c;
    }
  }
  return out;
}

int run_eval(const EvalArgs& a) {
  Selections sel;
  check(coseg_selections_load(a.selections.c_str(), sel.out()), "eval");
  Dataset gt = load_dataset(a.ground_truth, "eval");
  OwnedString report;
  check(coseg_evaluate(sel.get(), gt.get(), a.class_name.c_str(), &report.ptr), "eval");
  Json out = Json::parse(report.str());
  if (!a.labels.empty() || !a.distributions.empty()) {
    if (a.labels.empty() || a.distributions.empty()) {
      throw Exit{1, "eval: --labels and --distributions must be given together"};
    }
    Distributions dist;
    check(coseg_distributions_load(a.distributions.c_str(), dist.out()), "eval");
    const auto predicted = hard_labels(dist.get());
    Json planted;
    try {
      planted = Json::parse(read_text(a.labels, "eval"));
    } catch (const Json::exception& e) {
      throw Exit{2, std::string("eval: labels file: ") + e.what()};
    }
    std::vector<std::size_t> truth;
    for (const auto& row : planted.at("labels")) truth.push_back(row.at("label").get<std::size_t>());
    if (truth.size() != predicted.size()) {
      throw Exit{2, "eval: labels cover " + std::to_string(truth.size()) +
                        " proposals but distributions cover " + std::to_string(predicted.size())};
    }
    double ari = 0.0;
    check(coseg_adjusted_rand_index(truth.data(), predicted.data(), truth.size(), &ari), "eval");
    out["adjusted_rand_index"] = ari;
  }
  write_text(a.output, out.dump(1) + "\n", "eval");
  std::cout << "score " << out["score"].get<double>() << "\n";
  if (out.contains("adjusted_rand_index")) {
    std::cout << "ari " << out["adjusted_rand_index"].get<double>() << "\n";
  }
  return 0;
}

struct SynthArgs {
  std::size_t k_true = 3;
  std::size_t images = 20;
  std::size_t proposals_per_image = 10;
  std::size_t d_f = 8;
  std::size_t d_h = 15;
  double separation = 6.0;
  double sigma = 1.0;
  double signal = 1.0;
  std::uint64_t seed = 0;
  std::string output = "synth.jsonl";
  std::string planted;
};

int run_synth(const SynthArgs& a) {
  coseg_synth_spec spec;
  coseg_synth_spec_default(&spec);
  spec.k_true = a.k_true;
  spec.images = a.images;
  spec.proposals_per_image = a.proposals_per_image;
  spec.d_f = a.d_f;
  spec.d_h = a.d_h;
  spec.separation = a.separation;
  spec.sigma = a.sigma;
  spec.signal_strength = a.signal;
  spec.seed = a.seed;
  Dataset ds;
  OwnedString planted;
  check(coseg_synth_generate(&spec, ds.out(), &planted.ptr), "synth");
  check(coseg_dataset_save(ds.get(), a.output.c_str()), "synth");
  const std::string planted_path = a.planted.empty() ? a.output + ".planted.json" : a.planted;
  write_text(planted_path, planted.str() + "\n", "synth");
  return 0;
}

struct FeaturizeArgs {
  std::string manifest;
  std::string output = "featurized.jsonl";
  std::string mode = "3d";
  std::string topology;
  std::string base_dir;
  std::optional<double> max_radius;
  std::optional<double> inner_fraction;
};

int run_featurize(const FeaturizeArgs& a) {
  Dataset raw = load_dataset(a.manifest, "featurize");
  coseg_featurize_options opts;
  coseg_featurize_options_default(&opts);
  opts.mode = a.mode.c_str();
  if (!a.topology.empty()) opts.topology_path = a.topology.c_str();
  if (!a.base_dir.empty()) opts.base_dir = a.base_dir.c_str();
  if (a.max_radius) opts.max_radius = *a.max_radius;
  if (a.inner_fraction) opts.inner_exclusion_fraction = *a.inner_fraction;
  Dataset out;
  check(coseg_featurize(raw.get(), &opts, out.out()), "featurize");
  check(coseg_dataset_save(out.get(), a.output.c_str()), "featurize");
  return 0;
}

int run_validate(const std::string& manifest) {
  Dataset ds = load_dataset(manifest, "validate");
  std::size_t count = 0;
  OwnedString report;
  check(coseg_dataset_validate(ds.get(), &count, &report.ptr), "validate");
  if (count == 0) {
    std::cout << "ok: " << coseg_dataset_image_count(ds.get()) << " images, "
              << coseg_dataset_proposal_count(ds.get()) << " proposals\n";
    return 0;
  }
  for (const auto& v : Json::parse(report.str())) {
    std::cerr << v["image_id"].get<std::string>() << "/" << v["proposal_id"].get<std::string>()
              << ": " << v["rule"].get<std::string>() << " (" << v["detail"].get<std::string>()
              << ")\n";
  }
  std::cerr << "validate: " << count << " violation(s)\n";
  return 2;
}

int run_verify(std::uint64_t seed, std::size_t instances, const std::string& output) {
  int passed = 0;
  OwnedString report;
  check(coseg_verify(seed, instances, &passed, &report.ptr), "verify");
  const Json checks = Json::parse(report.str());
  for (const auto& c : checks) {
    std::cout << (c["passed"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>()
              << " worst=" << c["worst"].get<double>() << " tol=" << c["tolerance"].get<double>()
              << "\n";
  }
  if (!output.empty()) {
    write_text(output, Json{{"seed", seed}, {"instances", instances}, {"checks", checks}}.dump(1) + "\n",
               "verify");
  }
  return passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised object co-segmentation with a CRF auto-encoder"};
  app.require_subcommand(1);
  app.set_version_flag("--version", coseg_version());

  FeaturizeArgs fa;
  auto* featurize = app.add_subcommand("featurize", "Compute interaction features for a raw manifest");
  featurize->add_option("manifest", fa.manifest, "Raw manifest")->required();
  featurize->add_option("--output,-o", fa.output);
  featurize->add_option("--mode", fa.mode)->check(CLI::IsMember({"3d", "2d"}));
  featurize->add_option("--topology", fa.topology, "JSON list of [start, end] joint pairs");
  featurize->add_option("--base-dir", fa.base_dir, "Directory for relative depth paths");
  featurize->add_option("--max-radius", fa.max_radius);
  featurize->add_option("--inner-fraction", fa.inner_fraction);

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Train the model on a featurized manifest");
  train->add_option("manifest", ta.manifest)->required();
  train->add_option("--output,-o", ta.output);
  train->add_option("--log", ta.log, "Progress log (default: <output>.log)");
  train->add_option("--k", ta.k)->check(CLI::PositiveNumber);
  train->add_option("--seed", ta.seed);
  train->add_option("--delta-f", ta.delta_f);
  train->add_option("--delta-h", ta.delta_h);
  train->add_option("--reg", ta.reg);
  train->add_option("--lr", ta.lr);
  train->add_option("--outer-iters", ta.outer_iters);
  train->add_option("--mf-sweeps", ta.mf_sweeps);
  train->add_option("--mf-tol", ta.mf_tol);
  train->add_option("--foreground-mode", ta.foreground_mode)->check(CLI::IsMember({"top1", "union"}));
  train->add_option("--threads", ta.threads)->check(CLI::PositiveNumber);

  InferArgs ia;
  auto* infer = app.add_subcommand("infer", "Compute distributions and foreground selections");
  infer->add_option("model", ia.model)->required();
  infer->add_option("manifest", ia.manifest)->required();
  infer->add_option("--output,-o", ia.output);
  infer->add_option("--selections", ia.selections);
  infer->add_option("--foreground-mode", ia.foreground_mode)->check(CLI::IsMember({"top1", "union"}));
  infer->add_option("--threads", ia.threads)->check(CLI::PositiveNumber);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Score selections against ground truth");
  eval->add_option("selections", ea.selections)->required();
  eval->add_option("ground_truth", ea.ground_truth, "Manifest carrying ground-truth masks")->required();
  eval->add_option("--class", ea.class_name);
  eval->add_option("--labels", ea.labels, "Planted labels from synth");
  eval->add_option("--distributions", ea.distributions);
  eval->add_option("--output,-o", ea.output);

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic featurized manifest");
  synth->add_option("--k-true", sa.k_true);
  synth->add_option("--images", sa.images);
  synth->add_option("--proposals-per-image", sa.proposals_per_image);
  synth->add_option("--d-f", sa.d_f);
  synth->add_option("--d-h", sa.d_h);
  synth->add_option("--separation", sa.separation);
  synth->add_option("--sigma", sa.sigma);
  synth->add_option("--signal", sa.signal);
  synth->add_option("--seed", sa.seed);
  synth->add_option("--output,-o", sa.output);
  synth->add_option("--planted", sa.planted, "Planted truth (default: <output>.planted.json)");

  std::uint64_t verify_seed = 0;
  std::size_t verify_instances = 10;
  std::string verify_output;
  auto* verify = app.add_subcommand("verify", "Check inference against exact enumeration");
  verify->add_option("--seed", verify_seed);
  verify->add_option("--instances", verify_instances)->check(CLI::PositiveNumber);
  verify->add_option("--output,-o", verify_output);

  std::string validate_manifest;
  auto* validate = app.add_subcommand("validate", "Check a manifest against the data invariants");
  validate->add_option("manifest", validate_manifest)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*featurize) return run_featurize(fa);
    if (*train) return run_train(ta);
    if (*infer) return run_infer(ia);
    if (*eval) return run_eval(ea);
    if (*synth) return run_synth(sa);
    if (*verify) return run_verify(verify_seed, verify_instances, verify_output);
    if (*validate) return run_validate(validate_manifest);
  } catch (const Exit& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}
