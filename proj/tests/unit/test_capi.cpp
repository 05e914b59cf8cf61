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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "coseg/coseg.h"

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("coseg_capi_" + name)).string();
}

}  // namespace

TEST_CASE("C API pipeline") {
  coseg_synth_spec spec;
  coseg_synth_spec_default(&spec);
  spec.images = 6;
  spec.proposals_per_image = 5;
  coseg_dataset* ds = nullptr;
  char* planted = nullptr;
  REQUIRE(coseg_synth_generate(&spec, &ds, &planted) == COSEG_OK);
  CHECK(coseg_dataset_proposal_count(ds) == 30);
  const auto pj = nlohmann::json::parse(planted);
  CHECK(pj["labels"].size() == 30);
  coseg_string_free(planted);

  size_t violations = 99;
  char* report = nullptr;
  REQUIRE(coseg_dataset_validate(ds, &violations, &report) == COSEG_OK);
  CHECK(violations == 0);
  coseg_string_free(report);

  coseg_train_config cfg;
  coseg_train_config_default(&cfg);
  cfg.outer_iters = 3;
  coseg_model* model = nullptr;
  REQUIRE(coseg_train(ds, &cfg, 2, &model) == COSEG_OK);
  CHECK(coseg_model_iterations(model) >= 1);

  coseg_distributions* dist = nullptr;
  REQUIRE(coseg_infer(model, ds, 2, &dist) == COSEG_OK);
  CHECK(coseg_distributions_rows(dist) == 30);
  CHECK(coseg_distributions_clusters(dist) == 4);
  std::vector<double> q(120);
  CHECK(coseg_distributions_copy(dist, q.data(), q.size()) == COSEG_OK);
  CHECK(coseg_distributions_copy(dist, q.data(), 3) == COSEG_ERR_USAGE);

  coseg_selections* sel = nullptr;
  REQUIRE(coseg_select_foregrounds(dist, ds, nullptr, &sel) == COSEG_OK);
  const std::string path = temp_path("sel.jsonl");
  REQUIRE(coseg_selections_save(sel, path.c_str()) == COSEG_OK);
  coseg_selections* back = nullptr;
  REQUIRE(coseg_selections_load(path.c_str(), &back) == COSEG_OK);
  char* score = nullptr;
  REQUIRE(coseg_evaluate(back, ds, "planted", &score) == COSEG_OK);
  const auto sj = nlohmann::json::parse(score);
  CHECK(sj["score"].get<double>() >= 0.0);
  CHECK(sj["meta"]["config"]["seed"] == 0);
  coseg_string_free(score);
  std::filesystem::remove(path);

  coseg_selections_free(back);
  coseg_selections_free(sel);
  coseg_distributions_free(dist);
  coseg_model_free(model);
  coseg_dataset_free(ds);
}

TEST_CASE("C API errors carry status and message") {
  coseg_dataset* ds = nullptr;
  CHECK(coseg_dataset_load("/nonexistent/manifest.jsonl", &ds) == COSEG_ERR_IO);
  CHECK(std::string(coseg_last_error()).size() > 0);
  CHECK(coseg_dataset_load(nullptr, &ds) == COSEG_ERR_USAGE);

  coseg_synth_spec spec;
  coseg_synth_spec_default(&spec);
  spec.images = 1;
  spec.proposals_per_image = 3;
  REQUIRE(coseg_synth_generate(&spec, &ds, nullptr) == COSEG_OK);
  coseg_train_config cfg;
  coseg_train_config_default(&cfg);
  cfg.k = 5;
  coseg_model* model = nullptr;
  CHECK(coseg_train(ds, &cfg, 1, &model) == COSEG_ERR_USAGE);
  CHECK(std::string(coseg_last_error()).find("K") != std::string::npos);
  cfg.k = 2;
  cfg.foreground_mode = "bogus";
  CHECK(coseg_train(ds, &cfg, 1, &model) == COSEG_ERR_USAGE);
  coseg_dataset_free(ds);
}

TEST_CASE("C API depth helper") {
  const double depth[4] = {0.0, 2000.0, 1000.0, 0.0};
  const unsigned char mask[4] = {1, 1, 1, 0};
  double pts[6];
  size_t count = 0;
  REQUIRE(coseg_depth_to_points(depth, mask, 2, 2, 1.0, 1.0, 0.0, 1.0, 0.001, pts, 2, &count) == COSEG_OK);
  CHECK(count == 2);
  CHECK(pts[0] == doctest::Approx(2.0));  // (u=1, v=0): x = (1 - 0) * 2 / 1
  CHECK(pts[1] == doctest::Approx(-2.0));
  CHECK(pts[2] == doctest::Approx(2.0));
  CHECK(pts[3] == 0.0);
  CHECK(pts[4] == 0.0);
  CHECK(pts[5] == doctest::Approx(1.0));
  CHECK(coseg_depth_to_points(depth, mask, 2, 2, 1.0, 1.0, 0.0, 1.0, 0.001, pts, 1, &count) == COSEG_ERR_USAGE);
}
