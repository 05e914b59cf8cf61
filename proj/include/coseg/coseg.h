/* Copyright 2026 The coseg Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/*
 * coseg: unsupervised object co-segmentation with a fully connected CRF
 * auto-encoder.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a coseg_status; on
 * failure, coseg_last_error() returns a message for the calling thread that
 * stays valid until the next failing call on that thread. Strings returned
 * through char** out-parameters are allocated by the library and released
 * with coseg_string_free.
 */
#ifndef COSEG_COSEG_H_
#define COSEG_COSEG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(COSEG_BUILDING_LIBRARY)
#define COSEG_API __attribute__((visibility("default")))
#else
#define COSEG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Values 0 to 3 match the CLI exit codes. The CLI reports IO as 2 and INTERNAL as 3. */
typedef enum coseg_status {
  COSEG_OK = 0,
  COSEG_ERR_USAGE = 1,
  COSEG_ERR_VALIDATION = 2,
  COSEG_ERR_NUMERICAL = 3,
  COSEG_ERR_IO = 4,
  COSEG_ERR_INTERNAL = 5
} coseg_status;

typedef struct coseg_dataset coseg_dataset;
typedef struct coseg_model coseg_model;
typedef struct coseg_distributions coseg_distributions;
typedef struct coseg_selections coseg_selections;

COSEG_API const char* coseg_last_error(void);
COSEG_API const char* coseg_version(void);
COSEG_API void coseg_string_free(char* s);

/* ---- datasets ---------------------------------------------------------- */

COSEG_API coseg_status coseg_dataset_load(const char* path, coseg_dataset** out);
COSEG_API coseg_status coseg_dataset_save(const coseg_dataset* dataset, const char* path);
COSEG_API void coseg_dataset_free(coseg_dataset* dataset);
COSEG_API size_t coseg_dataset_image_count(const coseg_dataset* dataset);
COSEG_API size_t coseg_dataset_proposal_count(const coseg_dataset* dataset);

/* Writes a JSON array of violations to *report_json and their count to
 * *violations. A dataset with violations is not an error. */
COSEG_API coseg_status coseg_dataset_validate(const coseg_dataset* dataset, size_t* violations,
                                              char** report_json);

typedef struct coseg_featurize_options {
  const char* mode;           /* "3d" or "2d" */
  const char* topology_path;  /* JSON [[start, end], ...]; NULL = 18-part default */
  double max_radius;          /* meters */
  double inner_exclusion_fraction;
  const char* base_dir;       /* for relative depth paths; NULL = "." */
} coseg_featurize_options;

COSEG_API void coseg_featurize_options_default(coseg_featurize_options* options);
COSEG_API coseg_status coseg_featurize(const coseg_dataset* raw,
                                       const coseg_featurize_options* options,
                                       coseg_dataset** out);

/* ---- training ---------------------------------------------------------- */

typedef struct coseg_train_config {
  size_t k;
  double delta_f; /* <= 0 means estimate from data */
  double delta_h;
  double reg_lambda;
  double learning_rate;
  size_t outer_iters;
  size_t mf_max_sweeps;
  double mf_tol;
  double epsilon_p;
  double variance_floor;
  uint64_t seed;
  const char* foreground_mode; /* "top1" or "union" */
  double convergence_rtol;
  int use_pairwise;
  int learn_encoder;
} coseg_train_config;

COSEG_API void coseg_train_config_default(coseg_train_config* config);

/* threads caps the worker count; results do not depend on it. */
COSEG_API coseg_status coseg_train(const coseg_dataset* dataset, const coseg_train_config* config,
                                   unsigned threads, coseg_model** out);
COSEG_API coseg_status coseg_model_save(const coseg_model* model, const char* path);
COSEG_API coseg_status coseg_model_load(const char* path, coseg_model** out);
COSEG_API coseg_status coseg_model_write_progress_log(const coseg_model* model, const char* path);
COSEG_API size_t coseg_model_iterations(const coseg_model* model);
COSEG_API void coseg_model_free(coseg_model* model);

/* ---- inference --------------------------------------------------------- */

COSEG_API coseg_status coseg_infer(const coseg_model* model, const coseg_dataset* dataset,
                                   unsigned threads, coseg_distributions** out);
COSEG_API coseg_status coseg_distributions_save(const coseg_distributions* d, const char* path);
COSEG_API coseg_status coseg_distributions_load(const char* path, coseg_distributions** out);
COSEG_API size_t coseg_distributions_rows(const coseg_distributions* d);
COSEG_API size_t coseg_distributions_clusters(const coseg_distributions* d);
/* Row-major N x K copy into `buffer` of at least rows * clusters doubles. */
COSEG_API coseg_status coseg_distributions_copy(const coseg_distributions* d, double* buffer,
                                                size_t capacity);
COSEG_API void coseg_distributions_free(coseg_distributions* d);

/* mode: "top1", "union", or NULL for the model's configured mode. */
COSEG_API coseg_status coseg_select_foregrounds(const coseg_distributions* d,
                                                const coseg_dataset* dataset, const char* mode,
                                                coseg_selections** out);
COSEG_API coseg_status coseg_selections_save(const coseg_selections* s, const char* path);
COSEG_API coseg_status coseg_selections_load(const char* path, coseg_selections** out);
COSEG_API void coseg_selections_free(coseg_selections* s);

/* ---- evaluation -------------------------------------------------------- */

/* Scores selections against the ground-truth class `class_name` of the
 * dataset's images. Writes a JSON score report. Images missing the class
 * count as empty ground truth. */
COSEG_API coseg_status coseg_evaluate(const coseg_selections* selections,
                                      const coseg_dataset* ground_truth, const char* class_name,
                                      char** report_json);

COSEG_API coseg_status coseg_adjusted_rand_index(const size_t* a, const size_t* b, size_t n,
                                                 double* out);

/* ---- synthetic data and verification ----------------------------------- */

typedef struct coseg_synth_spec {
  size_t k_true;
  size_t images;
  size_t proposals_per_image;
  size_t d_f;
  size_t d_h;
  double separation;
  double sigma;
  double signal_strength;
  double interaction_noise;
  int64_t image_width;
  int64_t image_height;
  uint64_t seed;
} coseg_synth_spec;

COSEG_API void coseg_synth_spec_default(coseg_synth_spec* spec);
/* Writes the planted labels, foreground cluster, and Bayes accuracy as a
 * JSON document to *planted_json. */
COSEG_API coseg_status coseg_synth_generate(const coseg_synth_spec* spec, coseg_dataset** out,
                                            char** planted_json);
COSEG_API coseg_status coseg_synth_bayes_accuracy(const coseg_synth_spec* spec, double* out);

/* Runs the oracle agreement suite; *all_passed is 1 when every check
 * passes. The report is a JSON array of checks. */
COSEG_API coseg_status coseg_verify(uint64_t seed, size_t instances, int* all_passed,
                                    char** report_json);

/* ---- geometry helpers -------------------------------------------------- */

/* Back-projects the pixels with nonzero `mask` entries (row-major,
 * width * height bytes) into `points` (x, y, z triples). On return
 * *count holds the number of points; when it exceeds `capacity` points
 * nothing is written and COSEG_ERR_USAGE is returned. */
COSEG_API coseg_status coseg_depth_to_points(const double* depth, const unsigned char* mask,
                                             int64_t width, int64_t height, double fx, double fy,
                                             double cx, double cy, double depth_scale,
                                             double* points, size_t capacity, size_t* count);

#ifdef __cplusplus
}
#endif

#endif /* COSEG_COSEG_H_ */
