// Copyright 2026 The TTML Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/* C interface to the ttml library: train, package, quantize, evaluate and run
 * small transfer-learned classifiers stored in .ttml files.
 *
 * Conventions:
 *  - Every fallible call returns a ttml_status. On failure the message is
 *    available from ttml_last_error() on the same thread until the next call.
 *  - Strings returned through char** out-parameters are owned by the caller
 *    and released with ttml_string_free(). Structured results are JSON.
 *  - Configuration is passed as JSON text in the run-config schema documented
 *    in README.md; ttml_config_resolve() builds it from a file plus overrides.
 */
#ifndef TTML_TTML_H_
#define TTML_TTML_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define TTML_API __declspec(dllexport)
#else
#define TTML_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ttml_status {
  TTML_OK = 0,
  TTML_SHAPE_MISMATCH = 1,
  TTML_NON_FINITE = 2,
  TTML_FORMAT_ERROR = 3,
  TTML_VALIDATION_ERROR = 4,
  TTML_INVALID_TRUNCATION = 5,
  TTML_IO_ERROR = 6,
  TTML_DECODE_ERROR = 7,
  TTML_UNSUPPORTED_FORMAT = 8,
  TTML_UNSUPPORTED_ENCODING = 9,
  TTML_EMPTY_AFTER_TRIM = 10,
  TTML_TOO_SHORT = 11,
  TTML_EMPTY_DATASET = 12,
  TTML_STALE_CACHE = 13,
  TTML_CLASS_MISMATCH = 14,
  TTML_DEGENERATE_DATASET = 15,
  TTML_MISSING_LABELS = 16,
  TTML_ALREADY_QUANTIZED = 17,
  TTML_NO_CLASSES = 18,
  TTML_EMPTY_CLASS = 19,
  TTML_MIXED_LAYOUT = 20,
  TTML_PREPROCESSING_MISMATCH = 21,
  TTML_CONFIG_ERROR = 22,
  TTML_INTERNAL = 23,
  TTML_INVALID_ARGUMENT = 24
} ttml_status;

typedef struct ttml_model ttml_model;

/* Progress lines from long-running calls. May be NULL. */
typedef void (*ttml_log_fn)(const char* line, void* user);

TTML_API const char* ttml_version(void);
TTML_API const char* ttml_status_name(ttml_status status);
TTML_API const char* ttml_last_error(void);
TTML_API void ttml_string_free(char* s);

/* Effective run config as JSON: defaults, then the file at `config_path`
 * (may be NULL), then `overrides_json` (may be NULL), validated. */
TTML_API ttml_status ttml_config_resolve(const char* config_path, const char* overrides_json, char** out_json);

/* Dataset manifest for a directory-per-class tree. `task` is "image" or
 * "audio"; ratio and seed apply only to layouts without train/ and val/. */
TTML_API ttml_status ttml_ingest(const char* root, const char* task, double ratio, uint64_t seed, char** out_json);

/* Full pipeline: ingest, extract, train, package, optional quantize, save,
 * evaluate on the validation split and write the report directory. */
TTML_API ttml_status ttml_create(const char* config_json, ttml_log_fn log, void* user, char** out_json);

/* Backbone features for both splits, written to the cache directory. */
TTML_API ttml_status ttml_extract(const char* config_json, ttml_log_fn log, void* user, char** out_json);

/* create, reading features from caches written by ttml_extract. */
TTML_API ttml_status ttml_train(const char* config_json, ttml_log_fn log, void* user, char** out_json);

/* int8 weight quantization of a float .ttml file; result is a size report. */
TTML_API ttml_status ttml_quantize(const char* in_path, const char* out_path, char** out_json);

/* Human-readable manifest of a .ttml file. */
TTML_API ttml_status ttml_inspect(const char* path, char** out_text);

/* Writes a random-weight fixture graph: "mobilenet_v2", "yamnet",
 * "yamnet_top", "dense_classifier", "tiny_image" or "tiny_audio". */
TTML_API ttml_status ttml_write_fixture(const char* kind, uint64_t seed, const char* path);

TTML_API ttml_status ttml_model_load(const char* path, ttml_model** out);
TTML_API void ttml_model_free(ttml_model* model);

/* Name, task, preprocessing id, class labels, input shape and metadata. */
TTML_API ttml_status ttml_model_info(const ttml_model* model, char** out_json);

/* Class probabilities for one media file, preprocessed as the model's
 * metadata prescribes. Audio clips average over their patches. */
TTML_API ttml_status ttml_predict_file(const ttml_model* model, const char* media_path, int threads,
                                       char** out_json);

/* Runs the graph on a caller-supplied input tensor (row-major, NHWC).
 * Writes batch * num_classes probabilities into `probs` when `capacity`
 * allows; `*num_classes` is always set on success. */
TTML_API ttml_status ttml_run(const ttml_model* model, const float* input, const int64_t* shape, size_t rank,
                              float* probs, size_t capacity, size_t* num_classes);

/* Evaluates a model on a dataset directory. `options_json` may be NULL or
 * hold: split ("val" | "train"), aggregation ("auto" | "per_sample" |
 * "per_clip"), ratio, seed, threads, report_dir. Missing ratio/seed come
 * from the model's embedded run config. */
TTML_API ttml_status ttml_evaluate(const ttml_model* model, const char* dataset_dir, const char* options_json,
                                   char** out_json);

#ifdef __cplusplus
}
#endif

#endif /* TTML_TTML_H_ */
