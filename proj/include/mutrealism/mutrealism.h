// Copyright 2026 The Mutrealism Authors
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

#ifndef MUTREALISM_MUTREALISM_H_
#define MUTREALISM_MUTREALISM_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(MUTREALISM_BUILDING_LIBRARY)
#define MUTREALISM_API __declspec(dllexport)
#else
#define MUTREALISM_API __declspec(dllimport)
#endif
#else
#define MUTREALISM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. The first five double as CLI exit codes. */
typedef enum mr_status {
  MR_OK = 0,
  MR_ERROR = 1,
  MR_MANIFEST_INVALID = 2,
  MR_SCREENING_BLOCK = 3,
  MR_SUBJECT_UNTRAINABLE = 4,
  MR_INVALID_ARGUMENT = 10,
  MR_IO = 11,
  MR_SHAPE_MISMATCH = 12,
  MR_DOMAIN_MISMATCH = 13,
  MR_NO_OBSERVABLE_BEHAVIOR = 14,
  MR_SCHEMA = 15,
  MR_INTERNAL = 16
} mr_status;

typedef struct mr_context mr_context;
typedef struct mr_manifest mr_manifest;
typedef struct mr_report mr_report;

MUTREALISM_API const char* mr_version(void);
MUTREALISM_API const char* mr_status_name(mr_status status);

/* Message of the last failed call on this thread; empty after a success. */
MUTREALISM_API const char* mr_last_error(void);

/* Run options. Unset options fall back to the manifest. */
MUTREALISM_API mr_status mr_context_create(mr_context** out);
MUTREALISM_API void mr_context_destroy(mr_context* ctx);
MUTREALISM_API mr_status mr_context_set_jobs(mr_context* ctx, size_t jobs);
MUTREALISM_API mr_status mr_context_set_cache_enabled(mr_context* ctx, int enabled);
MUTREALISM_API mr_status mr_context_set_cache_dir(mr_context* ctx, const char* dir);
MUTREALISM_API mr_status mr_context_set_override_screening(mr_context* ctx, int enabled);
/* "auto", "accuracy" or "loss". */
MUTREALISM_API mr_status mr_context_set_oracle_mode(mr_context* ctx, const char* mode);
/* Line-delimited JSON events on stderr when enabled. */
MUTREALISM_API mr_status mr_context_set_log_stderr(mr_context* ctx, int enabled);

MUTREALISM_API mr_status mr_manifest_load(const char* path, mr_manifest** out);
MUTREALISM_API mr_status mr_manifest_parse(const char* json_text, const char* base_dir,
                                           mr_manifest** out);
/* Loads every dataset and resolves every job without training. */
MUTREALISM_API mr_status mr_manifest_validate(const mr_manifest* manifest);
MUTREALISM_API const char* mr_manifest_hash(const mr_manifest* manifest);
MUTREALISM_API const char* mr_manifest_output_dir(const mr_manifest* manifest);
MUTREALISM_API size_t mr_manifest_bug_count(const mr_manifest* manifest);
MUTREALISM_API void mr_manifest_destroy(mr_manifest* manifest);

MUTREALISM_API mr_status mr_run(const mr_context* ctx, const mr_manifest* manifest,
                                mr_report** out);
/* Removes the cache directory selected by ctx and manifest; ctx may be NULL. */
MUTREALISM_API mr_status mr_clean_cache(const mr_context* ctx, const mr_manifest* manifest);

/* metrics.csv and report.json. */
MUTREALISM_API mr_status mr_report_write(const mr_report* report, const char* dir);
/* Boxplot JSON per bug and metric, winner CSV per metric, under dir/plots. */
MUTREALISM_API mr_status mr_report_emit_plots(const mr_report* report, const char* dir);
MUTREALISM_API mr_status mr_report_load(const char* path, mr_report** out);
MUTREALISM_API size_t mr_report_row_count(const mr_report* report);
MUTREALISM_API size_t mr_report_trainings_executed(const mr_report* report);
MUTREALISM_API size_t mr_report_cache_hits(const mr_report* report);
/* Owned by the report; valid until it is destroyed. */
MUTREALISM_API const char* mr_report_summary(const mr_report* report);
MUTREALISM_API const char* mr_report_metrics_csv(const mr_report* report);
MUTREALISM_API void mr_report_destroy(mr_report* report);

/* cells: tests x n row-major killing inputs (0 or 1); out: tests values. */
MUTREALISM_API mr_status mr_killing_probability(const uint8_t* cells, size_t tests, size_t n,
                                                double* out);
/* *defined is 0 when the denominator is zero; *value is then 0. */
MUTREALISM_API mr_status mr_coupling_strength(const double* kp_mutant, const double* kp_fault,
                                              size_t length, double* value, int* defined);
MUTREALISM_API mr_status mr_behavioral_similarity(const double* kp_mutant,
                                                  const double* kp_fault, size_t length,
                                                  double* value, int* defined);

#ifdef __cplusplus
}
#endif

#endif
