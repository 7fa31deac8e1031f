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

#include "mutrealism/mutrealism.h"

#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <span>
#include <string>

#include "mutrealism/error.hpp"
#include "mutrealism/manifest.hpp"
#include "mutrealism/metrics.hpp"
#include "mutrealism/pipeline.hpp"
#include "mutrealism/report.hpp"

struct mr_context {
  mutrealism::RunOptions options;
  bool log_stderr = false;
};

struct mr_manifest {
  mutrealism::ExperimentManifest manifest;
  std::string output_dir;
};

struct mr_report {
  mutrealism::RealismReport report;
  mutrealism::RunStats stats;
  std::string summary;
  std::string csv;
};

namespace {

thread_local std::string g_last_error;

mr_status status_of(mutrealism::ErrorCode code) {
  using mutrealism::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return MR_INVALID_ARGUMENT;
    case ErrorCode::kManifestInvalid: return MR_MANIFEST_INVALID;
    case ErrorCode::kScreeningBlock: return MR_SCREENING_BLOCK;
    case ErrorCode::kSubjectUntrainable: return MR_SUBJECT_UNTRAINABLE;
    case ErrorCode::kIo: return MR_IO;
    case ErrorCode::kShapeMismatch: return MR_SHAPE_MISMATCH;
    case ErrorCode::kDomainMismatch: return MR_DOMAIN_MISMATCH;
    case ErrorCode::kNoObservableBehavior: return MR_NO_OBSERVABLE_BEHAVIOR;
    case ErrorCode::kSchema: return MR_SCHEMA;
    case ErrorCode::kInternal: return MR_INTERNAL;
  }
  return MR_ERROR;
}

mr_status fail(mr_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

/// Runs `body`, translating exceptions into status codes.
template <typename F>
mr_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return MR_OK;
  } catch (const mutrealism::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(MR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MR_ERROR, e.what());
  }
}

#define MR_REQUIRE(cond, what) \
  if (!(cond)) return fail(MR_INVALID_ARGUMENT, what)

mr_report* new_report(mutrealism::RealismReport report, mutrealism::RunStats stats) {
  auto* r = new mr_report{std::move(report), stats, {}, {}};
  r->summary = mutrealism::summary_text(r->report);
  r->csv = mutrealism::metrics_csv(r->report);
  return r;
}

mr_status score(const double* m, const double* f, size_t length, double* value, int* defined,
                mutrealism::Score (*fn)(std::span<const double>, std::span<const double>)) {
  MR_REQUIRE((m && f) || length == 0, "null KP vector");
  MR_REQUIRE(value && defined, "null output pointer");
  return guarded([&] {
    auto s = fn(std::span<const double>(m, length), std::span<const double>(f, length));
    *value = s.reported();
    *defined = s.defined ? 1 : 0;
  });
}

}  // namespace

extern "C" {

const char* mr_version(void) { return MUTREALISM_VERSION; }

const char* mr_status_name(mr_status status) {
  switch (status) {
    case MR_OK: return "ok";
    case MR_ERROR: return "error";
    case MR_MANIFEST_INVALID: return "manifest invalid";
    case MR_SCREENING_BLOCK: return "screening block";
    case MR_SUBJECT_UNTRAINABLE: return "subject untrainable";
    case MR_INVALID_ARGUMENT: return "invalid argument";
    case MR_IO: return "i/o error";
    case MR_SHAPE_MISMATCH: return "shape mismatch";
    case MR_DOMAIN_MISMATCH: return "domain mismatch";
    case MR_NO_OBSERVABLE_BEHAVIOR: return "no observable behavior";
    case MR_SCHEMA: return "schema error";
    case MR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* mr_last_error(void) { return g_last_error.c_str(); }

mr_status mr_context_create(mr_context** out) {
  MR_REQUIRE(out, "null output pointer");
  return guarded([&] { *out = new mr_context(); });
}

void mr_context_destroy(mr_context* ctx) { delete ctx; }

mr_status mr_context_set_jobs(mr_context* ctx, size_t jobs) {
  MR_REQUIRE(ctx, "null context");
  MR_REQUIRE(jobs >= 1, "jobs must be >= 1");
  ctx->options.jobs = jobs;
  return guarded([] {});
}

mr_status mr_context_set_cache_enabled(mr_context* ctx, int enabled) {
  MR_REQUIRE(ctx, "null context");
  ctx->options.cache_enabled = enabled != 0;
  return guarded([] {});
}

mr_status mr_context_set_cache_dir(mr_context* ctx, const char* dir) {
  MR_REQUIRE(ctx && dir && *dir, "null context or empty directory");
  ctx->options.cache_dir = std::filesystem::path(dir);
  return guarded([] {});
}

mr_status mr_context_set_override_screening(mr_context* ctx, int enabled) {
  MR_REQUIRE(ctx, "null context");
  ctx->options.override_screening = enabled != 0;
  return guarded([] {});
}

mr_status mr_context_set_oracle_mode(mr_context* ctx, const char* mode) {
  MR_REQUIRE(ctx && mode, "null context or mode");
  const std::string_view m(mode);
  MR_REQUIRE(m == "auto" || m == "accuracy" || m == "loss", "oracle mode must be auto, accuracy or loss");
  return guarded([&] { ctx->options.oracle_mode = mutrealism::parse_oracle_mode(m); });
}

mr_status mr_context_set_log_stderr(mr_context* ctx, int enabled) {
  MR_REQUIRE(ctx, "null context");
  ctx->log_stderr = enabled != 0;
  return guarded([] {});
}

mr_status mr_manifest_load(const char* path, mr_manifest** out) {
  MR_REQUIRE(path && out, "null argument");
  return guarded([&] {
    auto m = mutrealism::load_manifest(path);
    std::string dir = m.output_dir.string();
    *out = new mr_manifest{std::move(m), std::move(dir)};
  });
}

mr_status mr_manifest_parse(const char* json_text, const char* base_dir, mr_manifest** out) {
  MR_REQUIRE(json_text && out, "null argument");
  return guarded([&] {
    mutrealism::Json j;
    try {
      j = mutrealism::Json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
      throw mutrealism::Error(mutrealism::ErrorCode::kManifestInvalid,
                              std::string("manifest is not valid JSON: ") + e.what());
    }
    auto m = mutrealism::parse_manifest(j, base_dir ? base_dir : ".");
    std::string dir = m.output_dir.string();
    *out = new mr_manifest{std::move(m), std::move(dir)};
  });
}

mr_status mr_manifest_validate(const mr_manifest* manifest) {
  MR_REQUIRE(manifest, "null manifest");
  return guarded([&] { mutrealism::validate_experiment(manifest->manifest); });
}

const char* mr_manifest_hash(const mr_manifest* manifest) {
  return manifest ? manifest->manifest.hash.c_str() : "";
}

const char* mr_manifest_output_dir(const mr_manifest* manifest) {
  return manifest ? manifest->output_dir.c_str() : "";
}

size_t mr_manifest_bug_count(const mr_manifest* manifest) {
  return manifest ? manifest->manifest.bugs.size() : 0;
}

void mr_manifest_destroy(mr_manifest* manifest) { delete manifest; }

mr_status mr_run(const mr_context* ctx, const mr_manifest* manifest, mr_report** out) {
  MR_REQUIRE(manifest && out, "null argument");
  return guarded([&] {
    mutrealism::RunOptions options;
    if (ctx) {
      options = ctx->options;
      options.log = ctx->log_stderr ? &std::cerr : nullptr;
    }
    auto result = mutrealism::run_experiment(manifest->manifest, options);
    *out = new_report(std::move(result.report), result.stats);
  });
}

mr_status mr_clean_cache(const mr_context* ctx, const mr_manifest* manifest) {
  MR_REQUIRE(manifest, "null manifest");
  return guarded([&] {
    std::filesystem::path dir = manifest->manifest.cache_dir;
    if (ctx && ctx->options.cache_dir) dir = *ctx->options.cache_dir;
    std::filesystem::remove_all(dir);
  });
}

mr_status mr_report_write(const mr_report* report, const char* dir) {
  MR_REQUIRE(report && dir, "null argument");
  return guarded([&] { mutrealism::write_report(report->report, dir); });
}

mr_status mr_report_emit_plots(const mr_report* report, const char* dir) {
  MR_REQUIRE(report && dir, "null argument");
  return guarded([&] { mutrealism::emit_plots_data(report->report, dir); });
}

mr_status mr_report_load(const char* path, mr_report** out) {
  MR_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new_report(mutrealism::load_report(path), {}); });
}

size_t mr_report_row_count(const mr_report* report) {
  return report ? report->report.rows.size() : 0;
}

size_t mr_report_trainings_executed(const mr_report* report) {
  return report ? report->stats.trainings : 0;
}

size_t mr_report_cache_hits(const mr_report* report) {
  return report ? report->stats.cache_hits : 0;
}

const char* mr_report_summary(const mr_report* report) {
  return report ? report->summary.c_str() : "";
}

const char* mr_report_metrics_csv(const mr_report* report) {
  return report ? report->csv.c_str() : "";
}

void mr_report_destroy(mr_report* report) { delete report; }

mr_status mr_killing_probability(const uint8_t* cells, size_t tests, size_t n, double* out) {
  MR_REQUIRE(n >= 1, "n must be >= 1");
  MR_REQUIRE((cells && out) || tests == 0, "null argument");
  for (size_t k = 0; k < tests * n; ++k) MR_REQUIRE(cells[k] <= 1, "cells must be 0 or 1");
  return guarded([&] {
    mutrealism::ExecutionMatrix m;
    m.tests = tests;
    m.n_declared = n;
    m.columns.resize(n);
    std::iota(m.columns.begin(), m.columns.end(), size_t{0});
    m.cells.assign(cells, cells + tests * n);
    auto kp = mutrealism::killing_probability(m);
    std::copy(kp.values.begin(), kp.values.end(), out);
  });
}

mr_status mr_coupling_strength(const double* kp_mutant, const double* kp_fault, size_t length,
                               double* value, int* defined) {
  return score(kp_mutant, kp_fault, length, value, defined, &mutrealism::coupling_strength);
}

mr_status mr_behavioral_similarity(const double* kp_mutant, const double* kp_fault,
                                   size_t length, double* value, int* defined) {
  return score(kp_mutant, kp_fault, length, value, defined, &mutrealism::behavioral_similarity);
}

}  // extern "C"
