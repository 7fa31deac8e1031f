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

// Command-line front end over the C API.
//
//   mutrealism validate    --manifest M
//   mutrealism run         --manifest M [--out DIR] [--jobs N] [--no-cache]
//                          [--override-screening] [--oracle MODE] [--quiet]
//   mutrealism report      (--out DIR | --manifest M)
//   mutrealism clean-cache --manifest M [--cache-dir DIR]
//
// Exit codes: 0 success, 2 manifest invalid, 3 screening block, 4 subject
// untrainable, 1 anything else.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <string>

#include "mutrealism/mutrealism.h"

namespace {

using Json = nlohmann::ordered_json;

struct ContextDeleter {
  void operator()(mr_context* c) const { mr_context_destroy(c); }
};
struct ManifestDeleter {
  void operator()(mr_manifest* m) const { mr_manifest_destroy(m); }
};
struct ReportDeleter {
  void operator()(mr_report* r) const { mr_report_destroy(r); }
};
using ContextPtr = std::unique_ptr<mr_context, ContextDeleter>;
using ManifestPtr = std::unique_ptr<mr_manifest, ManifestDeleter>;
using ReportPtr = std::unique_ptr<mr_report, ReportDeleter>;

void log_event(const std::string& event, Json fields = Json::object()) {
  Json line{{"event", event}};
  for (auto& [k, v] : fields.items()) line[k] = v;
  std::cerr << line.dump() << '\n';
}

int exit_code(mr_status s) {
  switch (s) {
    case MR_OK:
    case MR_MANIFEST_INVALID:
    case MR_SCREENING_BLOCK:
    case MR_SUBJECT_UNTRAINABLE:
      return static_cast<int>(s);
    default:
      return 1;
  }
}

/// Logs a failed call and converts it to an exit code.
int failure(mr_status s) {
  log_event("error", {{"status", mr_status_name(s)}, {"code", static_cast<int>(s)},
                      {"message", mr_last_error()}});
  return exit_code(s);
}

#define TRY_MR(call)                     \
  do {                                   \
    mr_status status_ = (call);          \
    if (status_ != MR_OK) return failure(status_); \
  } while (0)

int load(const std::string& path, ManifestPtr& out) {
  mr_manifest* m = nullptr;
  TRY_MR(mr_manifest_load(path.c_str(), &m));
  out.reset(m);
  return 0;
}

struct RunArgs {
  std::string manifest;
  std::string out;
  std::size_t jobs = 0;
  bool no_cache = false;
  bool override_screening = false;
  std::string oracle;
  bool quiet = false;
};

int cmd_validate(const std::string& path) {
  ManifestPtr m;
  if (int rc = load(path, m)) return rc;
  TRY_MR(mr_manifest_validate(m.get()));
  std::cout << "manifest ok: " << mr_manifest_bug_count(m.get()) << " bug(s), hash "
            << mr_manifest_hash(m.get()) << "\n";
  return 0;
}

int cmd_run(const RunArgs& args) {
  ManifestPtr m;
  if (int rc = load(args.manifest, m)) return rc;
  TRY_MR(mr_manifest_validate(m.get()));
  mr_context* raw = nullptr;
  TRY_MR(mr_context_create(&raw));
  ContextPtr ctx(raw);
  if (args.jobs > 0) TRY_MR(mr_context_set_jobs(ctx.get(), args.jobs));
  if (args.no_cache) TRY_MR(mr_context_set_cache_enabled(ctx.get(), 0));
  if (args.override_screening) TRY_MR(mr_context_set_override_screening(ctx.get(), 1));
  if (!args.oracle.empty()) TRY_MR(mr_context_set_oracle_mode(ctx.get(), args.oracle.c_str()));
  TRY_MR(mr_context_set_log_stderr(ctx.get(), args.quiet ? 0 : 1));

  mr_report* report_raw = nullptr;
  TRY_MR(mr_run(ctx.get(), m.get(), &report_raw));
  ReportPtr report(report_raw);
  const std::string out = args.out.empty() ? mr_manifest_output_dir(m.get()) : args.out;
  TRY_MR(mr_report_write(report.get(), out.c_str()));
  TRY_MR(mr_report_emit_plots(report.get(), out.c_str()));
  if (!args.quiet) {
    log_event("written", {{"dir", out},
                          {"rows", mr_report_row_count(report.get())},
                          {"trainings", mr_report_trainings_executed(report.get())},
                          {"cache_hits", mr_report_cache_hits(report.get())}});
  }
  std::cout << mr_report_summary(report.get());
  return 0;
}

int cmd_report(const std::string& manifest, std::string out) {
  if (out.empty()) {
    if (manifest.empty()) {
      log_event("error", {{"message", "report needs --out or --manifest"}});
      return 1;
    }
    ManifestPtr m;
    if (int rc = load(manifest, m)) return rc;
    out = mr_manifest_output_dir(m.get());
  }
  const std::string path = (std::filesystem::path(out) / "report.json").string();
  mr_report* raw = nullptr;
  TRY_MR(mr_report_load(path.c_str(), &raw));
  ReportPtr report(raw);
  TRY_MR(mr_report_emit_plots(report.get(), out.c_str()));
  std::cout << mr_report_summary(report.get());
  return 0;
}

int cmd_clean_cache(const std::string& manifest, const std::string& cache_dir) {
  ManifestPtr m;
  if (int rc = load(manifest, m)) return rc;
  mr_context* raw = nullptr;
  TRY_MR(mr_context_create(&raw));
  ContextPtr ctx(raw);
  if (!cache_dir.empty()) TRY_MR(mr_context_set_cache_dir(ctx.get(), cache_dir.c_str()));
  TRY_MR(mr_clean_cache(ctx.get(), m.get()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutant realism experiments for feed-forward classifiers", "mutrealism"};
  app.set_version_flag("--version", std::string(mr_version()));
  app.require_subcommand(1);

  std::string validate_manifest;
  auto* validate = app.add_subcommand("validate", "Check a manifest and its datasets");
  validate->add_option("--manifest", validate_manifest, "Manifest JSON")->required();

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Train, mutate and score every bug of a manifest");
  run->add_option("--manifest", run_args.manifest, "Manifest JSON")->required();
  run->add_option("--out", run_args.out, "Output directory (default: manifest output_dir)");
  run->add_option("--jobs", run_args.jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_flag("--no-cache", run_args.no_cache, "Neither read nor write the instance cache");
  run->add_flag("--override-screening", run_args.override_screening,
                "Continue when screening blocks the subject");
  run->add_option("--oracle", run_args.oracle, "Oracle mode")
      ->check(CLI::IsMember({"auto", "accuracy", "loss"}));
  run->add_flag("--quiet", run_args.quiet, "No JSON events on stderr");

  std::string report_manifest;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Re-emit plot data and print the summary");
  report->add_option("--manifest", report_manifest, "Manifest JSON");
  report->add_option("--out", report_out, "Directory holding report.json");

  std::string clean_manifest;
  std::string clean_dir;
  auto* clean = app.add_subcommand("clean-cache", "Delete the instance cache");
  clean->add_option("--manifest", clean_manifest, "Manifest JSON")->required();
  clean->add_option("--cache-dir", clean_dir, "Cache directory override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (*validate) return cmd_validate(validate_manifest);
  if (*run) return cmd_run(run_args);
  if (*report) return cmd_report(report_manifest, report_out);
  if (*clean) return cmd_clean_cache(clean_manifest, clean_dir);
  return 1;
}
