// Copyright 2026 The segjudge Authors. All Rights Reserved.
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

#include "segjudge/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "segjudge/campaign.hpp"
#include "segjudge/config.hpp"
#include "segjudge/corpus.hpp"
#include "segjudge/manifest.hpp"
#include "segjudge/prompt.hpp"
#include "segjudge/raster.hpp"
#include "segjudge/report.hpp"

namespace segjudge {

namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile:
    case ErrorCode::IoFailure:
    case ErrorCode::StoreClosed:
      return kExitIo;
    case ErrorCode::Timeout:
    case ErrorCode::TransportFailure:
    case ErrorCode::SchemaViolation:
    case ErrorCode::AuthFailure:
    case ErrorCode::CampaignAborted:
    case ErrorCode::PartialCampaign:
      return kExitCampaign;
    case ErrorCode::IncompleteData:
    case ErrorCode::EmptyCell:
    case ErrorCode::TooFewSamples:
      return kExitIncomplete;
    default:
      return kExitValidation;
  }
}

namespace {

/// Flag values collected before the config file is known; applied on top
/// of it.
struct Overrides {
  std::string config;
  std::string manifest, out, store, families, severities, backend, model, endpoint;
  std::uint64_t seed = 0, mock_seed = 0;
  int runs = 0, max_retries = 0, max_parallel = 0, workers = 0;
  double epsilon = 0, failure_ceiling = 0, p_flip = 0, jitter = 0, alpha = 0, temperature = 0,
         top_p = 0, timeout = 0;
  bool pool_severities = false, sync = false;
  std::vector<CLI::Option*> given;
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "JSON configuration file");
  app.add_option("--manifest", o.manifest, "input manifest (default <out>/manifest.csv)");
  app.add_option("--out", o.out, "output root");
  app.add_option("--store", o.store, "run store (default <out>/runs.jsonl)");
  app.add_option("--seed", o.seed, "corruption master seed");
  app.add_option("--families", o.families, "comma-separated corruption families");
  app.add_option("--severities", o.severities, "comma-separated severities 1..3");
  app.add_option("--workers", o.workers, "threads for corpus operations");
  app.add_option("--alpha", o.alpha, "overlay alpha");
  app.add_option("--runs", o.runs, "repeated runs per sample");
  app.add_option("--backend", o.backend, "judge backend")->check(CLI::IsMember({"mock", "live"}));
  app.add_option("--model", o.model, "live model id");
  app.add_option("--endpoint", o.endpoint, "live chat-completions URL");
  app.add_option("--temperature", o.temperature, "live decoding temperature");
  app.add_option("--top-p", o.top_p, "live nucleus sampling parameter");
  app.add_option("--timeout", o.timeout, "live request timeout in seconds");
  app.add_option("--max-retries", o.max_retries, "live retries per request");
  app.add_option("--max-parallel", o.max_parallel, "in-flight judge requests");
  app.add_option("--mock-seed", o.mock_seed, "mock judge seed");
  app.add_option("--p-flip", o.p_flip, "mock off-by-one score probability");
  app.add_option("--jitter", o.jitter, "mock confidence jitter half-width");
  app.add_option("--epsilon", o.epsilon, "confidence agreement tolerance");
  app.add_option("--failure-ceiling", o.failure_ceiling, "tolerated failed fraction");
  app.add_flag("--pool-severities", o.pool_severities, "one repeatability row per family");
  app.add_flag("--sync", o.sync, "fdatasync after every appended record");
}

bool given(const CLI::App& app, const char* name) { return app.count(name) > 0; }

HarnessConfig resolve_config(const CLI::App& app, const Overrides& o) {
  HarnessConfig c = o.config.empty() ? HarnessConfig{} : load_config(o.config);
  if (given(app, "--manifest")) c.manifest = o.manifest;
  if (given(app, "--out")) c.out = o.out;
  if (given(app, "--store")) c.store = o.store;
  if (given(app, "--seed")) c.seed = o.seed;
  if (given(app, "--families")) c.families = parse_family_list(o.families);
  if (given(app, "--severities")) c.severities = parse_severity_list(o.severities);
  if (given(app, "--workers")) c.workers = o.workers;
  if (given(app, "--alpha")) c.overlay = OverlayStyle(c.overlay.color(), o.alpha);
  if (given(app, "--runs")) c.runs = o.runs;
  if (given(app, "--backend")) c.backend = o.backend;
  if (given(app, "--model")) c.judge.model = o.model;
  if (given(app, "--endpoint")) c.judge.endpoint = o.endpoint;
  if (given(app, "--temperature")) c.judge.temperature = o.temperature;
  if (given(app, "--top-p")) c.judge.top_p = o.top_p;
  if (given(app, "--timeout")) c.judge.timeout_s = o.timeout;
  if (given(app, "--max-retries")) c.judge.max_retries = o.max_retries;
  if (given(app, "--max-parallel")) c.judge.max_parallel = o.max_parallel;
  if (given(app, "--mock-seed")) c.mock.seed = o.mock_seed;
  if (given(app, "--p-flip")) c.mock.p_flip = o.p_flip;
  if (given(app, "--jitter")) c.mock.jitter = o.jitter;
  if (given(app, "--epsilon")) c.tolerance.epsilon = o.epsilon;
  if (given(app, "--failure-ceiling")) c.failure_ceiling = o.failure_ceiling;
  if (o.pool_severities) c.pool_severities = true;
  if (o.sync) c.sync_each_append = true;
  c.validate();
  return c;
}

int report_failures(const char* what, const std::vector<FileFailure>& failures) {
  int code = kExitOk;
  for (const auto& f : failures) {
    std::cerr << what << ": " << to_string(f.code) << ": " << f.path.string() << ": "
              << f.message << "\n";
    code = std::max(code, exit_code_for(f.code));
  }
  return code;
}

int cmd_corrupt(const HarnessConfig& c) {
  if (c.manifest.empty()) throw Error(ErrorCode::InvalidConfig, "corrupt needs --manifest");
  const Manifest manifest = load_manifest(c.manifest);
  if (manifest.empty()) throw Error(ErrorCode::EmptyInput, "empty manifest");
  CorruptOptions opts;
  opts.master_seed = c.seed;
  opts.families = c.families;
  opts.severities = c.severities;
  opts.out_dir = c.out;
  opts.max_parallel = c.workers;
  const CorruptResult result = corrupt_corpus(manifest, opts);
  save_manifest(c.out / "manifest.csv", result.manifest);
  std::cerr << "corrupt: " << result.written << " written, " << result.unchanged
            << " unchanged, " << result.failures.size() << " failed\n";
  return report_failures("corrupt", result.failures);
}

int cmd_overlay(const HarnessConfig& c) {
  const Manifest manifest = load_manifest(c.manifest_path());
  OverlayOptions opts;
  opts.style = c.overlay;
  opts.out_dir = c.out;
  opts.max_parallel = c.workers;
  const OverlayResult result = build_overlays(manifest, opts);
  std::cerr << "overlay: " << result.written << " written, " << result.unchanged
            << " unchanged, " << result.failures.size() << " failed\n";
  return report_failures("overlay", result.failures);
}

int cmd_campaign(const HarnessConfig& c, std::atomic<bool>* stop) {
  const Manifest manifest = load_manifest(c.manifest_path());
  if (manifest.empty()) throw Error(ErrorCode::EmptyInput, "empty manifest");
  const bool mock = c.backend == "mock";
  const RenderedPrompt prompt = render_prompt(default_prompt_template());

  std::unique_ptr<JudgeBackend> backend;
  if (mock) {
    backend = std::make_unique<MockJudge>(c.mock);
  } else {
    const char* key = std::getenv(c.judge.api_key_env.c_str());
    if (key == nullptr || *key == '\0') {
      throw Error(ErrorCode::InvalidConfig, "environment variable " + c.judge.api_key_env +
                                                " holds no API key");
    }
    backend = std::make_unique<LiveJudge>(c.judge, prompt, key);
  }

  const std::vector<CampaignSample> samples = campaign_samples(manifest, c.out, mock);
  if (samples.empty()) throw Error(ErrorCode::EmptyInput, "manifest has no evaluable rows");
  if (!mock) {
    for (const auto& s : samples) {
      if (!fs::exists(s.overlay_path)) {
        throw Error(ErrorCode::MissingFile, "overlay missing (run overlay first): " +
                                                s.overlay_path.string());
      }
    }
  }

  CampaignMeta meta;
  meta.judge_id = backend->judge_id();
  meta.prompt_hash = prompt.prompt_hash;
  meta.runs = c.runs;
  meta.backend = backend->backend_name();
  meta.started_at = mock ? epoch_clock() : utc_now_iso8601();
  meta.settings = {{"judge", backend->settings()},
                   {"prompt_version", default_prompt_template().version},
                   {"overlay",
                    {{"color", {c.overlay.color()[0], c.overlay.color()[1], c.overlay.color()[2]}},
                     {"alpha", c.overlay.alpha()},
                     {"mode", "solid"}}}};

  RunStore store = RunStore::open(c.store_path(), meta, {c.sync_each_append});
  CampaignOptions opts;
  opts.runs = c.runs;
  opts.failure_ceiling = c.failure_ceiling;
  opts.max_parallel = mock ? std::max(c.workers, c.judge.max_parallel) : c.judge.max_parallel;
  opts.stop = stop;
  if (mock) opts.clock = epoch_clock;
  const std::size_t total = samples.size() * static_cast<std::size_t>(c.runs);
  std::size_t done = store.size();
  opts.on_record = [&](const RunRecord&) {
    ++done;
    if (done % 500 == 0) std::cerr << "campaign: " << done << "/" << total << "\n";
  };

  const CampaignSummary summary = run_campaign(samples, *backend, store, opts);
  std::cerr << "campaign: " << store.size() << "/" << total << " records, "
            << summary.skipped << " resumed, " << summary.failed << " failed\n";
  if (summary.failed > 0) {
    std::cerr << "warning: " << summary.failed << " failed records are excluded from metrics\n";
  }
  return kExitOk;
}

int cmd_report(const HarnessConfig& c, const std::string& kind) {
  const RunSet set = load_run_set(c.store_path());
  const fs::path dir = c.reports_dir();
  const auto write_text = [&](const std::string& name, const std::string& text) {
    write_file_atomic(dir / name, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                            text.size()));
  };
  write_text("report_meta.json", report_metadata(set.meta, c.tolerance).dump(2) + "\n");

  int code = kExitOk;
  if (kind == "repeatability" || kind == "all") {
    const RepeatabilityReport rep =
        build_repeatability_report(set, c.tolerance, {}, c.pool_severities);
    write_text("repeatability.csv", render_repeatability_csv(rep));
    std::cerr << summarize(rep);
    int missing = 0;
    for (const auto& g : rep.incomplete) {
      if (g.missing == 0) continue;
      ++missing;
      std::cerr << "incomplete: " << g.image_id << " " << encode_condition(g.condition) << " ("
                << g.missing << " runs missing)\n";
    }
    if (missing > 0) code = kExitIncomplete;
  }
  if (kind == "sensitivity" || kind == "all") {
    try {
      const SensitivityReport sens = build_sensitivity_report(set);
      write_text("sensitivity.csv", render_sensitivity_csv(sens));
      write_text("spearman.csv", render_spearman_csv(sens));
      for (const auto& t : sens.trends) {
        write_text("plot_" + std::string(family_name(t.family)) + ".csv",
                   render_plot_csv(sens, t.family));
      }
      std::cerr << summarize(sens);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::IncompleteData) throw;
      std::cerr << "sensitivity: " << e.what() << "\n";
      code = kExitIncomplete;
    }
  }
  return code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::atomic<bool>* stop) {
  CLI::App app{"Reliability harness for LLM judges of segmentation overlays", "segjudge"};
  app.require_subcommand(1);
  Overrides o;
  std::string kind = "all";
  auto* corrupt = app.add_subcommand("corrupt", "synthesize the corrupted challenge set");
  auto* overlay = app.add_subcommand("overlay", "render mask overlays for every manifest row");
  auto* campaign = app.add_subcommand("campaign", "run repeated judge evaluations");
  auto* report = app.add_subcommand("report", "write repeatability and sensitivity tables");
  for (auto* sub : {corrupt, overlay, campaign, report}) add_common(*sub, o);
  report->add_option("--kind", kind, "repeatability, sensitivity or all")
      ->check(CLI::IsMember({"repeatability", "sensitivity", "all"}));

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    const HarnessConfig config = resolve_config(*sub, o);
    if (sub == corrupt) return cmd_corrupt(config);
    if (sub == overlay) return cmd_overlay(config);
    if (sub == campaign) return cmd_campaign(config, stop);
    return cmd_report(config, kind);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace segjudge
