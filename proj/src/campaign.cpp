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

#include "segjudge/campaign.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>

#include "segjudge/raster.hpp"

namespace segjudge {

std::string epoch_clock() { return "1970-01-01T00:00:00.000Z"; }

namespace {

struct WorkItem {
  std::size_t sample;
  int run_index;
};

std::string failure_text(const JudgeOutcome& outcome, bool with_code = true) {
  std::string text(with_code ? to_string(outcome.error.value_or(ErrorCode::TransportFailure)) : "");
  if (!outcome.detail.empty()) text += (text.empty() ? "" : ": ") + outcome.detail;
  if (!outcome.raw_response.empty()) text += " | response: " + outcome.raw_response;
  return text;
}

}  // namespace

CampaignSummary run_campaign(const std::vector<CampaignSample>& samples, JudgeBackend& backend,
                             RunStore& store, const CampaignOptions& options) {
  if (options.runs < 1) throw Error(ErrorCode::InvalidConfig, "runs must be >= 1");
  if (options.max_parallel < 1) throw Error(ErrorCode::InvalidConfig, "max_parallel must be >= 1");
  if (!(options.failure_ceiling >= 0.0 && options.failure_ceiling <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "failure_ceiling must be in [0,1]");
  }
  if (samples.empty()) throw Error(ErrorCode::InvalidConfig, "no samples to evaluate");
  if (store.meta().runs != options.runs) {
    throw Error(ErrorCode::CampaignMismatch, "store run count differs from requested runs");
  }
  if (store.closed()) throw Error(ErrorCode::StoreClosed, "campaign store is closed");

  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(samples[a].image_id, samples[a].condition) <
           std::tie(samples[b].image_id, samples[b].condition);
  });

  CampaignSummary summary;
  summary.planned = samples.size() * static_cast<std::size_t>(options.runs);
  std::vector<WorkItem> work;
  for (std::size_t idx : order) {
    const auto& s = samples[idx];
    for (int r = 1; r <= options.runs; ++r) {
      if (store.contains({s.image_id, s.condition, r})) {
        ++summary.skipped;
      } else {
        work.push_back({idx, r});
      }
    }
  }

  // Mock backends read the mask once per sample, not once per run.
  std::vector<std::optional<OverlayStats>> stats(samples.size());
  if (backend.needs_stats()) {
    for (const auto& w : work) {
      const auto& s = samples[w.sample];
      if (stats[w.sample]) continue;
      stats[w.sample] = s.stats ? *s.stats : overlay_stats(read_gray_png(s.mask_path));
    }
  }

  const std::string judge_id = backend.judge_id();
  const std::string prompt_hash = store.meta().prompt_hash;
  const auto clock = options.clock ? options.clock : std::function<std::string()>(utc_now_iso8601);

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> halt{false};
  std::exception_ptr fatal;
  bool interrupted = false;

  auto worker = [&] {
    for (;;) {
      if (halt.load()) return;
      if (options.stop != nullptr && options.stop->load()) {
        std::lock_guard lock(mu);
        if (next.load() < work.size()) interrupted = true;
        return;
      }
      const std::size_t i = next.fetch_add(1);
      if (i >= work.size()) return;
      const auto& w = work[i];
      const auto& s = samples[w.sample];

      JudgeRequest req{s.image_id, s.condition, w.run_index, s.overlay_path, s.mask_path,
                       stats[w.sample]};
      JudgeOutcome outcome;
      try {
        outcome = backend.evaluate(req);
      } catch (const Error& e) {
        outcome.error = e.code();
        outcome.detail = e.message();
      }

      std::lock_guard lock(mu);
      if (halt.load()) return;
      if (outcome.error == ErrorCode::AuthFailure) {
        fatal = std::make_exception_ptr(Error(ErrorCode::AuthFailure, failure_text(outcome, false)));
        halt = true;
        return;
      }
      RunRecord rec;
      rec.image_id = s.image_id;
      rec.condition = s.condition;
      rec.run_index = w.run_index;
      rec.judge_id = judge_id;
      rec.prompt_hash = prompt_hash;
      rec.timestamp = clock();
      rec.attempts = std::max(outcome.attempts, 1);
      if (outcome.ok()) {
        rec.status = RunStatus::Ok;
        rec.verdict = outcome.verdict;
      } else {
        rec.status = RunStatus::Failed;
        rec.raw_error = failure_text(outcome);
      }
      try {
        store.append(rec);
      } catch (...) {
        fatal = std::current_exception();
        halt = true;
        return;
      }
      (rec.ok() ? summary.succeeded : summary.failed) += 1;
      if (options.on_record) options.on_record(rec);
    }
  };

  const int n_threads =
      static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.max_parallel),
                                             std::max<std::size_t>(work.size(), 1)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  if (fatal) std::rethrow_exception(fatal);
  if (interrupted) {
    throw Error(ErrorCode::PartialCampaign,
                "stopped after " + std::to_string(store.size()) + " of " +
                    std::to_string(summary.planned) + " records; rerun to resume");
  }
  store.close();

  const std::size_t attempted = summary.succeeded + summary.failed;
  if (attempted > 0 &&
      static_cast<double>(summary.failed) > options.failure_ceiling * static_cast<double>(attempted)) {
    throw Error(ErrorCode::CampaignAborted,
                std::to_string(summary.failed) + " of " + std::to_string(attempted) +
                    " requests failed, above the configured ceiling");
  }
  return summary;
}

}  // namespace segjudge
