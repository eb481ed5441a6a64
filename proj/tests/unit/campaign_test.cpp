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


#include <gtest/gtest.h>

#include <atomic>
#include <functional>

#include "segjudge/campaign.hpp"
#include "test_support.hpp"

namespace segjudge {
namespace {

using testing::read_text;
using testing::stat_samples;
using testing::TempDir;

CampaignMeta meta_for(const JudgeBackend& judge, int runs) {
  CampaignMeta m;
  m.judge_id = judge.judge_id();
  m.prompt_hash = "prompt-hash";
  m.runs = runs;
  m.backend = judge.backend_name();
  m.started_at = epoch_clock();
  return m;
}

CampaignOptions options(int runs, int parallel = 1) {
  CampaignOptions o;
  o.runs = runs;
  o.max_parallel = parallel;
  o.clock = epoch_clock;
  return o;
}

/// Delegates to the mock but fails or rejects selected requests.
class ScriptedBackend final : public JudgeBackend {
 public:
  using Rule = std::function<std::optional<ErrorCode>(const JudgeRequest&)>;
  explicit ScriptedBackend(Rule rule) : mock_({}), rule_(std::move(rule)) {}
  std::string judge_id() const override { return "scripted"; }
  std::string backend_name() const override { return "scripted"; }
  nlohmann::ordered_json settings() const override { return nlohmann::ordered_json::object(); }
  bool needs_stats() const override { return true; }
  JudgeOutcome evaluate(const JudgeRequest& r) override {
    if (auto code = rule_(r)) {
      JudgeOutcome out;
      out.error = *code;
      out.detail = "scripted";
      out.raw_response = "{\"bad\":true}";
      out.attempts = 4;
      return out;
    }
    return mock_.evaluate(r);
  }

 private:
  MockJudge mock_;
  Rule rule_;
};

const std::vector<Condition> kTwo{Condition::clean(), Condition(Family::Fog, 1)};

TEST(Campaign, EvaluatesEverySampleRunPair) {
  TempDir dir;
  MockJudge judge({});
  auto store = RunStore::open(dir / "runs.jsonl", meta_for(judge, 5));
  const auto samples = stat_samples(5, kTwo);
  const auto summary = run_campaign(samples, judge, store, options(5));
  EXPECT_EQ(summary.planned, 50u);
  EXPECT_EQ(summary.succeeded, 50u);
  EXPECT_EQ(summary.failed, 0u);
  EXPECT_TRUE(store.closed());
  const auto set = load_run_set(dir / "runs.jsonl");
  ASSERT_EQ(set.records.size(), 50u);
  EXPECT_EQ(set.records.front().timestamp, "1970-01-01T00:00:00.000Z");
  EXPECT_EQ(set.records.front().judge_id, judge.judge_id());
  EXPECT_EQ(set.records.front().prompt_hash, "prompt-hash");
}

TEST(Campaign, ParallelAndSequentialStoresAreIdentical) {
  TempDir dir;
  MockJudgeProfile p;
  p.p_flip = 0.3;
  MockJudge judge(p);
  const auto samples = stat_samples(8, testing::all_conditions());
  {
    auto a = RunStore::open(dir / "a.jsonl", meta_for(judge, 3));
    run_campaign(samples, judge, a, options(3, 1));
    auto b = RunStore::open(dir / "b.jsonl", meta_for(judge, 3));
    run_campaign(samples, judge, b, options(3, 8));
  }
  EXPECT_EQ(read_text(dir / "a.jsonl"), read_text(dir / "b.jsonl"));
}

TEST(Campaign, StopFlagInterruptsAndResumeCompletes) {
  TempDir dir;
  MockJudge judge({});
  const auto samples = stat_samples(6, kTwo);
  std::atomic<bool> stop{false};
  std::size_t seen = 0;
  {
    auto store = RunStore::open(dir / "runs.jsonl", meta_for(judge, 5));
    auto opts = options(5);
    opts.stop = &stop;
    opts.on_record = [&](const RunRecord&) {
      if (++seen == 17) stop = true;
    };
    try {
      run_campaign(samples, judge, store, opts);
      FAIL() << "expected PartialCampaign";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::PartialCampaign);
    }
    EXPECT_FALSE(store.closed());
  }
  EXPECT_EQ(load_run_set(dir / "runs.jsonl").records.size(), 17u);

  auto store = RunStore::open(dir / "runs.jsonl", meta_for(judge, 5));
  const auto summary = run_campaign(samples, judge, store, options(5));
  EXPECT_EQ(summary.skipped, 17u);
  EXPECT_EQ(summary.succeeded, 60u - 17u);

  auto ref = RunStore::open(dir / "ref.jsonl", meta_for(judge, 5));
  run_campaign(samples, judge, ref, options(5));
  EXPECT_EQ(read_text(dir / "runs.jsonl"), read_text(dir / "ref.jsonl"));
}

TEST(Campaign, FailuresArePersistedAsFailedRows) {
  TempDir dir;
  ScriptedBackend judge([](const JudgeRequest& r) -> std::optional<ErrorCode> {
    if (r.image_id == "img0002" && r.run_index == 1) return ErrorCode::SchemaViolation;
    return std::nullopt;
  });
  auto store = RunStore::open(dir / "runs.jsonl", meta_for(judge, 5));
  const auto summary = run_campaign(stat_samples(10, kTwo), judge, store, options(5));
  EXPECT_EQ(summary.failed, 2u);
  EXPECT_EQ(summary.succeeded, 98u);
  const auto set = load_run_set(dir / "runs.jsonl");
  int failed = 0;
  for (const auto& r : set.records) {
    if (r.ok()) continue;
    ++failed;
    EXPECT_FALSE(r.verdict);
    EXPECT_EQ(r.attempts, 4);
    EXPECT_NE(r.raw_error.find("SchemaViolation"), std::string::npos) << r.raw_error;
    EXPECT_NE(r.raw_error.find("{\"bad\":true}"), std::string::npos);
  }
  EXPECT_EQ(failed, 2);
}

TEST(Campaign, AbortsAboveFailureCeiling) {
  TempDir dir;
  ScriptedBackend judge([](const JudgeRequest& r) -> std::optional<ErrorCode> {
    if (r.run_index == 1) return ErrorCode::Timeout;
    return std::nullopt;
  });
  auto store = RunStore::open(dir / "runs.jsonl", meta_for(judge, 5));
  auto opts = options(5);
  opts.failure_ceiling = 0.1;
  try {
    run_campaign(stat_samples(4, kTwo), judge, store, opts);
    FAIL() << "expected CampaignAborted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CampaignAborted);
  }
  // Rows were still written, so the evidence survives the abort.
  EXPECT_EQ(load_run_set(dir / "runs.jsonl").records.size(), 40u);
}

TEST(Campaign, AuthFailureStopsWithoutRecordingIt) {
  TempDir dir;
  ScriptedBackend judge([](const JudgeRequest&) -> std::optional<ErrorCode> {
    return ErrorCode::AuthFailure;
  });
  auto store = RunStore::open(dir / "runs.jsonl", meta_for(judge, 5));
  try {
    run_campaign(stat_samples(3, kTwo), judge, store, options(5, 4));
    FAIL() << "expected AuthFailure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AuthFailure);
  }
  EXPECT_EQ(load_run_set(dir / "runs.jsonl").records.size(), 0u);
}

TEST(Campaign, RejectsBadOptions) {
  TempDir dir;
  MockJudge judge({});
  auto store = RunStore::open(dir / "runs.jsonl", meta_for(judge, 5));
  const auto expect_code = [&](const std::vector<CampaignSample>& s, const CampaignOptions& o,
                               ErrorCode code) {
    try {
      run_campaign(s, judge, store, o);
      ADD_FAILURE() << "expected " << to_string(code);
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), code);
    }
  };
  expect_code({}, options(5), ErrorCode::InvalidConfig);
  expect_code(stat_samples(1, kTwo), options(3), ErrorCode::CampaignMismatch);
  auto bad = options(5);
  bad.max_parallel = 0;
  expect_code(stat_samples(1, kTwo), bad, ErrorCode::InvalidConfig);
}

}  // namespace
}  // namespace segjudge
