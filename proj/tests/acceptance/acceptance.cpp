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


// Acceptance gate: one PASS/FAIL/SKIP line per criterion, nonzero exit if
// any criterion fails. Every check is deterministic and runs offline; the
// real-endpoint probe in criterion 10 only runs when credentials are set.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "scripted_server.hpp"
#include "segjudge/campaign.hpp"
#include "segjudge/cli.hpp"
#include "segjudge/corpus.hpp"
#include "segjudge/corruption.hpp"
#include "segjudge/judge.hpp"
#include "segjudge/metrics.hpp"
#include "segjudge/overlay.hpp"
#include "segjudge/report.hpp"
#include "segjudge/stats.hpp"
#include "test_support.hpp"

namespace {

using namespace segjudge;
namespace fs = std::filesystem;
using testing::TempDir;

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

/// Collects the first failure; later checks still run so the detail is
/// about the earliest problem.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failure_.empty()) failure_ = what;
  }
  bool failed() const { return !failure_.empty(); }
  Outcome result(const std::string& ok_detail) const {
    return failed() ? Outcome{Verdict::Fail, failure_} : Outcome{Verdict::Pass, ok_detail};
  }

 private:
  std::string failure_;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(testing::read_text(path));
  std::string line;
  while (std::getline(in, line)) rows.push_back(split(line));
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::runtime_error("missing column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

CampaignMeta mock_meta(const MockJudge& judge, int runs) {
  CampaignMeta m;
  m.judge_id = judge.judge_id();
  m.prompt_hash = render_prompt(default_prompt_template()).prompt_hash;
  m.runs = runs;
  m.backend = "mock";
  m.started_at = epoch_clock();
  m.settings = {{"judge", judge.settings()}};
  return m;
}

CampaignOptions mock_options(int runs, int parallel) {
  CampaignOptions o;
  o.runs = runs;
  o.max_parallel = parallel;
  o.clock = epoch_clock;
  return o;
}

// 1. Agreement metrics against direct definitions.
Outcome agreement_metrics() {
  Checker c;
  std::mt19937_64 rng(20260101);
  const Tolerance tol{0.02};
  int groups = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 40);
    std::vector<std::vector<int>> scores(n);
    std::vector<std::vector<double>> confs(n);
    for (int i = 0; i < n; ++i) {
      // A stable image, a jittery one, or anything in between.
      const int base = 1 + static_cast<int>(rng() % 5);
      const double cbase = static_cast<double>(rng() % 1000) / 1000.0;
      const double p_score = static_cast<double>(rng() % 100) / 100.0;
      const double spread = (rng() % 2) ? 0.01 : 0.05;
      for (int r = 0; r < 5; ++r) {
        const bool move = static_cast<double>(rng() % 100) / 100.0 < p_score * 0.3;
        scores[i].push_back(move ? 1 + static_cast<int>(rng() % 5) : base);
        const double j = spread * (static_cast<double>(rng() % 1001) / 1000.0);
        confs[i].push_back(std::min(1.0, cbase + j));
      }
      ++groups;
    }
    const double as = score_agreement(scores);
    const double ac = confidence_agreement(confs, tol);
    const double asc = combined_stability(scores, confs, tol);
    c.expect(as == oracle::score_agreement(scores), "A_s differs from oracle in trial " + std::to_string(trial));
    c.expect(ac == oracle::confidence_agreement(confs, tol.epsilon),
             "A_c differs from oracle in trial " + std::to_string(trial));
    c.expect(asc == oracle::combined(scores, confs, tol.epsilon),
             "A_sc differs from oracle in trial " + std::to_string(trial));
    c.expect(asc <= std::min(as, ac), "A_sc exceeds min(A_s, A_c) in trial " + std::to_string(trial));
  }
  return c.result("1000 datasets, " + std::to_string(groups) + " R=5 groups match the oracle; bound holds");
}

// 2. ICC(1,1) against a brute-force one-way ANOVA.
Outcome icc_oracle() {
  Checker c;
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 99);
    const int r = 2 + static_cast<int>(rng() % 7);
    std::vector<std::vector<int>> m(n, std::vector<int>(r));
    for (auto& row : m) {
      const int base = 1 + static_cast<int>(rng() % 5);
      for (auto& v : row) v = (rng() % 3 == 0) ? 1 + static_cast<int>(rng() % 5) : base;
    }
    const auto got = icc_1_1(m);
    const auto want = oracle::icc_anova(m);
    c.expect(got.has_value() == want.has_value(), "definedness differs in trial " + std::to_string(trial));
    if (got && want) worst = std::max(worst, std::fabs(*got - *want));
  }
  c.expect(worst <= 1e-9, "max |icc - oracle| = " + fmt("%.3g", worst));
  const std::vector<std::vector<int>> perfect = {{1, 1, 1}, {3, 3, 3}, {5, 5, 5}, {2, 2, 2}};
  const std::vector<std::vector<int>> opposed = {{1, 3}, {3, 1}, {1, 3}, {3, 1}};
  const auto one = icc_1_1(perfect);
  const auto minus_one = icc_1_1(opposed);
  c.expect(one && *one == 1.0, "zero within-image variance should give ICC = 1 exactly");
  c.expect(minus_one && *minus_one == -1.0, "zero between-image variance should give ICC = -1 exactly");
  return c.result("1000 matrices, max |diff| " + fmt("%.2e", worst) + "; hand cases 1 and -1 exact");
}

// 3. t quantiles, exact Wilcoxon, CI coverage.
Outcome statistical_tests() {
  Checker c;
  const std::vector<std::pair<double, double>> table = {
      {2, 4.3027}, {5, 2.5706}, {10, 2.2281}, {30, 2.0423}};
  for (const auto& [df, q] : table) {
    const double got = stats::student_t_quantile(0.975, df);
    c.expect(std::fabs(got - q) <= 1e-4, "t quantile at df " + fmt("%g", df) + " = " + fmt("%.6f", got));
  }

  std::mt19937_64 rng(12);
  int cases = 0;
  for (int n = 1; n <= kWilcoxonExactMaxN; ++n) {
    for (int trial = 0; trial < 40; ++trial) {
      std::vector<double> d(n);
      for (auto& x : d) {
        // Small integer magnitudes force ties; a few zeros are dropped.
        const int mag = static_cast<int>(rng() % 6);
        x = (rng() % 2 ? 1.0 : -1.0) * (trial % 2 ? mag : mag + static_cast<double>(rng() % 1000) / 997.0);
      }
      const auto w = wilcoxon_signed_rank(d);
      const double want = oracle::wilcoxon_enumerated(d);
      c.expect(w.p_value == want, "wilcoxon p at n=" + std::to_string(n) + ": " + fmt("%.17g", w.p_value) +
                                      " vs " + fmt("%.17g", want));
      ++cases;
    }
  }

  std::mt19937_64 mc(4242);
  std::normal_distribution<double> normal(1.5, 2.0);
  int covered = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> xs(12);
    for (auto& x : xs) x = normal(mc);
    const auto d = dispersion_and_ci(xs);
    covered += d.ci_lo <= 1.5 && 1.5 <= d.ci_hi;
  }
  const double coverage = static_cast<double>(covered) / trials;
  c.expect(std::fabs(coverage - 0.95) <= 0.02, "CI coverage " + fmt("%.3f", coverage));
  return c.result("t quantiles within 1e-4; " + std::to_string(cases) +
                  " Wilcoxon cases exact; CI coverage " + fmt("%.3f", coverage));
}

// 4. Noiseless mock through the full command-line pipeline.
Outcome mock_zero_noise() {
  Checker c;
  TempDir dir;
  const auto corpus = testing::write_clean_corpus(dir / "data", 50);
  const std::string out = (dir / "out").string();
  const std::vector<std::string> common = {"--out", out, "--severities", "1", "--runs", "5",
                                           "--p-flip", "0", "--jitter", "0"};
  const auto run = [&](std::vector<std::string> head) {
    head.insert(head.end(), common.begin(), common.end());
    return run_cli(head);
  };
  c.expect(run({"corrupt", "--manifest", corpus.manifest_path.string()}) == 0, "corrupt failed");
  c.expect(run({"overlay"}) == 0, "overlay failed");
  c.expect(run({"campaign"}) == 0, "campaign failed");
  c.expect(run({"report", "--kind", "repeatability"}) == 0, "report failed");
  if (c.failed()) return c.result("");

  const auto rows = read_csv(dir / "out" / "reports" / "repeatability.csv");
  c.expect(rows.size() == 7, "expected 6 condition rows, got " + std::to_string(rows.size() - 1));
  const auto& h = rows.front();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const std::string label = r[column(h, "condition")];
    c.expect(r[column(h, "N")] == "50", label + ": N = " + r[column(h, "N")]);
    for (const char* pct : {"score_agreement_pct", "confidence_agreement_pct",
                            "combined_stability_pct", "text_overlap_pct"}) {
      c.expect(r[column(h, pct)] == "100.00", label + ": " + pct + " = " + r[column(h, pct)]);
    }
    for (const char* sd : {"conf_std_mean", "conf_std_p95"}) {
      c.expect(r[column(h, sd)] == "0.0000", label + ": " + sd + " = " + r[column(h, sd)]);
    }
  }
  return c.result("50 images x 6 conditions x R=5: agreement 100.00, conf std 0.0000, overlap 100.00");
}

// 5. Calibrated flip noise on 1,000 clean images.
Outcome mock_calibrated_noise() {
  Checker c;
  TempDir dir;
  MockJudgeProfile p;
  p.p_flip = 0.2;
  p.seed = 5;
  MockJudge judge(p);
  auto store = RunStore::open(dir / "runs.jsonl", mock_meta(judge, 5));
  run_campaign(testing::stat_samples(1000, {Condition::clean()}), judge, store, mock_options(5, 8));
  const auto report = build_repeatability_report(load_run_set(dir / "runs.jsonl"));
  c.expect(report.rows.size() == 1 && report.rows[0].n == 1000, "expected 1000 complete groups");
  if (c.failed()) return c.result("");
  const double as = *report.rows[0].score_agreement * 100.0;
  const double expected = std::pow(0.8, 5) * 100.0;
  c.expect(std::fabs(as - expected) <= 3.0, "A_s = " + fmt("%.2f", as) + "%");
  return c.result("A_s = " + fmt("%.2f", as) + "% vs (1-0.2)^5 = " + fmt("%.2f", expected) + "%");
}

// 6. Monotone degradation profile through the sensitivity report.
Outcome sensitivity_shape() {
  Checker c;
  TempDir dir;
  MockJudgeProfile p;
  p.p_flip = 0.2;
  p.good_scores = {5, 4, 3, 2};
  p.poor_scores = {4, 3, 2, 1};
  MockJudge judge(p);
  auto store = RunStore::open(dir / "runs.jsonl", mock_meta(judge, 5));
  run_campaign(testing::stat_samples(40, testing::all_conditions()), judge, store, mock_options(5, 8));
  const auto report = build_sensitivity_report(load_run_set(dir / "runs.jsonl"));
  fs::create_directories(dir / "reports");
  std::ofstream(dir / "reports" / "sensitivity.csv") << render_sensitivity_csv(report);

  for (const auto& t : report.trends) {
    const std::string f(family_name(t.family));
    c.expect(t.rho_score && *t.rho_score == 1.0, f + ": rho_score is not 1");
  }
  c.expect(report.trends.size() == 5, "expected 5 family trends");

  const auto rows = read_csv(dir / "reports" / "sensitivity.csv");
  const std::vector<std::string> leading = {"corruption", "severity", "mean_ds", "std_ds",
                                            "ci95_ds_lo", "ci95_ds_hi", "mean_dc", "std_dc",
                                            "ci95_dc_lo", "ci95_dc_hi", "dz_score", "dz_conf"};
  c.expect(rows.front().size() >= leading.size() &&
               std::equal(leading.begin(), leading.end(), rows.front().begin()),
           "leading sensitivity columns are out of order");
  c.expect(rows.size() == 16, "expected 15 data rows, got " + std::to_string(rows.size() - 1));
  std::size_t i = 1;
  for (const char* f : {"fog", "rain", "shadow", "snow", "sunflare"}) {
    for (int s = 1; s <= 3 && i < rows.size(); ++s, ++i) {
      c.expect(rows[i][0] == f && rows[i][1] == std::to_string(s),
               "row " + std::to_string(i) + " is " + rows[i][0] + "," + rows[i][1]);
      const std::string dz = rows[i][10];
      c.expect(dz != stats::kUndefined && std::stod(dz) > 0.0,
               std::string(f) + "-" + std::to_string(s) + ": dz_score = " + dz);
    }
  }
  return c.result("rho = 1.0 for 5 families; 15 rows in table order; dz_score > 0 everywhere");
}

// 7. Corruption determinism, severity monotonicity, fog constant.
Outcome corruption_determinism() {
  Checker c;
  TempDir dir;
  const auto corpus = testing::write_clean_corpus(dir / "data", 3, 64, 48);
  CorruptOptions opts;
  opts.master_seed = 31337;
  opts.families = {kCorruptionFamilies.begin(), kCorruptionFamilies.end()};
  opts.severities = {1, 2, 3};
  opts.max_parallel = 4;
  opts.out_dir = dir / "a";
  const auto a = corrupt_corpus(corpus.manifest, opts);
  opts.out_dir = dir / "b";
  opts.max_parallel = 1;
  const auto b = corrupt_corpus(corpus.manifest, opts);
  c.expect(a.failures.empty() && b.failures.empty(), "corruption reported failures");
  c.expect(a.written == 45 && b.written == 45, "expected 45 files per run");
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a" / "corrupted")) {
    if (!entry.is_regular_file()) continue;
    const fs::path twin = dir / "b" / fs::relative(entry.path(), dir / "a");
    c.expect(testing::read_text(entry.path()) == testing::read_text(twin),
             "bytes differ: " + twin.string());
    ++compared;
  }
  c.expect(compared == 45, "compared " + std::to_string(compared) + " files");

  for (const auto& row : corpus.manifest.rows()) {
    const RgbImage img = read_rgb_png(row.image_path);
    for (Family f : kCorruptionFamilies) {
      const auto d = severity_monotonicity_probe(img, f, 31337);
      c.expect(d[0] <= d[1] && d[1] <= d[2],
               std::string(family_name(f)) + " on " + row.image_id + ": " + fmt("%.3f", d[0]) + ", " +
                   fmt("%.3f", d[1]) + ", " + fmt("%.3f", d[2]));
    }
  }

  const RgbImage gray(32, 24, 128);
  const RgbImage fogged = apply_corruption(gray, CorruptionSpec(Condition(Family::Fog, 3), 9));
  c.expect(std::all_of(fogged.bytes().begin(), fogged.bytes().end(),
                       [](std::uint8_t v) { return v == 206; }),
           "fog-3 on gray 128 is not constant 206");
  return c.result("45 files byte-identical across runs; |delta| non-decreasing; fog-3(128) = 206");
}

// 8. Overlay blend identities.
Outcome overlay_correctness() {
  Checker c;
  const RgbImage scene = testing::make_scene(40, 30, 3);
  const GrayImage empty(40, 30, 0);
  const RgbImage same = compose_overlay(scene, empty, OverlayStyle());
  c.expect(std::ranges::equal(same.bytes(), scene.bytes()), "empty mask changed pixels");

  const GrayImage full(40, 30, 255);
  const RgbImage solid = compose_overlay(scene, full, OverlayStyle({10, 200, 30}, 1.0));
  bool constant = true;
  for (std::size_t i = 0; i < solid.bytes().size(); i += 3) {
    constant &= solid.bytes()[i] == 10 && solid.bytes()[i + 1] == 200 && solid.bytes()[i + 2] == 30;
  }
  c.expect(constant, "alpha 1 does not paint the overlay color");

  const RgbImage grey(2, 2, 100);
  GrayImage one(2, 2, 0);
  one.at(1, 0) = 255;
  const RgbImage blended = compose_overlay(grey, one, OverlayStyle({255, 0, 0}, 0.5));
  const auto px = blended.pixel(1, 0);
  c.expect(px[0] == 178 && px[1] == 50 && px[2] == 50, "blend gave (" + std::to_string(px[0]) + "," +
                                                           std::to_string(px[1]) + "," +
                                                           std::to_string(px[2]) + ")");
  c.expect(blended.pixel(0, 0)[0] == 100 && blended.pixel(1, 1)[2] == 100, "unmasked pixels changed");
  return c.result("identity, alpha=1 constancy and (100,100,100) -> (178,50,50) byte-exact");
}

// 9. Interrupt, tear the last line, resume, compare.
Outcome resumable_campaign() {
  Checker c;
  TempDir dir;
  MockJudgeProfile p;
  p.p_flip = 0.25;
  MockJudge judge(p);
  const auto samples = testing::stat_samples(20, testing::all_conditions());  // 1600 records
  const std::size_t stop_after = 1 + std::mt19937_64(9)() % 1500;

  {
    auto ref = RunStore::open(dir / "ref.jsonl", mock_meta(judge, 5));
    run_campaign(samples, judge, ref, mock_options(5, 4));
  }
  {
    std::atomic<bool> stop{false};
    std::size_t seen = 0;
    auto store = RunStore::open(dir / "runs.jsonl", mock_meta(judge, 5));
    auto opts = mock_options(5, 4);
    opts.stop = &stop;
    opts.on_record = [&](const RunRecord&) {
      if (++seen == stop_after) stop = true;
    };
    try {
      run_campaign(samples, judge, store, opts);
      c.expect(false, "campaign was not interrupted");
    } catch (const Error& e) {
      c.expect(e.code() == ErrorCode::PartialCampaign, std::string("unexpected error ") + e.what());
    }
  }
  // A crash mid-write leaves a torn final line behind.
  std::ofstream(dir / "runs.jsonl", std::ios::app) << "{\"image_id\":\"img00";
  {
    auto store = RunStore::open(dir / "runs.jsonl", mock_meta(judge, 5));
    const auto summary = run_campaign(samples, judge, store, mock_options(5, 4));
    c.expect(summary.skipped >= stop_after, "resume skipped only " + std::to_string(summary.skipped));
  }
  c.expect(testing::read_text(dir / "runs.jsonl") == testing::read_text(dir / "ref.jsonl"),
           "resumed store differs from uninterrupted run");
  return c.result("stopped after " + std::to_string(stop_after) +
                  " of 1600 records, resumed; sorted stores byte-identical");
}

// 10. Live contract against a scripted local endpoint, plus an optional
// probe of a real one.
Outcome live_contract() {
  Checker c;
  const std::string bad_score = R"({"score":6,"confidence":0.8,"explanation":"x"})";
  const std::string bad_conf = R"({"score":4,"confidence":1.3,"explanation":"x"})";
  const std::string missing = R"({"score":4,"confidence":0.8})";
  const std::string valid = R"({"score":4,"confidence":0.8,"explanation":"Lines covered."})";
  const RenderedPrompt prompt = render_prompt(default_prompt_template());
  const std::vector<std::uint8_t> png = encode_png(testing::make_scene(16, 16, 1));

  JudgeConfig cfg;
  cfg.model = "contract-test";
  cfg.retry_backoff_ms = 1;
  cfg.timeout_s = 5.0;
  {
    testing::ScriptedServer server({{200, testing::chat_body(bad_score)},
                                    {200, testing::chat_body(bad_conf)},
                                    {200, testing::chat_body(missing)},
                                    {200, testing::chat_body(valid)}});
    cfg.endpoint = server.endpoint();
    cfg.max_retries = 3;
    const auto out = evaluate_live(png, prompt, cfg, "sk-local");
    c.expect(out.ok(), "valid fourth reply was not accepted: " + out.detail);
    c.expect(out.attempts == 4, "expected 4 attempts, got " + std::to_string(out.attempts));
    c.expect(out.ok() && out.verdict->score == 4 && out.verdict->confidence == 0.8,
             "accepted verdict differs from the valid reply");
    c.expect(out.ok() && out.verdict->latency_ms > 0.0, "latency_ms not > 0");
  }
  for (const auto& body : {bad_score, bad_conf, missing}) {
    testing::ScriptedServer server({{200, testing::chat_body(body)}});
    cfg.endpoint = server.endpoint();
    cfg.max_retries = 1;
    const auto out = evaluate_live(png, prompt, cfg, "sk-local");
    c.expect(!out.ok() && out.error == ErrorCode::SchemaViolation && out.attempts == 2,
             "invalid reply was not rejected after retrying: " + body);
  }
  {
    testing::ScriptedServer server({{401, R"({"error":"bad key"})"}});
    cfg.endpoint = server.endpoint();
    const auto out = evaluate_live(png, prompt, cfg, "sk-wrong");
    c.expect(out.error == ErrorCode::AuthFailure && out.attempts == 1, "401 not surfaced as AuthFailure");
  }
  if (c.failed()) return c.result("");

  const char* key = std::getenv("SEGJUDGE_LIVE_API_KEY");
  if (key == nullptr || *key == '\0') {
    return {Verdict::Pass,
            "scripted endpoint: score 6, confidence 1.3 and missing field rejected and retried, "
            "latency > 0; real endpoint skipped (SEGJUDGE_LIVE_API_KEY unset)"};
  }
  JudgeConfig live;
  if (const char* ep = std::getenv("SEGJUDGE_LIVE_ENDPOINT")) live.endpoint = ep;
  if (const char* model = std::getenv("SEGJUDGE_LIVE_MODEL")) live.model = model;
  live.max_retries = 2;
  const RgbImage overlay = compose_overlay(testing::make_scene(128, 96, 2),
                                           testing::make_line_mask(128, 96, 2), OverlayStyle());
  const auto out = evaluate_live(encode_png(overlay), prompt, live, key);
  c.expect(out.ok(), "real endpoint gave no valid verdict: " + out.detail);
  c.expect(out.ok() && out.verdict->latency_ms > 0.0, "real endpoint latency_ms not > 0");
  return c.result("scripted contract holds; real endpoint (" + live.model + ") returned a valid verdict");
}

struct Criterion {
  int id;
  double limit_s;  // 0 = no runtime bound
  Outcome (*run)();
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, 1.0, agreement_metrics},      {2, 5.0, icc_oracle},
      {3, 30.0, statistical_tests},     {4, 10.0, mock_zero_noise},
      {5, 30.0, mock_calibrated_noise}, {6, 30.0, sensitivity_shape},
      {7, 10.0, corruption_determinism}, {8, 0.0, overlay_correctness},
      {9, 0.0, resumable_campaign},     {10, 0.0, live_contract},
  };
  int failures = 0;
  for (const auto& crit : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = crit.run();
    } catch (const std::exception& e) {
      out = {Verdict::Fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (out.verdict == Verdict::Pass && crit.limit_s > 0.0 && secs > crit.limit_s) {
      out = {Verdict::Fail, "runtime " + fmt("%.2f", secs) + " s exceeds " + fmt("%.0f", crit.limit_s) + " s"};
    }
    const char* tag = out.verdict == Verdict::Pass ? "PASS" : out.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    std::printf("%s criterion %d: %s [%.2f s]\n", tag, crit.id, out.detail.c_str(), secs);
    std::fflush(stdout);
    failures += out.verdict == Verdict::Fail;
  }
  return failures == 0 ? 0 : 1;
}
