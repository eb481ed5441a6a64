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

#include "segjudge/run_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "segjudge/raster.hpp"

namespace segjudge {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::time_point_cast<std::chrono::seconds>(now);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(now - secs).count();
  const std::time_t t = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<int>(millis));
  return buf;
}

std::string record_to_json_line(const RunRecord& r) {
  ojson j;
  j["image_id"] = r.image_id;
  j["family"] = family_name(r.condition.family());
  j["severity"] = r.condition.severity();
  j["run_index"] = r.run_index;
  if (r.verdict) {
    j["score"] = r.verdict->score;
    j["confidence"] = r.verdict->confidence;
    j["explanation"] = r.verdict->explanation;
    j["latency_ms"] = r.verdict->latency_ms;
  } else {
    j["score"] = nullptr;
    j["confidence"] = nullptr;
    j["explanation"] = nullptr;
    j["latency_ms"] = nullptr;
  }
  j["judge_id"] = r.judge_id;
  j["prompt_hash"] = r.prompt_hash;
  j["timestamp"] = r.timestamp;
  j["status"] = r.ok() ? "ok" : "failed";
  j["raw_error"] = r.raw_error;
  j["attempts"] = r.attempts;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

RunRecord record_from_json_line(std::string_view line, std::size_t line_no) {
  const auto fail = [&](const std::string& why) {
    return Error(ErrorCode::ParseError, "run log line " + std::to_string(line_no) + ": " + why);
  };
  ojson j;
  try {
    j = ojson::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  try {
    RunRecord r;
    r.image_id = j.at("image_id").get<std::string>();
    r.condition = Condition(parse_family(j.at("family").get<std::string>()),
                            j.at("severity").get<int>());
    r.run_index = j.at("run_index").get<int>();
    r.judge_id = j.at("judge_id").get<std::string>();
    r.prompt_hash = j.at("prompt_hash").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    r.raw_error = j.value("raw_error", std::string{});
    r.attempts = j.value("attempts", 1);
    const auto status = j.at("status").get<std::string>();
    if (status == "ok") {
      r.status = RunStatus::Ok;
      RawVerdict raw;
      raw.score = j.at("score").get<long long>();
      raw.confidence = j.at("confidence").get<double>();
      raw.explanation = j.at("explanation").get<std::string>();
      raw.latency_ms = j.at("latency_ms").get<double>();
      r.verdict = validate_verdict(raw);
    } else if (status == "failed") {
      r.status = RunStatus::Failed;
    } else {
      throw fail("unknown status '" + status + "'");
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw fail(e.what());
  }
}

fs::path meta_path_for(const fs::path& store_path) {
  fs::path p = store_path;
  p += ".meta.json";
  return p;
}

namespace {

ojson meta_to_json(const CampaignMeta& m) {
  ojson j;
  j["judge_id"] = m.judge_id;
  j["prompt_hash"] = m.prompt_hash;
  j["runs"] = m.runs;
  j["backend"] = m.backend;
  j["started_at"] = m.started_at;
  j["settings"] = m.settings;
  return j;
}

CampaignMeta meta_from_json(const ojson& j) {
  CampaignMeta m;
  m.judge_id = j.at("judge_id").get<std::string>();
  m.prompt_hash = j.at("prompt_hash").get<std::string>();
  m.runs = j.at("runs").get<int>();
  m.backend = j.value("backend", std::string{});
  m.started_at = j.value("started_at", std::string{});
  if (j.contains("settings")) m.settings = j.at("settings");
  return m;
}

CampaignMeta read_meta(const fs::path& store_path) {
  const auto bytes = read_file_bytes(meta_path_for(store_path));
  try {
    return meta_from_json(ojson::parse(bytes.begin(), bytes.end()));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, meta_path_for(store_path).string() + ": " + e.what());
  }
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

void check_same_campaign(const CampaignMeta& a, const CampaignMeta& b,
                         const std::string& context) {
  if (a.judge_id != b.judge_id || a.prompt_hash != b.prompt_hash || a.runs != b.runs) {
    throw Error(ErrorCode::CampaignMismatch,
                context + ": (" + a.judge_id + ", " + a.prompt_hash.substr(0, 12) + ", R=" +
                    std::to_string(a.runs) + ") vs (" + b.judge_id + ", " +
                    b.prompt_hash.substr(0, 12) + ", R=" + std::to_string(b.runs) + ")");
  }
}

struct ParsedLog {
  std::vector<RunRecord> records;
  /// Byte length of the complete-line prefix.
  std::size_t valid_bytes = 0;
  bool truncated_tail = false;
};

ParsedLog parse_log(const fs::path& path) {
  ParsedLog out;
  std::error_code ec;
  if (!fs::exists(path, ec)) return out;
  const auto bytes = read_file_bytes(path);
  const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    ++line_no;
    if (nl == std::string_view::npos) {
      out.truncated_tail = true;  // interrupted mid-write
      break;
    }
    const auto line = text.substr(pos, nl - pos);
    if (!line.empty()) out.records.push_back(record_from_json_line(line, line_no));
    pos = nl + 1;
    out.valid_bytes = pos;
  }
  return out;
}

void write_all(int fd, const std::string& data, const fs::path& path) {
  std::size_t written = 0;
  while (written < data.size()) {
    const ssize_t n = ::write(fd, data.data() + written, data.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::IoFailure, path.string() + ": " + std::strerror(errno));
    }
    written += static_cast<std::size_t>(n);
  }
}

}  // namespace

void sort_records(std::vector<RunRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const RunRecord& a, const RunRecord& b) { return a.key() < b.key(); });
}

RunStore RunStore::open(const fs::path& path, const CampaignMeta& meta, Options options) {
  if (meta.runs < 1) throw Error(ErrorCode::InvalidSpec, "campaign needs R >= 1");
  RunStore store;
  store.path_ = path;
  store.options_ = options;
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);

  const bool has_log = fs::exists(path, ec);
  const bool has_meta = fs::exists(meta_path_for(path), ec);
  if (has_meta) {
    store.meta_ = read_meta(path);
    check_same_campaign(store.meta_, meta, "cannot resume " + path.string());
  } else if (has_log && fs::file_size(path, ec) > 0) {
    throw Error(ErrorCode::IoFailure, path.string() + " exists without campaign metadata");
  } else {
    store.meta_ = meta;
    write_text_atomic(meta_path_for(path), meta_to_json(meta).dump(2) + "\n");
  }

  ParsedLog log = parse_log(path);
  for (auto& r : log.records) {
    if (!store.keys_.insert(r.key()).second) {
      throw Error(ErrorCode::DuplicateRun, path.string() + ": " + r.image_id + " " +
                                               encode_condition(r.condition) + " run " +
                                               std::to_string(r.run_index));
    }
    store.records_.push_back(std::move(r));
  }
  if (log.truncated_tail) {
    fs::resize_file(path, log.valid_bytes, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot trim partial line in " + path.string());
  }

  store.fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (store.fd_ < 0) {
    throw Error(ErrorCode::IoFailure, path.string() + ": " + std::strerror(errno));
  }
  return store;
}

RunStore::RunStore(RunStore&& other) noexcept
    : path_(std::move(other.path_)),
      meta_(std::move(other.meta_)),
      options_(other.options_),
      fd_(std::exchange(other.fd_, -1)),
      keys_(std::move(other.keys_)),
      records_(std::move(other.records_)) {}

RunStore& RunStore::operator=(RunStore&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    path_ = std::move(other.path_);
    meta_ = std::move(other.meta_);
    options_ = other.options_;
    fd_ = std::exchange(other.fd_, -1);
    keys_ = std::move(other.keys_);
    records_ = std::move(other.records_);
  }
  return *this;
}

RunStore::~RunStore() {
  // Leaves the log unsorted but consistent; reopening resumes it.
  if (fd_ >= 0) ::close(fd_);
}

void RunStore::append(const RunRecord& record) {
  if (closed()) throw Error(ErrorCode::StoreClosed, path_.string());
  if (record.judge_id != meta_.judge_id || record.prompt_hash != meta_.prompt_hash) {
    throw Error(ErrorCode::CampaignMismatch, "record judge/prompt differ from campaign");
  }
  if (record.run_index < 1 || record.run_index > meta_.runs) {
    throw Error(ErrorCode::InvalidSpec, "run index " + std::to_string(record.run_index) +
                                            " outside 1.." + std::to_string(meta_.runs));
  }
  if (record.ok() != record.verdict.has_value()) {
    throw Error(ErrorCode::InvalidSpec, "ok records carry a verdict, failed ones do not");
  }
  if (contains(record.key())) {
    throw Error(ErrorCode::DuplicateRun, record.image_id + " " +
                                             encode_condition(record.condition) + " run " +
                                             std::to_string(record.run_index));
  }
  write_all(fd_, record_to_json_line(record) + "\n", path_);
  if (options_.sync_each_append) ::fdatasync(fd_);
  keys_.insert(record.key());
  records_.push_back(record);
}

void RunStore::close() {
  if (closed()) return;
  ::close(fd_);
  fd_ = -1;
  sort_records(records_);
  std::string text;
  for (const auto& r : records_) {
    text += record_to_json_line(r);
    text += '\n';
  }
  write_text_atomic(path_, text);
}

RunSet load_run_set(const fs::path& path) {
  RunSet set;
  set.meta = read_meta(path);
  set.records = parse_log(path).records;
  sort_records(set.records);
  return set;
}

RunSet merge_run_sets(const std::vector<RunSet>& sets) {
  if (sets.empty()) return {};
  RunSet merged;
  merged.meta = sets.front().meta;
  std::set<RunKey> keys;
  for (const auto& s : sets) {
    check_same_campaign(merged.meta, s.meta, "cannot merge stores");
    for (const auto& r : s.records) {
      if (!keys.insert(r.key()).second) {
        throw Error(ErrorCode::DuplicateRun, "merged stores overlap on " + r.image_id + " " +
                                                 encode_condition(r.condition));
      }
      merged.records.push_back(r);
    }
  }
  sort_records(merged.records);
  return merged;
}

GroupedRuns group_runs(const RunSet& set, const ConditionFilter& filter) {
  std::map<std::pair<std::string, Condition>, std::vector<const RunRecord*>> buckets;
  for (const auto& r : set.records) {
    if (filter && !filter(r.condition)) continue;
    buckets[{r.image_id, r.condition}].push_back(&r);
  }
  const int runs = set.meta.runs;
  GroupedRuns out;
  for (auto& [key, recs] : buckets) {
    std::sort(recs.begin(), recs.end(),
              [](const RunRecord* a, const RunRecord* b) { return a->run_index < b->run_index; });
    int ok = 0, failed = 0;
    for (const auto* r : recs) (r->ok() ? ok : failed)++;
    bool complete = ok == runs && failed == 0 && static_cast<int>(recs.size()) == runs;
    for (int i = 0; complete && i < runs; ++i) complete = recs[i]->run_index == i + 1;
    if (complete) {
      RunGroup g{key.first, key.second, {}};
      for (const auto* r : recs) g.verdicts.push_back(*r->verdict);
      out.complete.push_back(std::move(g));
    } else {
      out.incomplete.push_back(
          {key.first, key.second, ok, failed, std::max(0, runs - ok - failed)});
    }
  }
  return out;
}

ScoreTuples score_tuples(const std::vector<RunGroup>& groups) {
  ScoreTuples out;
  for (const auto& g : groups) {
    auto& row = out.emplace_back();
    for (const auto& v : g.verdicts) row.push_back(v.score);
  }
  return out;
}

ConfidenceTuples confidence_tuples(const std::vector<RunGroup>& groups) {
  ConfidenceTuples out;
  for (const auto& g : groups) {
    auto& row = out.emplace_back();
    for (const auto& v : g.verdicts) row.push_back(v.confidence);
  }
  return out;
}

TextTuples explanation_tuples(const std::vector<RunGroup>& groups) {
  TextTuples out;
  for (const auto& g : groups) {
    auto& row = out.emplace_back();
    for (const auto& v : g.verdicts) row.push_back(v.explanation);
  }
  return out;
}

std::vector<double> PairedCell::score_residuals() const {
  std::vector<double> out;
  out.reserve(residuals.size());
  for (const auto& r : residuals) out.push_back(r.d_score);
  return out;
}

std::vector<double> PairedCell::confidence_residuals() const {
  std::vector<double> out;
  out.reserve(residuals.size());
  for (const auto& r : residuals) out.push_back(r.d_conf);
  return out;
}

namespace {

void check_provenance(const RunSet& set, const Condition& reference, const Condition& target) {
  const RunRecord* ref = nullptr;
  for (const auto& r : set.records) {
    if (r.condition == reference) {
      ref = &r;
      break;
    }
  }
  if (!ref) return;
  for (const auto& r : set.records) {
    if (r.condition != target && r.condition != reference) continue;
    if (r.prompt_hash != ref->prompt_hash || r.judge_id != ref->judge_id) {
      throw Error(ErrorCode::CampaignMismatch,
                  r.image_id + " " + encode_condition(r.condition) +
                      " was judged with a different prompt or judge than " +
                      encode_condition(reference));
    }
  }
}

}  // namespace

PairedCell pair_conditions(const RunSet& set, const Condition& reference,
                           const Condition& target) {
  check_provenance(set, reference, target);
  const auto ref_groups = group_runs(set, [&](const Condition& c) { return c == reference; });
  const auto tgt_groups = group_runs(set, [&](const Condition& c) { return c == target; });

  std::map<std::string, const RunGroup*> ref_by_id;
  for (const auto& g : ref_groups.complete) ref_by_id[g.image_id] = &g;

  PairedCell cell;
  cell.condition = target;
  for (const auto& g : tgt_groups.complete) {
    const auto it = ref_by_id.find(g.image_id);
    if (it == ref_by_id.end()) {
      ++cell.images_excluded;
      continue;
    }
    ++cell.images_paired;
    for (std::size_t r = 0; r < g.verdicts.size(); ++r) {
      const auto& clean = it->second->verdicts[r];
      const auto& corrupted = g.verdicts[r];
      cell.residuals.push_back({g.image_id, static_cast<int>(r) + 1,
                                static_cast<double>(clean.score - corrupted.score),
                                clean.confidence - corrupted.confidence});
    }
  }
  cell.images_excluded += static_cast<int>(tgt_groups.incomplete.size());
  return cell;
}

PairedResiduals pair_with_clean(const RunSet& set) {
  std::set<Condition> targets;
  for (const auto& r : set.records) {
    if (!r.condition.is_clean()) targets.insert(r.condition);
  }
  PairedResiduals out;
  for (const auto& c : targets) out.emplace(c, pair_conditions(set, Condition::clean(), c));
  return out;
}

PairedResiduals pair_with_clean(const RunSet& clean, const RunSet& corrupted) {
  check_same_campaign(clean.meta, corrupted.meta, "clean and corrupted campaigns differ");
  RunSet combined;
  combined.meta = clean.meta;
  for (const auto& r : clean.records) {
    if (r.condition.is_clean()) combined.records.push_back(r);
  }
  for (const auto& r : corrupted.records) {
    if (!r.condition.is_clean()) combined.records.push_back(r);
  }
  return pair_with_clean(combined);
}

}  // namespace segjudge
