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

#include "segjudge/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace segjudge {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

Error bad(const std::string& why) { return Error(ErrorCode::InvalidConfig, why); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw bad(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) throw bad("unknown key " + where + "." + key);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw bad(std::string("bad value for ") + key + ": " + e.what());
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

std::vector<std::string> split(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

fs::path HarnessConfig::manifest_path() const {
  return manifest.empty() ? out / "manifest.csv" : manifest;
}

fs::path HarnessConfig::store_path() const { return store.empty() ? out / "runs.jsonl" : store; }

void HarnessConfig::validate() const {
  if (out.empty()) throw bad("out must be set");
  if (families.empty()) throw bad("families must not be empty");
  for (Family f : families) {
    if (f == Family::Clean) throw bad("clean is not a corruption family");
  }
  if (severities.empty()) throw bad("severities must not be empty");
  for (int s : severities) {
    if (s < 1 || s > kMaxSeverity) throw bad("severity " + std::to_string(s) + " outside 1..3");
  }
  if (backend != "mock" && backend != "live") throw bad("backend must be mock or live");
  if (runs < 2) throw bad("runs must be >= 2");
  if (!(tolerance.epsilon >= 0.0)) throw bad("epsilon must be >= 0");
  if (!(failure_ceiling >= 0.0 && failure_ceiling <= 1.0)) throw bad("failure_ceiling must be in [0,1]");
  if (workers < 1) throw bad("workers must be >= 1");
  judge.validate();
  mock.validate();
}

std::vector<Family> parse_family_list(const std::string& csv) {
  std::vector<Family> out;
  for (const auto& name : split(csv)) {
    try {
      out.push_back(parse_family(name));
    } catch (const Error& e) {
      throw bad(e.what());
    }
  }
  return out;
}

std::vector<int> parse_severity_list(const std::string& csv) {
  std::vector<int> out;
  for (const auto& tok : split(csv)) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw bad("bad severity " + tok);
    out.push_back(v);
  }
  return out;
}

HarnessConfig config_from_json(const json& j, const fs::path& base) {
  check_keys(j, "config",
             {"manifest", "out", "store", "seed", "families", "severities", "overlay", "backend",
              "judge", "mock", "runs", "epsilon", "failure_ceiling", "pool_severities",
              "sync_each_append", "workers"});
  HarnessConfig c;
  std::string s;
  if (j.contains("manifest")) {
    read(j, "manifest", s);
    c.manifest = resolve(base, s);
  }
  if (j.contains("out")) {
    read(j, "out", s);
    c.out = resolve(base, s);
  }
  if (j.contains("store")) {
    read(j, "store", s);
    c.store = resolve(base, s);
  }
  read(j, "seed", c.seed);
  if (j.contains("families")) {
    std::vector<std::string> names;
    read(j, "families", names);
    c.families.clear();
    for (const auto& n : names) {
      auto f = parse_family_list(n);
      c.families.insert(c.families.end(), f.begin(), f.end());
    }
  }
  read(j, "severities", c.severities);
  if (j.contains("overlay")) {
    const auto& o = j["overlay"];
    check_keys(o, "overlay", {"color", "alpha"});
    std::array<int, 3> color{c.overlay.color()[0], c.overlay.color()[1], c.overlay.color()[2]};
    double alpha = c.overlay.alpha();
    read(o, "color", color);
    read(o, "alpha", alpha);
    std::array<std::uint8_t, 3> rgb{};
    for (std::size_t i = 0; i < 3; ++i) {
      if (color[i] < 0 || color[i] > 255) throw bad("overlay color channels must be 0..255");
      rgb[i] = static_cast<std::uint8_t>(color[i]);
    }
    try {
      c.overlay = OverlayStyle(rgb, alpha);
    } catch (const Error& e) {
      throw bad(e.what());
    }
  }
  read(j, "backend", c.backend);
  if (j.contains("judge")) {
    const auto& o = j["judge"];
    check_keys(o, "judge", {"endpoint", "model", "temperature", "top_p", "timeout_s",
                            "max_retries", "retry_backoff_ms", "max_parallel", "api_key_env"});
    read(o, "endpoint", c.judge.endpoint);
    read(o, "model", c.judge.model);
    if (o.contains("temperature") && !o["temperature"].is_null()) {
      double t = 0;
      read(o, "temperature", t);
      c.judge.temperature = t;
    }
    if (o.contains("top_p") && !o["top_p"].is_null()) {
      double t = 0;
      read(o, "top_p", t);
      c.judge.top_p = t;
    }
    read(o, "timeout_s", c.judge.timeout_s);
    read(o, "max_retries", c.judge.max_retries);
    read(o, "retry_backoff_ms", c.judge.retry_backoff_ms);
    read(o, "max_parallel", c.judge.max_parallel);
    read(o, "api_key_env", c.judge.api_key_env);
  }
  if (j.contains("mock")) {
    const auto& o = j["mock"];
    check_keys(o, "mock", {"seed", "p_flip", "confidence_base", "confidence_slope", "jitter",
                           "good_coverage", "good_scores", "poor_scores"});
    read(o, "seed", c.mock.seed);
    read(o, "p_flip", c.mock.p_flip);
    read(o, "confidence_base", c.mock.confidence_base);
    read(o, "confidence_slope", c.mock.confidence_slope);
    read(o, "jitter", c.mock.jitter);
    if (o.contains("good_coverage")) {
      std::array<double, 2> band{};
      read(o, "good_coverage", band);
      c.mock.good_coverage_min = band[0];
      c.mock.good_coverage_max = band[1];
    }
    read(o, "good_scores", c.mock.good_scores);
    read(o, "poor_scores", c.mock.poor_scores);
  }
  read(j, "runs", c.runs);
  read(j, "epsilon", c.tolerance.epsilon);
  read(j, "failure_ceiling", c.failure_ceiling);
  read(j, "pool_severities", c.pool_severities);
  read(j, "sync_each_append", c.sync_each_append);
  read(j, "workers", c.workers);
  return c;
}

HarnessConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw bad("config " + path.string() + " is not valid JSON");
  return config_from_json(j, path.parent_path());
}

nlohmann::ordered_json config_to_json(const HarnessConfig& c) {
  nlohmann::ordered_json j;
  j["manifest"] = c.manifest_path().string();
  j["out"] = c.out.string();
  j["store"] = c.store_path().string();
  j["seed"] = c.seed;
  std::vector<std::string> fams;
  for (Family f : c.families) fams.emplace_back(family_name(f));
  j["families"] = fams;
  j["severities"] = c.severities;
  j["overlay"] = {{"color", {c.overlay.color()[0], c.overlay.color()[1], c.overlay.color()[2]}},
                  {"alpha", c.overlay.alpha()},
                  {"mode", "solid"}};
  j["backend"] = c.backend;
  j["runs"] = c.runs;
  j["epsilon"] = c.tolerance.epsilon;
  j["failure_ceiling"] = c.failure_ceiling;
  j["pool_severities"] = c.pool_severities;
  return j;
}

}  // namespace segjudge
