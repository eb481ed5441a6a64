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

#include "segjudge/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "segjudge/csv.hpp"
#include "segjudge/raster.hpp"

namespace segjudge {

namespace fs = std::filesystem;

namespace {

bool row_less(const ManifestRow& a, const ManifestRow& b) {
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  return a.condition < b.condition;
}

bool parse_bool(std::string value, std::size_t line) {
  std::transform(value.begin(), value.end(), value.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (value.empty() || value == "0" || value == "false") return false;
  if (value == "1" || value == "true") return true;
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ": mask_reuse must be 0/1, got '" + value + "'");
}

fs::path resolve(const fs::path& base, const std::string& field) {
  if (field.empty()) return {};
  const fs::path p(field);
  return (p.is_absolute() ? p : base / p).lexically_normal();
}

std::string relativize(const fs::path& base, const fs::path& p) {
  if (p.empty()) return {};
  const fs::path abs = fs::absolute(p).lexically_normal();
  const fs::path rel = abs.lexically_relative(fs::absolute(base).lexically_normal());
  return rel.empty() ? abs.generic_string() : rel.generic_string();
}

}  // namespace

Manifest::Manifest(std::vector<ManifestRow> rows) : rows_(std::move(rows)) {}

const ManifestRow* Manifest::find(std::string_view image_id,
                                  const Condition& condition) const {
  for (const auto& row : rows_) {
    if (row.image_id == image_id && row.condition == condition) return &row;
  }
  return nullptr;
}

void Manifest::upsert(ManifestRow row) {
  for (auto& existing : rows_) {
    if (existing.image_id == row.image_id && existing.condition == row.condition) {
      existing = std::move(row);
      return;
    }
  }
  rows_.push_back(std::move(row));
}

void Manifest::sort() { std::stable_sort(rows_.begin(), rows_.end(), row_less); }

void Manifest::validate() const {
  std::set<std::pair<std::string, Condition>> keys;
  std::set<std::string> clean_ids;
  for (const auto& row : rows_) {
    if (!keys.emplace(row.image_id, row.condition).second) {
      throw Error(ErrorCode::DuplicateKey,
                  row.image_id + " / " + encode_condition(row.condition));
    }
    if (row.condition.is_clean()) clean_ids.insert(row.image_id);
  }
  for (const auto& row : rows_) {
    if (!row.condition.is_clean() && !clean_ids.count(row.image_id)) {
      throw Error(ErrorCode::MissingCleanReference,
                  row.image_id + " / " + encode_condition(row.condition) +
                      " has no clean row");
    }
  }
}

Manifest load_manifest(const fs::path& path, ManifestLoadOptions options) {
  std::ifstream in(path);
  if (!in) {
    std::error_code ec;
    throw Error(fs::exists(path, ec) ? ErrorCode::IoFailure : ErrorCode::MissingFile,
                "manifest " + path.string());
  }
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = csv::split_line(line);
    if (!fields) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": unterminated quote");
    }
    if (!header_seen) {
      if (csv::join(*fields) != kManifestHeader) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                               ": expected header '" +
                                               std::string(kManifestHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields->size() != 6) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 6 fields, got " +
                                             std::to_string(fields->size()));
    }
    const auto& f = *fields;
    if (f[0].empty()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": empty image_id");
    }
    ManifestRow row;
    row.image_id = f[0];
    try {
      row.condition = decode_condition(f[1] + "-" + f[2]);
    } catch (const Error& e) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + e.what());
    }
    row.image_path = resolve(base, f[3]);
    row.mask_path = resolve(base, f[4]);
    row.mask_reuse = parse_bool(f[5], line_no);
    if (row.condition.is_clean() && row.image_path.empty()) {
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": clean row needs an image path");
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw Error(ErrorCode::ParseError, "line 1: missing header");

  Manifest manifest(std::move(rows));
  manifest.validate();
  if (options.check_files) {
    for (const auto& row : manifest.rows()) {
      for (const auto* p : {&row.image_path, &row.mask_path}) {
        std::error_code ec;
        if (!p->empty() && !fs::exists(*p, ec)) {
          throw Error(ErrorCode::MissingFile, p->string());
        }
      }
    }
  }
  return manifest;
}

void save_manifest(const fs::path& path, const Manifest& manifest) {
  Manifest sorted = manifest;
  sorted.sort();
  const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
  std::ostringstream out;
  out << kManifestHeader << '\n';
  for (const auto& row : sorted.rows()) {
    out << csv::join({row.image_id, std::string(family_name(row.condition.family())),
                      std::to_string(row.condition.severity()),
                      relativize(base, row.image_path), relativize(base, row.mask_path),
                      row.mask_reuse ? "1" : "0"})
        << '\n';
  }
  const std::string text = out.str();
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

}  // namespace segjudge
