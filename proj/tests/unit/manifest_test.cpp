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

#include <fstream>

#include "segjudge/csv.hpp"
#include "segjudge/manifest.hpp"
#include "test_support.hpp"

namespace segjudge {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

ErrorCode load_error(const fs::path& p, ManifestLoadOptions opts = {false}) {
  try {
    load_manifest(p, opts);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "loaded";
  return ErrorCode::IoFailure;
}

const std::string kHeader = "image_id,family,severity,image_path,mask_path,mask_reuse\n";

TEST(CsvTest, QuotingRoundTrip) {
  const std::vector<std::string> fields = {"a", "b,c", "say \"hi\"", ""};
  const auto back = csv::split_line(csv::join(fields));
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(*back, fields);
  EXPECT_FALSE(csv::split_line("\"open").has_value());
}

TEST(ManifestTest, PairedCorpusIsValid) {
  TempDir dir;
  write(dir / "m.csv", kHeader +
                           "a,clean,0,a.png,a_mask.png,0\n"
                           "b,clean,0,b.png,b_mask.png,0\n"
                           "c,clean,0,c.png,c_mask.png,0\n"
                           "a,fog,1,,a_mask.png,1\n"
                           "b,fog,1,,b_mask.png,1\n"
                           "c,fog,1,,c_mask.png,1\n");
  const Manifest m = load_manifest(dir / "m.csv", {false});
  EXPECT_EQ(m.rows().size(), 6u);
  const ManifestRow* row = m.find("b", Condition(Family::Fog, 1));
  ASSERT_NE(row, nullptr);
  EXPECT_TRUE(row->mask_reuse);
  EXPECT_TRUE(row->image_path.empty());
  EXPECT_EQ(row->mask_path, (dir / "b_mask.png").lexically_normal());
}

TEST(ManifestTest, RejectsOrphansAndDuplicates) {
  TempDir dir;
  write(dir / "orphan.csv", kHeader + "a,clean,0,a.png,m.png,0\nz,fog,1,,m.png,1\n");
  EXPECT_EQ(load_error(dir / "orphan.csv"), ErrorCode::MissingCleanReference);
  write(dir / "dup.csv", kHeader + "a,clean,0,a.png,m.png,0\na,clean,0,b.png,m.png,0\n");
  EXPECT_EQ(load_error(dir / "dup.csv"), ErrorCode::DuplicateKey);
}

TEST(ManifestTest, ParseErrorsNameTheLine) {
  TempDir dir;
  write(dir / "bad.csv", kHeader + "a,clean,0,a.png,m.png,0\nb,fog,x,,m.png,1\n");
  try {
    load_manifest(dir / "bad.csv", {false});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  write(dir / "hdr.csv", "id,fam\n");
  EXPECT_EQ(load_error(dir / "hdr.csv"), ErrorCode::ParseError);
  write(dir / "reuse.csv", kHeader + "a,clean,0,a.png,m.png,maybe\n");
  EXPECT_EQ(load_error(dir / "reuse.csv"), ErrorCode::ParseError);
}

TEST(ManifestTest, MissingFiles) {
  TempDir dir;
  EXPECT_EQ(load_error(dir / "absent.csv"), ErrorCode::MissingFile);
  write(dir / "m.csv", kHeader + "a,clean,0,a.png,m.png,0\n");
  EXPECT_EQ(load_error(dir / "m.csv", {true}), ErrorCode::MissingFile);
}

TEST(ManifestTest, SaveLoadRoundTripUsesRelativePaths) {
  TempDir dir;
  const auto corpus = testing::write_clean_corpus(dir.path(), 3, 8, 8);
  const std::string text = testing::read_text(corpus.manifest_path);
  EXPECT_NE(text.find("images/img0001.png"), std::string::npos);
  EXPECT_EQ(text.find(dir.path().string()), std::string::npos);
  const Manifest back = load_manifest(corpus.manifest_path);
  ASSERT_EQ(back.rows().size(), 3u);
  EXPECT_EQ(back.rows()[1].image_path, (dir / "images/img0001.png").lexically_normal());
}

}  // namespace
}  // namespace segjudge
