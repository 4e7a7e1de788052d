// Copyright 2026 The wbaug Authors
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

#include <algorithm>
#include <cstring>
#include <functional>
#include <random>

#include "dataset.hpp"
#include "wbaug/error.hpp"
#include "wbaug/image_io.hpp"
#include "wbaug/model.hpp"

namespace wbaug {
namespace {

using testing::shared_dataset;

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no exception";
  return ErrorKind::InvalidState;
}

TEST(Manifest, ParsesGroupsCommentsAndReferences) {
  const auto m = parse_manifest(
      "# comment\n"
      "\n"
      "a.png;2850K_CS=a1.png; 7500K_AS = a2.png\n"
      "  b.png;reference_CS=b_ref.png;5500K_CS=b1.png  \n",
      "/data");
  ASSERT_EQ(m.groups.size(), 2u);
  EXPECT_EQ(m.base_dir, "/data");
  EXPECT_EQ(m.groups[0].correct, "a.png");
  EXPECT_EQ(m.groups[0].line, 3u);
  ASSERT_EQ(m.groups[0].variants.size(), 2u);
  EXPECT_EQ(m.groups[0].variants[1].first, (WbSetting{7500, Style::AdobeStandard}));
  EXPECT_EQ(m.groups[0].variants[1].second, "a2.png");
  EXPECT_EQ(m.groups[1].reference_for(Style::CameraStandard), "b_ref.png");
  EXPECT_EQ(m.groups[1].reference_for(Style::AdobeStandard), "b.png");
}

TEST(Manifest, FormatRoundTrips) {
  const std::string text =
      "a.png;reference_CS=r.png;2850K_CS=a1.png;3800K_AS=a2.png\nb.png;6500K_CS=b1.png\n";
  const auto m = parse_manifest(text, "");
  EXPECT_EQ(format_manifest(m), text);
}

TEST(Manifest, ErrorsNameTheLine) {
  for (const char* bad : {"a.png\n", "a.png;2850K_CS\n", "a.png;2850K_CS=\n", "a.png;9K_ZZ=x\n",
                          "a.png;2850K_CS=x;2850K_CS=y\n", "a.png;corrected=x\n",
                          "a.png;reference_XX=x;2850K_CS=y\n",
                          "a.png;reference_CS=x;reference_CS=z;2850K_CS=y\n", ";2850K_CS=x\n"}) {
    try {
      parse_manifest(std::string("# header\n") + bad, "");
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
      EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
  }
}

TEST(Manifest, MissingFileIsIoError) {
  EXPECT_EQ(kind_of([] { read_manifest("/nonexistent/manifest.txt"); }), ErrorKind::Io);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ull);
}

TEST(Direction, Names) {
  EXPECT_EQ(parse_direction("emulate"), Direction::Emulation);
  EXPECT_EQ(parse_direction("correct"), Direction::Correction);
  EXPECT_FALSE(parse_direction("sideways"));
  EXPECT_STREQ(to_string(Direction::Correction), "correct");
}

TEST(Ingest, EmulationGroupHasOneRecordWithTenTransforms) {
  const auto& ds = shared_dataset();
  const auto& g = ds.synth.manifest.groups[0];
  const auto recs = ingest_group(g, ds.synth.manifest.base_dir, {});
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_EQ(recs[0].id, fnv1a64(g.correct));
  EXPECT_EQ(recs[0].transforms.size(), 10u);
  EXPECT_EQ(recs[0].histogram.size(), 10800u);
  for (const auto& [s, t] : recs[0].transforms) {
    EXPECT_EQ(t.transform.tag, s);
    EXPECT_LT(t.residual, 5e-3) << setting_name(s);
  }
  // The reference style at unit gain is the correct image itself.
  EXPECT_LT(recs[0].transforms.at({5500, Style::AdobeStandard}).residual, 1e-6);
}

TEST(Ingest, CorrectionGroupHasOneRecordPerVariant) {
  const auto& ds = shared_dataset();
  const auto& g = ds.synth.manifest.groups[1];
  ModelParams p;
  p.direction = Direction::Correction;
  const auto recs = ingest_group(g, ds.synth.manifest.base_dir, p);
  ASSERT_EQ(recs.size(), 10u);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    ASSERT_EQ(recs[i].transforms.size(), 1u);
    EXPECT_TRUE(recs[i].transforms.contains(WbSetting::corrected()));
    EXPECT_EQ(recs[i].id, fnv1a64(g.correct + "|" + setting_name(g.variants[i].first)));
    EXPECT_EQ(recs[i].provenance[1], g.reference_for(g.variants[i].first.style));
  }
}

TEST(Ingest, MismatchedSizesAreRejected) {
  testing::TempDir dir("ingest");
  write_image(dir.path() / "a.png", ImageBuffer(8, 8, std::vector<float>(192, 0.5f)));
  write_image(dir.path() / "b.png", ImageBuffer(8, 9, std::vector<float>(216, 0.5f)));
  const auto m = parse_manifest("a.png;2850K_CS=b.png\n", dir.path());
  EXPECT_EQ(kind_of([&] { ingest_group(m.groups[0], m.base_dir, {}); }), ErrorKind::InvalidInput);
}

class BuildTest : public ::testing::Test {
 protected:
  static const BuildResult& emulation() {
    static const BuildResult r = build_model(shared_dataset().synth.manifest, {}, 1);
    return r;
  }
};

TEST_F(BuildTest, ProducesOneRecordPerGroup) {
  const auto& r = emulation();
  EXPECT_EQ(r.model.records().size(), 60u);
  EXPECT_EQ(r.model.vocabulary(), canonical_settings());
  EXPECT_EQ(r.report.accepted, 60u);
  EXPECT_EQ(r.report.rejected, 0u);
  EXPECT_EQ(r.model.pca().output_dim(), 55u);
  EXPECT_EQ(r.report.mean_residual.size(), 10u);
  EXPECT_GT(r.report.overall_mean_residual, 0.0);
  EXPECT_LT(r.report.overall_mean_residual, 5e-3);
  EXPECT_TRUE(std::is_sorted(r.model.records().begin(), r.model.records().end(),
                             [](const auto& a, const auto& b) { return a.id < b.id; }));
  EXPECT_NE(r.report.to_text().find("accepted: 60"), std::string::npos) << r.report.to_text();
}

TEST_F(BuildTest, TooFewGroupsIsRejected) {
  auto m = shared_dataset().synth.manifest;
  m.groups.resize(55);
  EXPECT_EQ(kind_of([&] { build_model(m, {}, 1); }), ErrorKind::InvalidInput);
}

TEST_F(BuildTest, BadGroupsAreReportedNotFatal) {
  auto m = shared_dataset().synth.manifest;
  m.groups[3].variants[0].second = "missing.png";
  m.groups.push_back(m.groups[10]);
  const BuildResult r = build_model(m, {}, 1);
  EXPECT_EQ(r.report.accepted, 59u);
  EXPECT_EQ(r.report.rejected, 2u);
  EXPECT_FALSE(r.report.outcomes[3].accepted);
  EXPECT_NE(r.report.outcomes[3].reason.find("missing.png"), std::string::npos);
  EXPECT_NE(r.report.outcomes.back().reason.find("duplicate"), std::string::npos);
}

TEST_F(BuildTest, VocabularyIsSharedSettings) {
  auto m = shared_dataset().synth.manifest;
  m.groups[7].variants.pop_back();
  const BuildResult r = build_model(m, {}, 1);
  EXPECT_EQ(r.model.vocabulary().size(), 9u);
  EXPECT_FALSE(r.model.has_setting({7500, Style::AdobeStandard}));
  EXPECT_EQ(r.report.notes.size(), 1u);
}

TEST_F(BuildTest, ManifestOrderDoesNotMatter) {
  auto m = shared_dataset().synth.manifest;
  std::shuffle(m.groups.begin(), m.groups.end(), std::mt19937_64(3));
  const BuildResult r = build_model(m, {}, 2);
  EXPECT_EQ(serialize_model(r.model), serialize_model(emulation().model));
}

TEST_F(BuildTest, CorrectionModelHasTenRecordsPerGroup) {
  ModelParams p;
  p.direction = Direction::Correction;
  const BuildResult r = build_model(shared_dataset().synth.manifest, p, 1);
  EXPECT_EQ(r.model.records().size(), 600u);
  EXPECT_EQ(r.model.vocabulary(), std::vector<WbSetting>{WbSetting::corrected()});
}

TEST_F(BuildTest, InvalidParamsAreRejected) {
  ModelParams p;
  p.sigma = 0.0;
  EXPECT_EQ(kind_of([&] { build_model(shared_dataset().synth.manifest, p, 1); }),
            ErrorKind::InvalidInput);
  p = {};
  p.histogram.bins = 4;  // 48-dim histogram cannot hold 55 components
  EXPECT_EQ(kind_of([&] { build_model(shared_dataset().synth.manifest, p, 1); }),
            ErrorKind::InvalidInput);
}

TEST_F(BuildTest, SerializationRoundTrips) {
  const auto bytes = serialize_model(emulation().model);
  const WbModel back = deserialize_model(bytes);
  EXPECT_EQ(back, emulation().model);
  EXPECT_EQ(serialize_model(back), bytes);
  EXPECT_EQ(std::memcmp(bytes.data(), "WBM1", 4), 0);
}

TEST_F(BuildTest, SaveLoadIsByteIdentical) {
  testing::TempDir dir("model");
  save_model(emulation().model, dir.path() / "m.wbm");
  const WbModel loaded = load_model(dir.path() / "m.wbm");
  save_model(loaded, dir.path() / "n.wbm");
  EXPECT_EQ(testing::file_bytes(dir.path() / "m.wbm"), testing::file_bytes(dir.path() / "n.wbm"));
  EXPECT_FALSE(std::filesystem::exists(dir.path() / "m.wbm.tmp"));
  EXPECT_EQ(model_checksum(loaded), model_checksum(emulation().model));
}

TEST_F(BuildTest, DetectsCorruption) {
  const auto good = serialize_model(emulation().model);
  auto flipped = good;
  flipped[good.size() / 2] ^= 0x01;
  EXPECT_EQ(kind_of([&] { deserialize_model(flipped); }), ErrorKind::Corruption);
  auto truncated = good;
  truncated.resize(good.size() - 100);
  EXPECT_EQ(kind_of([&] { deserialize_model(truncated); }), ErrorKind::Corruption);
  auto magic = good;
  magic[0] = 'X';
  EXPECT_EQ(kind_of([&] { deserialize_model(magic); }), ErrorKind::Corruption);
  EXPECT_EQ(kind_of([&] { deserialize_model(std::vector<std::uint8_t>{}); }), ErrorKind::Corruption);
}

TEST_F(BuildTest, RejectsOtherFormatVersions) {
  auto bytes = serialize_model(emulation().model);
  bytes[4] = 2;
  EXPECT_EQ(kind_of([&] { deserialize_model(bytes); }), ErrorKind::UnsupportedVersion);
}

TEST_F(BuildTest, RejectsOtherKernelOrdering) {
  auto bytes = serialize_model(emulation().model);
  const std::string needle = kKernelOrdering;
  auto it = std::search(bytes.begin(), bytes.end(), needle.begin(), needle.end());
  ASSERT_NE(it, bytes.end());
  *it = 'G';  // "G,G,B,..."
  const std::uint64_t sum = fnv1a64({reinterpret_cast<const char*>(bytes.data()), bytes.size() - 8});
  for (int i = 0; i < 8; ++i) bytes[bytes.size() - 8 + i] = static_cast<std::uint8_t>(sum >> (8 * i));
  EXPECT_EQ(kind_of([&] { deserialize_model(bytes); }), ErrorKind::UnsupportedVersion);
}

TEST_F(BuildTest, DescribeListsKeyFields) {
  const std::string text = describe_model(emulation().model);
  for (const char* key : {"format_version: 1", "direction: emulate", "records: 60",
                          "histogram_bins: 60", "feature_dim: 55", "k: 25", "sigma: 0.25",
                          "kernel: R,G,B,RG,RB,GB,RR,GG,BB", "checksum: "})
    EXPECT_NE(text.find(key), std::string::npos) << key;
}

TEST_F(BuildTest, UnknownRecordIdThrows) {
  EXPECT_THROW(emulation().model.record(12345), Error);
}

}  // namespace
}  // namespace wbaug
