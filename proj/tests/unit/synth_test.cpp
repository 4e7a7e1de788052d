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

#include "dataset.hpp"
#include "wbaug/color.hpp"
#include "wbaug/error.hpp"
#include "wbaug/pipeline.hpp"
#include "wbaug/synth.hpp"

namespace wbaug {
namespace {

namespace fs = std::filesystem;

double channel_mean(const ImageBuffer& img, int c) {
  double s = 0.0;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) s += img.data()[3 * i + c];
  return s / static_cast<double>(img.pixel_count());
}

TEST(Emulation, DefaultGainsAreMonotoneInTemperature) {
  const CameraEmulation e = CameraEmulation::defaults();
  ASSERT_EQ(e.gains.size(), 5u);
  double prev_r = 0.0, prev_b = 10.0;
  for (const auto& [t, g] : e.gains) {
    EXPECT_EQ(g[1], 1.0);
    EXPECT_GT(g[0], prev_r) << t;
    EXPECT_LT(g[2], prev_b) << t;
    prev_r = g[0];
    prev_b = g[2];
  }
  EXPECT_EQ(e.settings(), canonical_settings());
  EXPECT_EQ(e.reference_style, Style::AdobeStandard);
}

TEST(Emulation, ParsesConfig) {
  const CameraEmulation e = CameraEmulation::parse(
      "# two temperatures\n"
      "gain 3000 0.7 1 1.5\n"
      "gain 6000 1.1 1 0.9   # cool\n"
      "style CS gamma 0.8\n"
      "style AS identity\n"
      "reference CS\n");
  EXPECT_EQ(e.gains.size(), 2u);
  EXPECT_EQ(e.gains.at(3000)[2], 1.5);
  EXPECT_EQ(e.styles.at(Style::CameraStandard).gamma, 0.8);
  EXPECT_EQ(e.styles.at(Style::AdobeStandard).gamma, 1.0);
  EXPECT_EQ(e.reference_style, Style::CameraStandard);
  EXPECT_EQ(e.settings().size(), 4u);
}

TEST(Emulation, RejectsBadConfig) {
  for (const char* bad : {"gain 3000 0.7 1\nstyle AS identity\n",
                          "gain 3000 0.7 1.2 1.5\nstyle AS identity\n",
                          "gain 3000 -0.7 1 1.5\nstyle AS identity\n",
                          "gain 3000 0.7 1 1.5\nstyle XS identity\n",
                          "gain 3000 0.7 1 1.5\nstyle AS gamma 0\n",
                          "gain 3000 0.7 1 1.5\nstyle AS curvy\n",
                          "gain 3000 0.7 1 1.5\nstyle AS identity\nreference CS\n",
                          "gain 3000 0.7 1 1.5\n", "style AS identity\n",
                          "gain 3000 0.7 1 1.5\nstyle AS identity\nexposure 2\n"}) {
    EXPECT_THROW(CameraEmulation::parse(bad), Error) << bad;
  }
}

TEST(Render, UnitGainIdentityCurveIsNeutral) {
  const ImageBuffer base = random_base_image(3, 16, 16);
  const ImageBuffer out = render(base, {1, 1, 1}, ToneCurve{});
  EXPECT_LT(mean_abs_error(base, out), 1e-6);
}

TEST(Render, PairAtUnitGainIsIdentical) {
  const ImageBuffer base = random_base_image(4, 16, 16);
  for (Style s : {Style::CameraStandard, Style::AdobeStandard}) {
    const RenditionPair p = render_pair(base, 5500, s);
    EXPECT_EQ(p.correct, p.cast);
  }
}

TEST(Render, WarmSettingShiftsTowardBlue) {
  const ImageBuffer base = random_base_image(5, 32, 32);
  const RenditionPair p = render_pair(base, 2850, Style::AdobeStandard);
  EXPECT_LT(channel_mean(p.cast, 0), channel_mean(p.correct, 0));
  EXPECT_GT(channel_mean(p.cast, 2), channel_mean(p.correct, 2));
  EXPECT_NEAR(channel_mean(p.cast, 1), channel_mean(p.correct, 1), 1e-9);
}

TEST(Render, MatchesPerChannelFormula) {
  const ImageBuffer base(1, 1, {0.5f, 0.25f, 0.75f});
  const ImageBuffer out = render(base, {0.6, 1.0, 1.7}, ToneCurve{0.85});
  const double want_b = srgb_encode(std::min(1.0, std::pow(std::min(1.0, 1.7 * srgb_decode(0.75)), 0.85)));
  const double want_r = srgb_encode(std::pow(0.6 * srgb_decode(0.5), 0.85));
  EXPECT_NEAR(out.pixel(0).r, want_r, 1e-6);
  EXPECT_NEAR(out.pixel(0).b, want_b, 1e-6);
}

TEST(Render, PairRejectsUnknownSetting) {
  EXPECT_THROW(render_pair(ImageBuffer(2, 2), 4000, Style::CameraStandard), Error);
  EXPECT_THROW(render_pair(ImageBuffer(2, 2), 5500, Style::Corrected), Error);
}

TEST(Scenes, DeterministicPerSeed) {
  EXPECT_EQ(random_base_image(42, 20, 10), random_base_image(42, 20, 10));
  EXPECT_NE(random_base_image(42, 20, 10), random_base_image(43, 20, 10));
  const ImageBuffer img = random_base_image(44, 20, 10);
  EXPECT_FALSE(detect_grayscale(img));
  for (float v : img.data()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
}

TEST(MakeManifest, WritesGroupsAndExcludesGrayscale) {
  testing::TempDir dir("synth");
  auto bases = testing::scene_bases(3, 100, 12, 8);
  ImageBuffer gray(12, 8);
  for (std::size_t i = 0; i < gray.pixel_count(); ++i) gray.set_pixel(i, {0.4, 0.4, 0.4});
  bases.push_back({"flat", gray});
  const SynthOutput out = make_manifest(bases, CameraEmulation::defaults(), dir.path(), 2);
  EXPECT_EQ(out.manifest.groups.size(), 3u);
  EXPECT_EQ(out.files_written, 33u);
  ASSERT_EQ(out.excluded.size(), 1u);
  EXPECT_EQ(out.excluded[0].first, "flat");
  EXPECT_EQ(out.excluded[0].second, kGrayscaleReason);
  EXPECT_FALSE(fs::exists(dir.path() / "flat.png"));

  const DatasetManifest back = read_manifest(out.manifest_path);
  ASSERT_EQ(back.groups.size(), 3u);
  const auto& g = back.groups[0];
  EXPECT_EQ(g.correct, "scene_0100.png");
  EXPECT_EQ(g.variants.size(), 10u);
  EXPECT_EQ(g.reference_for(Style::CameraStandard), "scene_0100_5500K_CS.png");
  EXPECT_EQ(g.reference_for(Style::AdobeStandard), "scene_0100.png");
  for (const auto& [s, p] : g.variants) EXPECT_TRUE(fs::exists(dir.path() / p)) << p;
}

TEST(MakeManifest, WritesReferencesWithoutUnitGain) {
  testing::TempDir dir("synth_ref");
  const CameraEmulation e = CameraEmulation::parse(
      "gain 3000 0.7 1 1.5\nstyle CS gamma 0.8\nstyle AS identity\nreference AS\n");
  const SynthOutput out = make_manifest(testing::scene_bases(2, 0, 8, 8), e, dir.path(), 1);
  EXPECT_EQ(out.files_written, 2u * 4u);
  EXPECT_TRUE(fs::exists(dir.path() / "scene_0000_reference_CS.png"));
  EXPECT_EQ(out.manifest.groups[0].reference_for(Style::CameraStandard),
            "scene_0000_reference_CS.png");
}

TEST(MakeManifest, RejectsDuplicateNames) {
  testing::TempDir dir("synth_dup");
  auto bases = testing::scene_bases(2, 0, 8, 8);
  bases[1].name = bases[0].name;
  EXPECT_THROW(make_manifest(bases, CameraEmulation::defaults(), dir.path(), 1), Error);
  EXPECT_THROW(make_manifest({}, CameraEmulation::defaults(), dir.path(), 1), Error);
}

}  // namespace
}  // namespace wbaug
