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
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "oracle/oracle.hpp"
#include "wbaug/error.hpp"
#include "wbaug/mapping.hpp"

namespace wbaug {
namespace {

std::array<double, 27> random_generator(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::array<double, 27> m{};
  for (double& v : m) v = u(rng);
  return m;
}

ImageBuffer random_image(std::mt19937_64& rng, std::size_t w, std::size_t h) {
  ImageBuffer img(w, h);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) img.set_pixel(i, oracle::random_color(rng));
  return img;
}

TEST(Settings, CanonicalVocabularyHasTenEntries) {
  const auto& s = canonical_settings();
  ASSERT_EQ(s.size(), 10u);
  EXPECT_EQ(setting_name(s.front()), "2850K_CS");
  EXPECT_EQ(setting_name(s.back()), "7500K_AS");
  for (const auto& x : s) EXPECT_EQ(parse_setting(setting_name(x)), x);
}

TEST(Settings, ParseRejectsMalformedNames) {
  for (const char* bad : {"", "K_CS", "2850", "2850K", "2850K_XX", "0K_CS", "28a0K_CS",
                          "2850K_CS ", "-5K_AS"})
    EXPECT_FALSE(parse_setting(bad).has_value()) << bad;
  EXPECT_EQ(parse_setting("corrected"), WbSetting::corrected());
  EXPECT_EQ(setting_name(WbSetting::corrected()), "corrected");
}

TEST(Settings, OrderIsTemperatureThenStyle) {
  EXPECT_LT((WbSetting{2850, Style::AdobeStandard}), (WbSetting{3800, Style::CameraStandard}));
  EXPECT_LT((WbSetting{2850, Style::CameraStandard}), (WbSetting{2850, Style::AdobeStandard}));
}

TEST(FitTransform, RecoversExactGenerator) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto truth = random_generator(rng);
    std::vector<RgbColor> src, dst;
    for (int i = 0; i < 200; ++i) {
      src.push_back(oracle::random_color(rng));
      dst.push_back(oracle::apply(truth, src.back()));
    }
    const ColorTransform t = fit_transform(src, dst);
    for (std::size_t i = 0; i < 27; ++i) EXPECT_NEAR(t.m[i], truth[i], 1e-8);
  }
}

TEST(FitTransform, MatchesNormalEquationOracleOnNoisyData) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> noise(0.0, 0.05);
  const auto truth = random_generator(rng);
  std::vector<RgbColor> src, dst;
  for (int i = 0; i < 400; ++i) {
    src.push_back(oracle::random_color(rng));
    RgbColor y = oracle::apply(truth, src.back());
    y.r += noise(rng);
    y.g += noise(rng);
    y.b += noise(rng);
    dst.push_back(y);
  }
  const auto expected = oracle::least_squares(src, dst);
  const ColorTransform t = fit_transform(src, dst);
  for (std::size_t i = 0; i < 27; ++i) EXPECT_NEAR(t.m[i], expected[i], 1e-8);
}

TEST(FitTransform, ResidualIsOrthogonalToKernel) {
  std::mt19937_64 rng(13);
  std::vector<RgbColor> src, dst;
  for (int i = 0; i < 300; ++i) {
    src.push_back(oracle::random_color(rng));
    dst.push_back(oracle::random_color(rng));
  }
  const ColorTransform t = fit_transform(src, dst);
  std::array<double, 27> g{};
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto k = oracle::phi(src[i]);
    const RgbColor p = oracle::apply(t.m, src[i]);
    const double e[3] = {p.r - dst[i].r, p.g - dst[i].g, p.b - dst[i].b};
    for (int c = 0; c < 3; ++c)
      for (int j = 0; j < 9; ++j) g[c * 9 + j] += e[c] * k[j];
  }
  for (double v : g) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(FitTransform, IdentityPairGivesIdentity) {
  std::mt19937_64 rng(14);
  std::vector<RgbColor> src;
  for (int i = 0; i < 100; ++i) src.push_back(oracle::random_color(rng));
  const ColorTransform t = fit_transform(src, src);
  const ColorTransform id = ColorTransform::identity();
  for (std::size_t i = 0; i < 27; ++i) EXPECT_NEAR(t.m[i], id.m[i], 1e-10);
}

TEST(FitTransform, RejectsMismatchedAndShortInput) {
  std::vector<RgbColor> a(10, {0.1, 0.2, 0.3}), b(9, {0.1, 0.2, 0.3});
  EXPECT_THROW(fit_transform(a, b), Error);
  std::vector<RgbColor> few(8, {0.1, 0.2, 0.3});
  try {
    fit_transform(few, few);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidInput);
  }
}

TEST(FitTransform, DegenerateColorsAreReported) {
  // Gray pixels give a rank-deficient kernel matrix.
  std::vector<RgbColor> gray;
  for (int i = 0; i < 50; ++i) {
    const double v = i / 49.0;
    gray.push_back({v, v, v});
  }
  try {
    fit_transform(gray, gray);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateInput);
  }
  std::vector<RgbColor> black(50, {0, 0, 0});
  EXPECT_THROW(fit_transform(black, black), Error);
}

TEST(FitTransform, RejectsNonFiniteColors) {
  std::vector<RgbColor> src(20, {0.1, 0.2, 0.3}), dst(20, {0.1, 0.2, 0.3});
  dst[3].g = std::nan("");
  EXPECT_THROW(fit_transform(src, dst), Error);
}

TEST(FitTransform, ImageOverloadChecksShape) {
  EXPECT_THROW(fit_transform(ImageBuffer(4, 4), ImageBuffer(4, 5)), Error);
}

TEST(FitTransform, ImageOverloadSubsamplesLargeImages) {
  std::mt19937_64 rng(15);
  const auto truth = random_generator(rng);
  const ImageBuffer src = random_image(rng, 300, 300);
  ImageBuffer dst(300, 300);
  for (std::size_t i = 0; i < src.pixel_count(); ++i)
    dst.set_pixel(i, oracle::apply(truth, src.pixel(i)));
  const ColorTransform full = fit_transform(src, dst, 0);
  const ColorTransform sub = fit_transform(src, dst, 1000);
  for (std::size_t i = 0; i < 27; ++i) {
    EXPECT_NEAR(full.m[i], truth[i], 1e-4);
    EXPECT_NEAR(sub.m[i], truth[i], 1e-4);
  }
}

TEST(ApplyTransform, IdentityReproducesImage) {
  std::mt19937_64 rng(16);
  const ImageBuffer img = random_image(rng, 17, 9);
  EXPECT_EQ(apply_transform(ColorTransform::identity(), img), img);
}

TEST(ApplyTransform, MatchesOracleAndClamps) {
  std::mt19937_64 rng(17);
  std::array<double, 27> m{};
  for (double& v : m) v = std::uniform_real_distribution<double>(-3, 3)(rng);
  ColorTransform t;
  t.m = m;
  const ImageBuffer img = random_image(rng, 31, 7);
  const ImageBuffer out = apply_transform(t, img);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const RgbColor want = clamp_gamut(oracle::apply(m, img.pixel(i)));
    const RgbColor got = out.pixel(i);
    EXPECT_FLOAT_EQ(static_cast<float>(got.r), static_cast<float>(want.r));
    EXPECT_FLOAT_EQ(static_cast<float>(got.g), static_cast<float>(want.g));
    EXPECT_FLOAT_EQ(static_cast<float>(got.b), static_cast<float>(want.b));
    EXPECT_GE(got.r, 0.0);
    EXPECT_LE(got.b, 1.0);
  }
}

class ApplyTransformSize : public ::testing::TestWithParam<std::size_t> {};

TEST_P(ApplyTransformSize, BitExactAgainstScalarKernel) {
  std::mt19937_64 rng(18 + GetParam());
  std::array<double, 27> m{};
  for (double& v : m) v = std::uniform_real_distribution<double>(-1.5, 1.5)(rng);
  ColorTransform t;
  t.m = m;
  const ImageBuffer img = random_image(rng, GetParam(), 1);
  const ImageBuffer out = apply_transform(t, img);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const RgbColor want = clamp_gamut(oracle::apply(m, img.pixel(i)));
    const RgbColor got = out.pixel(i);
    ASSERT_EQ(static_cast<float>(want.r), got.r) << i;
    ASSERT_EQ(static_cast<float>(want.g), got.g) << i;
    ASSERT_EQ(static_cast<float>(want.b), got.b) << i;
  }
}

INSTANTIATE_TEST_SUITE_P(Sizes, ApplyTransformSize,
                         ::testing::Values(1, 255, 256, 257, 1000));

TEST(ApplyTransform, CommutesWithPixelPermutation) {
  std::mt19937_64 rng(19);
  ColorTransform t = ColorTransform::identity();
  for (double& v : t.m) v += std::uniform_real_distribution<double>(-0.3, 0.3)(rng);
  const ImageBuffer img = random_image(rng, 40, 13);
  std::vector<std::size_t> perm(img.pixel_count());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<float> shuffled(img.data().size());
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (int c = 0; c < 3; ++c) shuffled[3 * i + c] = img.data()[3 * perm[i] + c];
  const ImageBuffer a = apply_transform(t, img);
  const ImageBuffer b = apply_transform(t, ImageBuffer(40, 13, std::move(shuffled)));
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (int c = 0; c < 3; ++c) ASSERT_EQ(b.data()[3 * i + c], a.data()[3 * perm[i] + c]);
}

TEST(ApplyTransform, RejectsNonFiniteMatrix) {
  ColorTransform t = ColorTransform::identity();
  t(1, 4) = INFINITY;
  EXPECT_THROW(apply_transform(t, ImageBuffer(2, 2)), Error);
}

TEST(MeanAbsError, AveragesOverChannels) {
  ImageBuffer a(1, 2, {0, 0, 0, 0, 0, 0});
  ImageBuffer b(1, 2, {0.6f, 0, 0, 0, 0, 0});
  EXPECT_NEAR(mean_abs_error(a, b), 0.1, 1e-7);
  EXPECT_THROW(mean_abs_error(a, ImageBuffer(2, 1)), Error);
}

}  // namespace
}  // namespace wbaug
