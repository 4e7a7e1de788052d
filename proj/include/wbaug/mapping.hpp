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

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wbaug/color.hpp"

namespace wbaug {

enum class Style : std::uint8_t {
  CameraStandard = 0,
  AdobeStandard = 1,
  /// Target of a correction-direction transform (the white-balanced look).
  Corrected = 2,
};

/// A white-balance rendering: color temperature plus photo-finishing style.
struct WbSetting {
  std::uint32_t temperature = 0;  // Kelvin; 0 for Style::Corrected
  Style style = Style::CameraStandard;

  static WbSetting corrected() { return {0, Style::Corrected}; }

  friend auto operator<=>(const WbSetting&, const WbSetting&) = default;
};

/// The five temperatures times the two styles, temperature-major.
const std::vector<WbSetting>& canonical_settings();

/// "CS" or "AS"; empty for Style::Corrected.
std::string_view style_code(Style s);
std::optional<Style> parse_style_code(std::string_view code);

/// "2850K_CS", "7500K_AS", or "corrected".
std::string setting_name(const WbSetting& s);
std::optional<WbSetting> parse_setting(std::string_view name);

/// 3x9 matrix mapping kernelized source colors to target colors.
struct ColorTransform {
  std::array<double, 27> m{};  // row-major
  WbSetting tag;

  double operator()(std::size_t row, std::size_t col) const {
    return m[row * 9 + col];
  }
  double& operator()(std::size_t row, std::size_t col) {
    return m[row * 9 + col];
  }

  /// Rows select R, G, B from the kernel vector.
  static ColorTransform identity(WbSetting tag = {});

  friend bool operator==(const ColorTransform&, const ColorTransform&) = default;
};

/// Fit pairs above this count are subsampled with a uniform stride.
inline constexpr std::size_t kMaxFitPixels = 65536;

/// Normal-equation condition numbers above this switch to QR; a kernel matrix
/// whose QR diagonal ratio falls below its inverse square is rank deficient.
inline constexpr double kFitConditionLimit = 1e12;

/// Least-squares minimizer of ||M phi(source) - target||_F. The returned tag
/// is default-constructed; callers set it.
ColorTransform fit_transform(std::span<const RgbColor> source,
                             std::span<const RgbColor> target);

/// Image overload. Subsamples to at most max_pixels pairs with a uniform
/// stride when the images are larger.
ColorTransform fit_transform(const ImageBuffer& source,
                             const ImageBuffer& target,
                             std::size_t max_pixels = kMaxFitPixels);

/// clamp_gamut(M phi(p)) for every pixel p.
ImageBuffer apply_transform(const ColorTransform& t, const ImageBuffer& img);

/// Mean absolute per-channel difference; dimensions must agree.
double mean_abs_error(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace wbaug
