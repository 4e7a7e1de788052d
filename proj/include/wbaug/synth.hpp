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
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wbaug/color.hpp"
#include "wbaug/mapping.hpp"
#include "wbaug/model.hpp"

namespace wbaug {

/// Monotone tone curve on [0,1]: x^gamma (gamma = 1 is the identity).
struct ToneCurve {
  double gamma = 1.0;

  double operator()(double x) const;
  friend bool operator==(const ToneCurve&, const ToneCurve&) = default;
};

using ChannelGains = std::array<double, 3>;

/// A toy in-camera pipeline: diagonal gains in linear space followed by a
/// per-style tone curve, re-encoded to sRGB.
struct CameraEmulation {
  std::map<std::uint32_t, ChannelGains> gains;  // green-normalized
  std::map<Style, ToneCurve> styles;
  /// Style whose white-balanced rendition is written as each group's
  /// correct image.
  Style reference_style = Style::AdobeStandard;

  /// 2850K..7500K warm-to-cool gains; AS = identity curve, CS = gamma 0.85.
  static CameraEmulation defaults();

  /// Plain-text config, one directive per line:
  ///   gain <kelvin> <r> <g> <b>
  ///   style <CS|AS> identity | gamma <value>
  ///   reference <CS|AS>
  static CameraEmulation parse(std::string_view text);

  /// Throws InvalidInput unless g = 1, gains > 0 and gamma > 0 everywhere.
  void validate() const;

  /// Every (temperature, style) pair, sorted.
  std::vector<WbSetting> settings() const;
};

/// encode(curve(clamp(gains * decode(base)))) per pixel.
ImageBuffer render(const ImageBuffer& base, const ChannelGains& gains,
                   const ToneCurve& curve);

struct RenditionPair {
  ImageBuffer correct;  // unit gains, same style
  ImageBuffer cast;
};

RenditionPair render_pair(const ImageBuffer& base, std::uint32_t temperature,
                          Style style,
                          const CameraEmulation& emulation = CameraEmulation::defaults());

/// Deterministic colorful test scene: a few soft color regions drawn from a
/// seed-dependent palette, with shading. Never grayscale.
ImageBuffer random_base_image(std::uint64_t seed, std::size_t width,
                              std::size_t height);

struct NamedImage {
  std::string name;  // file stem
  ImageBuffer image;
};

struct SynthOutput {
  DatasetManifest manifest;
  std::filesystem::path manifest_path;
  std::vector<std::pair<std::string, std::string>> excluded;  // name, reason
  std::size_t files_written = 0;
};

inline constexpr const char* kSynthManifestName = "manifest.txt";

/// Renders every base under every (temperature, style), writes 8-bit PNGs
/// (<name>.png for the correct image, <name>_<setting>.png for casts) and a
/// manifest into out_dir. Grayscale bases are excluded.
SynthOutput make_manifest(const std::vector<NamedImage>& bases,
                          const CameraEmulation& emulation,
                          const std::filesystem::path& out_dir,
                          std::size_t workers = 0);

}  // namespace wbaug
