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

#include "wbaug/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <system_error>

#include "wbaug/error.hpp"
#include "wbaug/image_io.hpp"
#include "wbaug/parallel.hpp"
#include "wbaug/pipeline.hpp"

namespace wbaug {

namespace fs = std::filesystem;

double ToneCurve::operator()(double x) const {
  return gamma == 1.0 ? x : std::pow(x, gamma);
}

CameraEmulation CameraEmulation::defaults() {
  CameraEmulation e;
  e.gains = {{2850, {0.60, 1.00, 1.70}},
             {3800, {0.80, 1.00, 1.30}},
             {5500, {1.00, 1.00, 1.00}},
             {6500, {1.12, 1.00, 0.88}},
             {7500, {1.25, 1.00, 0.75}}};
  e.styles = {{Style::CameraStandard, ToneCurve{0.85}},
              {Style::AdobeStandard, ToneCurve{1.0}}};
  e.reference_style = Style::AdobeStandard;
  return e;
}

namespace {

Style parse_style(const std::string& s, std::size_t line) {
  const auto style = parse_style_code(s);
  if (!style)
    fail(ErrorKind::InvalidInput,
         "emulation config line " + std::to_string(line) + ": unknown style '" + s + "'");
  return *style;
}

}  // namespace

CameraEmulation CameraEmulation::parse(std::string_view text) {
  CameraEmulation e;
  e.styles.clear();
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool have_reference = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string directive;
    if (!(fields >> directive)) continue;
    const auto bad = [&] {
      fail(ErrorKind::InvalidInput,
           "emulation config line " + std::to_string(line_no) + ": malformed '" + line + "'");
    };
    if (directive == "gain") {
      std::uint32_t kelvin = 0;
      ChannelGains g{};
      if (!(fields >> kelvin >> g[0] >> g[1] >> g[2]) || kelvin == 0) bad();
      e.gains[kelvin] = g;
    } else if (directive == "style") {
      std::string name, kind;
      if (!(fields >> name >> kind)) bad();
      ToneCurve curve;
      if (kind == "gamma") {
        if (!(fields >> curve.gamma)) bad();
      } else if (kind != "identity") {
        bad();
      }
      e.styles[parse_style(name, line_no)] = curve;
    } else if (directive == "reference") {
      std::string name;
      if (!(fields >> name)) bad();
      e.reference_style = parse_style(name, line_no);
      have_reference = true;
    } else {
      bad();
    }
  }
  if (!have_reference && !e.styles.contains(e.reference_style) && !e.styles.empty())
    e.reference_style = e.styles.begin()->first;
  e.validate();
  return e;
}

void CameraEmulation::validate() const {
  if (gains.empty()) fail(ErrorKind::InvalidInput, "emulation: no temperatures defined");
  if (styles.empty()) fail(ErrorKind::InvalidInput, "emulation: no styles defined");
  for (const auto& [t, g] : gains) {
    if (g[1] != 1.0)
      fail(ErrorKind::InvalidInput,
           "emulation: gains for " + std::to_string(t) + "K are not green-normalized");
    if (!(g[0] > 0.0) || !(g[2] > 0.0))
      fail(ErrorKind::InvalidInput,
           "emulation: gains for " + std::to_string(t) + "K must be positive");
  }
  for (const auto& [s, c] : styles)
    if (!(c.gamma > 0.0) || !std::isfinite(c.gamma))
      fail(ErrorKind::InvalidInput, "emulation: tone curve gamma must be positive");
  if (!styles.contains(reference_style))
    fail(ErrorKind::InvalidInput, "emulation: reference style has no tone curve");
}

std::vector<WbSetting> CameraEmulation::settings() const {
  std::vector<WbSetting> out;
  for (const auto& [t, g] : gains)
    for (const auto& [s, c] : styles) out.push_back({t, s});
  std::sort(out.begin(), out.end());
  return out;
}

ImageBuffer render(const ImageBuffer& base, const ChannelGains& gains,
                   const ToneCurve& curve) {
  ImageBuffer out(base.width(), base.height());
  for (std::size_t i = 0; i < base.pixel_count(); ++i) {
    const RgbColor c = base.pixel(i);
    const auto channel = [&](double v, double gain) {
      const double lin = std::clamp(gain * srgb_decode(v), 0.0, 1.0);
      return srgb_encode(std::clamp(curve(lin), 0.0, 1.0));
    };
    out.set_pixel(i, {channel(c.r, gains[0]), channel(c.g, gains[1]),
                      channel(c.b, gains[2])});
  }
  return out;
}

RenditionPair render_pair(const ImageBuffer& base, std::uint32_t temperature,
                          Style style, const CameraEmulation& emulation) {
  const auto g = emulation.gains.find(temperature);
  if (g == emulation.gains.end())
    fail(ErrorKind::InvalidInput,
         "render_pair: no gains for " + std::to_string(temperature) + "K");
  const auto c = emulation.styles.find(style);
  if (c == emulation.styles.end())
    fail(ErrorKind::InvalidInput, "render_pair: unknown style");
  return {render(base, {1.0, 1.0, 1.0}, c->second), render(base, g->second, c->second)};
}

// ---------------------------------------------------------------------------
// Test scenes

namespace {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

RgbColor hsv_to_rgb(double h, double s, double v) {
  h = std::fmod(h, 1.0) * 6.0;
  const int sector = static_cast<int>(h) % 6;
  const double f = h - std::floor(h);
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

}  // namespace

ImageBuffer random_base_image(std::uint64_t seed, std::size_t width,
                              std::size_t height) {
  SplitMix64 rng(seed * 0x2545f4914f6cdd1dull + 1);
  // Palette is a fixed pattern of hue offsets around a per-scene dominant
  // hue and saturation, so scene colors vary smoothly with two parameters.
  static constexpr std::array<double, 10> kHueOffsets = {
      0.0, 0.04, -0.04, 0.08, -0.08, 0.15, -0.15, 0.33, 0.5, 0.67};
  static constexpr std::array<double, 10> kValues = {
      0.9, 0.7, 0.5, 0.8, 0.35, 0.6, 0.75, 0.85, 0.55, 0.3};
  const double dominant_hue = rng.uniform();
  const double saturation = rng.uniform(0.15, 0.7);

  struct Region {
    double x, y, scale;
    RgbColor color;
  };
  std::vector<Region> rs;
  for (std::size_t i = 0; i < kHueOffsets.size(); ++i) {
    const double h = dominant_hue + kHueOffsets[i] + 1.0;
    // The last three regions are near-neutral surfaces.
    const double s = i < 7 ? saturation : 0.02;
    const double scale = (i < 7 ? 0.15 : 0.3) * rng.uniform(0.7, 1.3);
    rs.push_back({rng.uniform(), rng.uniform(), scale, hsv_to_rgb(h, s, kValues[i])});
  }
  const double shade_fx = rng.uniform(0.5, 3.0), shade_fy = rng.uniform(0.5, 3.0);
  const double shade_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  constexpr double kNoise = 0.005;
  ImageBuffer img(width, height);
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double u = (static_cast<double>(x) + 0.5) / static_cast<double>(width);
      const double v = (static_cast<double>(y) + 0.5) / static_cast<double>(height);
      RgbColor acc;
      double wsum = 0.0;
      for (const auto& r : rs) {
        const double d2 = (u - r.x) * (u - r.x) + (v - r.y) * (v - r.y);
        const double w = std::exp(-d2 / (2.0 * r.scale * r.scale)) + 1e-6;
        acc.r += w * r.color.r;
        acc.g += w * r.color.g;
        acc.b += w * r.color.b;
        wsum += w;
      }
      const double shade =
          0.7 + 0.3 * std::sin(shade_fx * u * 6.28 + shade_fy * v * 6.28 + shade_phase);
      // Small per-pixel noise.
      const double nr = rng.uniform(-kNoise, kNoise);
      const double ng = rng.uniform(-kNoise, kNoise);
      const double nb = rng.uniform(-kNoise, kNoise);
      img.set_pixel(y * width + x,
                    clamp_gamut({shade * acc.r / wsum + nr, shade * acc.g / wsum + ng,
                                 shade * acc.b / wsum + nb}));
    }
  }
  return img;
}

SynthOutput make_manifest(const std::vector<NamedImage>& bases,
                          const CameraEmulation& emulation, const fs::path& out_dir,
                          std::size_t workers) {
  if (bases.empty()) fail(ErrorKind::InvalidInput, "make_manifest: no base images");
  emulation.validate();
  std::set<std::string> names;
  for (const auto& b : bases)
    if (!names.insert(b.name).second)
      fail(ErrorKind::InvalidInput, "make_manifest: duplicate base name '" + b.name + "'");

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, out_dir.string() + ": cannot create directory");

  const std::vector<WbSetting> settings = emulation.settings();
  const ToneCurve& reference = emulation.styles.at(emulation.reference_style);

  // Each non-reference style also needs its own white-balanced rendition as a
  // correction target. A unit-gain temperature already renders exactly that,
  // so its cast file doubles as the reference.
  const ChannelGains unit{1.0, 1.0, 1.0};
  std::optional<std::uint32_t> neutral;
  for (const auto& [t, g] : emulation.gains)
    if (g == unit) {
      neutral = t;
      break;
    }
  std::vector<Style> extra_styles;
  for (const auto& [st, c] : emulation.styles)
    if (st != emulation.reference_style) extra_styles.push_back(st);
  const auto reference_file = [&](const std::string& name, Style st) {
    return neutral ? name + "_" + setting_name({*neutral, st}) + ".png"
                   : name + "_reference_" + std::string(style_code(st)) + ".png";
  };

  std::vector<char> gray(bases.size(), 0);
  parallel_for(bases.size(), workers == 0 ? default_worker_count() : workers,
               [&](std::size_t i) {
                 const auto& base = bases[i];
                 if (detect_grayscale(base.image)) {
                   gray[i] = 1;
                   return;
                 }
                 write_image(out_dir / (base.name + ".png"), render(base.image, unit, reference));
                 for (const auto& s : settings)
                   write_image(out_dir / (base.name + "_" + setting_name(s) + ".png"),
                               render(base.image, emulation.gains.at(s.temperature),
                                      emulation.styles.at(s.style)));
                 if (!neutral)
                   for (Style st : extra_styles)
                     write_image(out_dir / reference_file(base.name, st),
                                 render(base.image, unit, emulation.styles.at(st)));
               });

  SynthOutput out;
  out.manifest.base_dir = out_dir;
  for (std::size_t i = 0; i < bases.size(); ++i) {
    if (gray[i]) {
      out.excluded.emplace_back(bases[i].name, kGrayscaleReason);
      continue;
    }
    ManifestGroup g;
    g.correct = bases[i].name + ".png";
    g.line = out.manifest.groups.size() + 1;
    for (Style st : extra_styles) g.references.emplace_back(st, reference_file(bases[i].name, st));
    for (const auto& s : settings)
      g.variants.emplace_back(s, bases[i].name + "_" + setting_name(s) + ".png");
    out.manifest.groups.push_back(std::move(g));
    out.files_written += 1 + settings.size() + (neutral ? 0 : extra_styles.size());
  }
  out.manifest_path = out_dir / kSynthManifestName;
  std::ofstream mf(out.manifest_path);
  mf << format_manifest(out.manifest);
  if (!mf) fail(ErrorKind::Io, out.manifest_path.string() + ": write failed");
  return out;
}

}  // namespace wbaug
