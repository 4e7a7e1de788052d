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
#include <cstddef>
#include <span>
#include <vector>

namespace wbaug {

/// An RGB triple. Channels are nominally in [0,1] and sRGB-encoded unless a
/// function says otherwise.
struct RgbColor {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const RgbColor&, const RgbColor&) = default;
};

/// Polynomial lift [R, G, B, RG, RB, GB, R^2, G^2, B^2].
using KernelVector = std::array<double, 9>;

inline constexpr std::size_t kKernelTerms = 9;

/// Term names in storage order; written into model files.
inline constexpr const char* kKernelOrdering = "R,G,B,RG,RB,GB,RR,GG,BB";

/// Interleaved RGB raster, row-major, channels stored as float in [0,1].
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(std::size_t width, std::size_t height);
  ImageBuffer(std::size_t width, std::size_t height, std::vector<float> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }
  bool empty() const noexcept { return data_.empty(); }

  RgbColor pixel(std::size_t i) const noexcept {
    const float* p = data_.data() + 3 * i;
    return {p[0], p[1], p[2]};
  }
  void set_pixel(std::size_t i, const RgbColor& c) noexcept {
    float* p = data_.data() + 3 * i;
    p[0] = static_cast<float>(c.r);
    p[1] = static_cast<float>(c.g);
    p[2] = static_cast<float>(c.b);
  }

  std::span<const float> data() const noexcept { return data_; }
  std::span<float> data() noexcept { return data_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<float> data_;
};

/// Throws InvalidInput on non-finite channels.
KernelVector kernel_phi(const RgbColor& c);

RgbColor clamp_gamut(const RgbColor& c) noexcept;

/// Standard sRGB transfer function, sRGB-encoded value to linear.
double srgb_decode(double c);
/// Linear value to sRGB encoding; inverse of srgb_decode.
double srgb_encode(double c);

}  // namespace wbaug
