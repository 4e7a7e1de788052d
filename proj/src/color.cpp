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

#include "wbaug/color.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wbaug/error.hpp"

namespace wbaug {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::DegenerateInput: return "degenerate-input";
    case ErrorKind::InvalidState: return "invalid-state";
    case ErrorKind::Io: return "io";
    case ErrorKind::Corruption: return "corruption";
    case ErrorKind::UnsupportedVersion: return "unsupported-version";
    case ErrorKind::GrayscaleInput: return "grayscale-input";
  }
  return "unknown";
}

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height)
    : ImageBuffer(width, height, std::vector<float>(width * height * 3, 0.0f)) {}

ImageBuffer::ImageBuffer(std::size_t width, std::size_t height,
                         std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width == 0 || height == 0)
    fail(ErrorKind::InvalidInput, "image dimensions must be at least 1x1");
  if (data_.size() != width * height * 3)
    fail(ErrorKind::InvalidInput,
         "pixel buffer holds " + std::to_string(data_.size()) +
             " values, expected " + std::to_string(width * height * 3));
}

KernelVector kernel_phi(const RgbColor& c) {
  if (!std::isfinite(c.r) || !std::isfinite(c.g) || !std::isfinite(c.b))
    fail(ErrorKind::InvalidInput, "kernel_phi: non-finite color");
  return {c.r,       c.g,       c.b,       c.r * c.g, c.r * c.b,
          c.g * c.b, c.r * c.r, c.g * c.g, c.b * c.b};
}

RgbColor clamp_gamut(const RgbColor& c) noexcept {
  return {std::clamp(c.r, 0.0, 1.0), std::clamp(c.g, 0.0, 1.0),
          std::clamp(c.b, 0.0, 1.0)};
}

namespace {

void check_unit_range(double c, const char* who) {
  if (!(c >= 0.0 && c <= 1.0))
    fail(ErrorKind::InvalidInput,
         std::string(who) + ": value " + std::to_string(c) +
             " outside [0,1]");
}

}  // namespace

double srgb_decode(double c) {
  check_unit_range(c, "srgb_decode");
  if (c <= 0.04045) return c / 12.92;
  return std::pow((c + 0.055) / 1.055, 2.4);
}

double srgb_encode(double c) {
  check_unit_range(c, "srgb_encode");
  // 0.0031308 is the image of 0.04045 under decode.
  if (c <= 0.04045 / 12.92) return c * 12.92;
  return 1.055 * std::pow(c, 1.0 / 2.4) - 0.055;
}

}  // namespace wbaug
