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

#include <cstdint>
#include <filesystem>

#include "wbaug/color.hpp"

namespace wbaug {

/// An image read from disk together with the sample depth it was stored at.
struct LoadedImage {
  ImageBuffer image;
  int bit_depth = 8;  // 8 or 16
};

/// Reads PNG (any color type; alpha is dropped, gray is replicated) and
/// binary PNM (P5/P6, 8- or 16-bit). Samples map to [0,1] by value / max.
/// Throws Error(Io) naming the file on any failure.
LoadedImage read_image(const std::filesystem::path& path);

/// Writes .png or .ppm/.pnm by extension, 8- or 16-bit. Samples are
/// quantized as floor(v * max + 0.5). The file is written to a temporary
/// sibling and renamed into place.
void write_image(const std::filesystem::path& path, const ImageBuffer& img,
                 int bit_depth = 8);

/// floor(v * max + 0.5) with v clamped to [0,1].
std::uint16_t quantize(float v, int bit_depth);

}  // namespace wbaug
