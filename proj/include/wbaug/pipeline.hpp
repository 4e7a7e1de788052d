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

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "wbaug/model.hpp"

namespace wbaug {

/// True iff the mean over pixels of (|R-G| + |G-B| + |B-R|) / 3 is below 1/255.
bool detect_grayscale(const ImageBuffer& img);

inline constexpr const char* kGrayscaleReason =
    "grayscale image (excluded from white-balance emulation)";

/// Neighbors and blending weights for one query image. Independent of the
/// setting, so one retrieval serves every output.
struct Retrieval {
  NeighborSet neighbors;
  WeightVector weights;
};

/// k = 0 or sigma = 0 select the model defaults.
Retrieval retrieve(const WbModel& model, const ImageBuffer& img,
                   std::size_t k = 0, double sigma = 0.0);

/// sum_j alpha_j M_j over the retrieved records' transforms for a setting.
ColorTransform blended_transform(const WbModel& model, const Retrieval& r,
                                 const WbSetting& setting);

struct AugmentOptions {
  std::vector<WbSetting> settings;  // empty: the whole model vocabulary
  std::size_t k = 0;                // 0: model default
  double sigma = 0.0;               // 0: model default
  bool grayscale_screen = true;
};

/// Renders the image under each requested setting. Requires an Emulation
/// model. Throws Error(GrayscaleInput) when the screen rejects the image.
std::map<WbSetting, ImageBuffer> augment(const WbModel& model,
                                         const ImageBuffer& img,
                                         const AugmentOptions& options = {});

struct CorrectOptions {
  std::size_t k = 0;
  double sigma = 0.0;
  bool grayscale_screen = false;
};

/// Removes a white-balance cast using a Correction model.
ImageBuffer correct(const WbModel& model, const ImageBuffer& img,
                    const CorrectOptions& options = {});

enum class BatchMode { Augment, Correct };

struct AugmentationRequest {
  std::filesystem::path model_path;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path output_dir;
  BatchMode mode = BatchMode::Augment;
  std::vector<WbSetting> settings;  // augment only; empty means all
  std::size_t k = 0;
  double sigma = 0.0;
  bool grayscale_screen = true;  // augment only
  /// Output name; {stem}, {setting} and {ext} are substituted.
  std::string naming = "{stem}_{setting}{ext}";
  std::size_t workers = 0;  // 0: default_worker_count()
};

struct ImageOutcome {
  std::string input;
  bool ok = false;
  std::vector<std::string> outputs;
  std::string reason;
};

struct RunManifest {
  std::string model_checksum;
  std::string mode;
  std::size_t k = 0;
  double sigma = 0.0;
  std::vector<std::string> settings;
  std::vector<ImageOutcome> images;  // input order

  std::size_t processed() const;
  std::size_t skipped() const;
  std::string to_json() const;
};

inline constexpr const char* kRunManifestName = "run_manifest.json";

/// Processes every input independently; failures become skip entries. The
/// manifest is written to <output_dir>/run_manifest.json after all images.
/// Throws only if the model cannot be loaded or does not fit the request.
RunManifest run_batch(const AugmentationRequest& request);

}  // namespace wbaug
