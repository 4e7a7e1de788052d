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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wbaug/features.hpp"
#include "wbaug/mapping.hpp"
#include "wbaug/retrieval.hpp"

namespace wbaug {

enum class Direction : std::uint32_t {
  Emulation = 0,   // correct -> cast
  Correction = 1,  // cast -> correct
};

const char* to_string(Direction d);
std::optional<Direction> parse_direction(std::string_view name);

inline constexpr std::uint32_t kModelFormatVersion = 1;

struct ModelParams {
  Direction direction = Direction::Emulation;
  HistogramParams histogram;
  std::size_t compact_dim = kCompactDim;
  std::size_t neighbors = kDefaultNeighbors;
  double sigma = kDefaultSigma;
  std::size_t max_fit_pixels = kMaxFitPixels;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// A fitted transform plus the mean absolute per-channel error it leaves on
/// the pair it was fitted to (measured on every pixel, after clamping).
struct StoredTransform {
  ColorTransform transform;
  double residual = 0.0;

  friend bool operator==(const StoredTransform&, const StoredTransform&) = default;
};

struct TrainingRecord {
  RecordId id = 0;
  CompactFeature feature;
  std::map<WbSetting, StoredTransform> transforms;
  std::vector<std::string> provenance;  // source image paths as listed

  friend bool operator==(const TrainingRecord&, const TrainingRecord&) = default;
};

class WbModel {
 public:
  WbModel() = default;
  WbModel(ModelParams params, std::vector<WbSetting> vocabulary, PcaModel pca,
          std::vector<TrainingRecord> records);

  const ModelParams& params() const noexcept { return params_; }
  const std::vector<WbSetting>& vocabulary() const noexcept { return vocabulary_; }
  const PcaModel& pca() const noexcept { return pca_; }
  const std::vector<TrainingRecord>& records() const noexcept { return records_; }
  const FeatureIndex& index() const noexcept { return index_; }

  const TrainingRecord& record(RecordId id) const;
  bool has_setting(const WbSetting& s) const;

  friend bool operator==(const WbModel& a, const WbModel& b) {
    return a.params_ == b.params_ && a.vocabulary_ == b.vocabulary_ &&
           a.pca_ == b.pca_ && a.records_ == b.records_;
  }

 private:
  ModelParams params_;
  std::vector<WbSetting> vocabulary_;
  PcaModel pca_;
  std::vector<TrainingRecord> records_;  // sorted by id
  FeatureIndex index_;
  std::unordered_map<RecordId, std::size_t> by_id_;
};

// ---------------------------------------------------------------------------
// Dataset manifest: one group per line,
//   <correct image>;<setting>=<path>;<setting>=<path>...
// Optional reference_<CS|AS>=<path> entries name a style's own white-balanced
// rendition; correction-direction builds map that style's casts onto it
// instead of onto the correct image. Blank lines and lines starting with '#'
// are ignored. Relative paths are resolved against the manifest's directory.

struct ManifestGroup {
  std::string correct;
  std::vector<std::pair<WbSetting, std::string>> variants;
  std::vector<std::pair<Style, std::string>> references;
  std::size_t line = 0;

  /// The correction target for casts of the given style.
  const std::string& reference_for(Style style) const;
};

struct DatasetManifest {
  std::filesystem::path base_dir;
  std::vector<ManifestGroup> groups;
};

DatasetManifest parse_manifest(std::string_view text,
                               const std::filesystem::path& base_dir);
DatasetManifest read_manifest(const std::filesystem::path& path);
std::string format_manifest(const DatasetManifest& manifest);

/// FNV-1a 64-bit.
std::uint64_t fnv1a64(std::string_view bytes);

/// A record whose histogram has not yet been projected.
struct PendingRecord {
  RecordId id = 0;
  std::vector<double> histogram;
  std::map<WbSetting, StoredTransform> transforms;
  std::vector<std::string> provenance;
};

/// Loads a group's images and fits its transforms. Emulation yields one
/// record (feature from the correct image); Correction yields one record per
/// variant (feature from the cast, single transform tagged "corrected").
/// Throws on any failure; build_model turns that into a rejection.
std::vector<PendingRecord> ingest_group(const ManifestGroup& group,
                                        const std::filesystem::path& base_dir,
                                        const ModelParams& params);

struct GroupOutcome {
  std::size_t line = 0;
  std::string correct;
  bool accepted = false;
  std::string reason;
};

struct BuildReport {
  std::size_t groups = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::vector<GroupOutcome> outcomes;  // manifest order
  std::map<WbSetting, double> mean_residual;
  double overall_mean_residual = 0.0;
  std::vector<std::string> notes;

  std::string to_text() const;
};

struct BuildResult {
  WbModel model;
  BuildReport report;
};

/// Ingests every group (in parallel), fits PCA on the accepted histograms in
/// id order and projects them. Output is a pure function of the manifest
/// contents and params.
BuildResult build_model(const DatasetManifest& manifest,
                        const ModelParams& params = {},
                        std::size_t workers = 0);

std::vector<std::uint8_t> serialize_model(const WbModel& model);
WbModel deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const WbModel& model, const std::filesystem::path& path);
WbModel load_model(const std::filesystem::path& path);

/// The trailing checksum of the serialized model, as 16 hex digits.
std::string model_checksum(const WbModel& model);

/// "key: value" lines describing the model's parameters and contents.
std::string describe_model(const WbModel& model);

}  // namespace wbaug
