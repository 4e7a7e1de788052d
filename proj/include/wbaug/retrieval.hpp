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
#include <span>
#include <vector>

#include "wbaug/features.hpp"
#include "wbaug/mapping.hpp"

namespace wbaug {

using RecordId = std::uint64_t;

/// Exhaustive-scan index over compact features. Immutable once built.
class FeatureIndex {
 public:
  FeatureIndex() = default;
  /// Throws InvalidInput on duplicate ids or mismatched feature dimensions.
  FeatureIndex(std::vector<RecordId> ids, std::vector<CompactFeature> features);

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dimension() const noexcept { return dim_; }
  RecordId id(std::size_t i) const { return ids_[i]; }

  /// Squared L2 distance from query to entry i.
  double squared_distance(std::size_t i, std::span<const double> query) const;

 private:
  std::vector<RecordId> ids_;
  std::vector<double> data_;  // size() x dim_, row-major
  std::size_t dim_ = 0;
};

struct NeighborSet {
  std::vector<RecordId> ids;
  std::vector<double> distances;  // non-decreasing
};

/// The k entries nearest to v in L2, ties broken by smaller id.
NeighborSet knn_query(const FeatureIndex& index, const CompactFeature& v,
                      std::size_t k);

inline constexpr std::size_t kDefaultNeighbors = 25;
inline constexpr double kDefaultSigma = 0.25;

struct WeightVector {
  std::vector<double> alpha;
  double sigma = kDefaultSigma;
};

/// Gaussian RBF weights normalized to sum to one:
///   alpha_j = exp(-d_j^2 / 2 sigma^2) / sum_i exp(-d_i^2 / 2 sigma^2).
/// Evaluated relative to the smallest distance, so the nearest neighbor's
/// weight never underflows. A weight can still round to zero when its
/// exponent gap exceeds the double range (about 745).
WeightVector rbf_weights(std::span<const double> distances, double sigma);

/// Entrywise sum_j alpha_j M_j. All transforms must share one tag.
ColorTransform blend_transforms(const WeightVector& weights,
                                std::span<const ColorTransform> transforms);

}  // namespace wbaug
