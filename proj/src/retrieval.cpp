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

#include "wbaug/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include "wbaug/error.hpp"

namespace wbaug {

FeatureIndex::FeatureIndex(std::vector<RecordId> ids,
                           std::vector<CompactFeature> features)
    : ids_(std::move(ids)) {
  if (ids_.size() != features.size())
    fail(ErrorKind::InvalidInput, "FeatureIndex: id/feature count mismatch");
  dim_ = features.empty() ? 0 : features.front().values.size();
  std::unordered_set<RecordId> seen;
  data_.reserve(ids_.size() * dim_);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!seen.insert(ids_[i]).second)
      fail(ErrorKind::InvalidInput,
           "FeatureIndex: duplicate record id " + std::to_string(ids_[i]));
    if (features[i].values.size() != dim_)
      fail(ErrorKind::InvalidInput, "FeatureIndex: feature dimension mismatch");
    data_.insert(data_.end(), features[i].values.begin(), features[i].values.end());
  }
}

double FeatureIndex::squared_distance(std::size_t i,
                                      std::span<const double> query) const {
  const double* row = data_.data() + i * dim_;
  double sum = 0.0;
  for (std::size_t j = 0; j < dim_; ++j) {
    const double diff = row[j] - query[j];
    sum += diff * diff;
  }
  return sum;
}

NeighborSet knn_query(const FeatureIndex& index, const CompactFeature& v,
                      std::size_t k) {
  if (index.size() == 0) fail(ErrorKind::InvalidState, "knn_query: empty index");
  if (k < 1 || k > index.size())
    fail(ErrorKind::InvalidInput, "knn_query: k=" + std::to_string(k) +
                                      " outside [1, " +
                                      std::to_string(index.size()) + "]");
  if (v.values.size() != index.dimension())
    fail(ErrorKind::InvalidInput, "knn_query: query dimension mismatch");

  struct Candidate {
    double dist2;
    RecordId id;
  };
  std::vector<Candidate> all(index.size());
  for (std::size_t i = 0; i < index.size(); ++i)
    all[i] = {index.squared_distance(i, v.values), index.id(i)};
  const auto closer = [](const Candidate& a, const Candidate& b) {
    return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.id < b.id;
  };
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k),
                    all.end(), closer);

  NeighborSet out;
  out.ids.reserve(k);
  out.distances.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    out.ids.push_back(all[i].id);
    out.distances.push_back(std::sqrt(all[i].dist2));
  }
  return out;
}

WeightVector rbf_weights(std::span<const double> distances, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    fail(ErrorKind::InvalidInput, "rbf_weights: sigma must be positive");
  if (distances.empty())
    fail(ErrorKind::InvalidInput, "rbf_weights: empty distance vector");
  double nearest = distances.front();
  for (double d : distances) {
    if (!std::isfinite(d) || d < 0.0)
      fail(ErrorKind::InvalidInput,
           "rbf_weights: distances must be finite and non-negative");
    nearest = std::min(nearest, d);
  }
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const double base = nearest * nearest;
  WeightVector w{std::vector<double>(distances.size()), sigma};
  double total = 0.0;
  for (std::size_t j = 0; j < distances.size(); ++j) {
    w.alpha[j] = std::exp(-(distances[j] * distances[j] - base) * inv);
    total += w.alpha[j];
  }
  for (double& a : w.alpha) a /= total;
  return w;
}

ColorTransform blend_transforms(const WeightVector& weights,
                                std::span<const ColorTransform> transforms) {
  if (transforms.empty() || weights.alpha.size() != transforms.size())
    fail(ErrorKind::InvalidInput,
         "blend_transforms: " + std::to_string(weights.alpha.size()) +
             " weights for " + std::to_string(transforms.size()) + " transforms");
  const WbSetting tag = transforms.front().tag;
  ColorTransform out;
  out.tag = tag;
  for (std::size_t j = 0; j < transforms.size(); ++j) {
    if (transforms[j].tag != tag)
      fail(ErrorKind::InvalidInput, "blend_transforms: mixed setting tags (" +
                                        setting_name(tag) + " and " +
                                        setting_name(transforms[j].tag) + ")");
    for (std::size_t e = 0; e < out.m.size(); ++e)
      out.m[e] = j == 0 ? weights.alpha[j] * transforms[j].m[e]
                        : out.m[e] + weights.alpha[j] * transforms[j].m[e];
  }
  return out;
}

}  // namespace wbaug
