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

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

#include "wbaug/color.hpp"

namespace wbaug {

/// Log-chroma histogram construction parameters. Stored in model files so a
/// model is queried with the same binning it was built with.
struct HistogramParams {
  std::size_t bins = 60;
  double lower = -3.2;  // log-chroma bound, both axes
  double upper = 3.2;
  double epsilon = 1.0 / 512.0;  // black-level clamp before logarithms

  std::size_t dimension() const noexcept { return 3 * bins * bins; }

  friend bool operator==(const HistogramParams&,
                         const HistogramParams&) = default;
};

/// Channel-ratio convention used for the u/v axes, recorded in model files.
inline constexpr const char* kChromaConvention =
    "cyclic RGB: u=log(c/next), v=log(c/prev)";

/// m x m x 3 RGB-uv histogram with unit L2 norm. Layout is
/// [layer][u][v] with layers ordered R, G, B.
struct RgbUvHistogram {
  HistogramParams params;
  std::vector<double> bins;

  double at(std::size_t layer, std::size_t u, std::size_t v) const {
    return bins[(layer * params.bins + u) * params.bins + v];
  }
};

RgbUvHistogram compute_histogram(const ImageBuffer& img,
                                 const HistogramParams& params = {});

inline constexpr std::size_t kCompactDim = 55;

struct PcaModel {
  Eigen::MatrixXd coeff;      // D x out_dim, orthonormal columns
  Eigen::VectorXd bias;       // D, training mean
  Eigen::VectorXd variances;  // out_dim, non-increasing

  std::size_t input_dim() const { return static_cast<std::size_t>(coeff.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(coeff.cols()); }

  friend bool operator==(const PcaModel& a, const PcaModel& b) {
    return a.coeff == b.coeff && a.bias == b.bias && a.variances == b.variances;
  }
};

/// PCA on the rows of features (N x D). Uses the D x D covariance when
/// N > D and the N x N Gram matrix otherwise. Columns are sign-normalized
/// so their largest-magnitude entry is positive. Components beyond the
/// data's rank get zero variance and an arbitrary orthonormal completion.
PcaModel fit_pca(const Eigen::MatrixXd& features,
                 std::size_t out_dim = kCompactDim);

struct CompactFeature {
  std::vector<double> values;

  friend bool operator==(const CompactFeature&, const CompactFeature&) = default;
};

CompactFeature project(const PcaModel& pca, std::span<const double> vectorized);
CompactFeature project(const PcaModel& pca, const RgbUvHistogram& h);

}  // namespace wbaug
