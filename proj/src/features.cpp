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

#include "wbaug/features.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "wbaug/error.hpp"

namespace wbaug {

namespace {

// Weights are accumulated in 32.32 fixed point so the histogram does not
// depend on pixel order.
constexpr double kFixedScale = 4294967296.0;

std::size_t bin_of(double x, const HistogramParams& p, double inv_width) {
  const double pos = std::floor((x - p.lower) * inv_width);
  if (!(pos > 0.0)) return 0;
  const auto idx = static_cast<std::size_t>(pos);
  return std::min(idx, p.bins - 1);
}

void sign_normalize(Eigen::MatrixXd& coeff) {
  for (Eigen::Index c = 0; c < coeff.cols(); ++c) {
    Eigen::Index arg = 0;
    coeff.col(c).cwiseAbs().maxCoeff(&arg);
    if (coeff(arg, c) < 0.0) coeff.col(c) *= -1.0;
  }
}

// Modified Gram-Schmidt over the first `filled` columns, then completes the
// remaining columns from the standard basis.
void orthonormalize(Eigen::MatrixXd& q, Eigen::Index filled) {
  const Eigen::Index dim = q.rows();
  for (Eigen::Index c = 0; c < filled; ++c) {
    for (int pass = 0; pass < 2; ++pass)
      for (Eigen::Index p = 0; p < c; ++p)
        q.col(c) -= q.col(p).dot(q.col(c)) * q.col(p);
    q.col(c).normalize();
  }
  Eigen::Index next_basis = 0;
  for (Eigen::Index c = filled; c < q.cols(); ++c) {
    for (;;) {
      if (next_basis >= dim)
        fail(ErrorKind::DegenerateInput, "fit_pca: cannot complete basis");
      Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, next_basis++);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index p = 0; p < c; ++p) v -= q.col(p).dot(v) * q.col(p);
      const double norm = v.norm();
      if (norm > 1e-6) {
        q.col(c) = v / norm;
        break;
      }
    }
  }
}

}  // namespace

RgbUvHistogram compute_histogram(const ImageBuffer& img,
                                 const HistogramParams& params) {
  if (params.bins < 2)
    fail(ErrorKind::InvalidInput, "compute_histogram: need at least 2 bins, got " +
                                      std::to_string(params.bins));
  if (!(params.upper > params.lower) || !(params.epsilon > 0.0))
    fail(ErrorKind::InvalidInput, "compute_histogram: invalid bounds or epsilon");

  const std::size_t m = params.bins;
  const double inv_width = static_cast<double>(m) / (params.upper - params.lower);
  const double eps = params.epsilon;
  std::vector<std::uint64_t> acc(3 * m * m, 0);
  bool any_lit = false;

  const float* px = img.data().data();
  for (std::size_t i = 0; i < img.pixel_count(); ++i, px += 3) {
    const double r = std::max<double>(px[0], eps);
    const double g = std::max<double>(px[1], eps);
    const double b = std::max<double>(px[2], eps);
    any_lit = any_lit || (px[0] > eps && px[1] > eps && px[2] > eps);

    const auto weight = static_cast<std::uint64_t>(
        std::llround(std::sqrt(r * r + g * g + b * b) * kFixedScale));
    const double lr = std::log(r);
    const double lg = std::log(g);
    const double lb = std::log(b);
    // Layer c: u = log(c / next), v = log(c / prev), cyclic R -> G -> B.
    acc[(0 * m + bin_of(lr - lg, params, inv_width)) * m +
        bin_of(lr - lb, params, inv_width)] += weight;
    acc[(1 * m + bin_of(lg - lb, params, inv_width)) * m +
        bin_of(lg - lr, params, inv_width)] += weight;
    acc[(2 * m + bin_of(lb - lr, params, inv_width)) * m +
        bin_of(lb - lg, params, inv_width)] += weight;
  }
  if (!any_lit)
    fail(ErrorKind::DegenerateInput,
         "compute_histogram: no pixel has all channels above the black level");

  // Dividing out the common factor makes the result bit-identical under
  // pixel duplication and replication upsampling, which scale every count
  // by the same integer.
  std::uint64_t common = 0;
  for (std::uint64_t a : acc) common = std::gcd(common, a);
  RgbUvHistogram h{params, std::vector<double>(acc.size())};
  double sq = 0.0;
  for (std::size_t i = 0; i < acc.size(); ++i) {
    h.bins[i] = static_cast<double>(acc[i] / common);
    sq += h.bins[i] * h.bins[i];
  }
  const double norm = std::sqrt(sq);
  for (double& v : h.bins) v /= norm;
  return h;
}

PcaModel fit_pca(const Eigen::MatrixXd& features, std::size_t out_dim) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  const auto k = static_cast<Eigen::Index>(out_dim);
  if (k < 1 || k > d)
    fail(ErrorKind::InvalidInput, "fit_pca: output dimension " +
                                      std::to_string(out_dim) +
                                      " outside [1, " + std::to_string(d) + "]");
  if (n < k)
    fail(ErrorKind::InvalidInput, "fit_pca: " + std::to_string(n) +
                                      " samples is fewer than output dimension " +
                                      std::to_string(out_dim));
  if (n < 2) fail(ErrorKind::InvalidInput, "fit_pca: need at least 2 samples");

  PcaModel pca;
  pca.bias = features.colwise().mean().transpose();
  const Eigen::MatrixXd centered = features.rowwise() - pca.bias.transpose();
  const double total = centered.squaredNorm();
  if (!(total > 0.0))
    fail(ErrorKind::DegenerateInput, "fit_pca: data has zero variance");
  const double denom = static_cast<double>(n - 1);

  pca.coeff.resize(d, k);
  pca.variances.resize(k);

  if (n > d) {
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / denom;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
      fail(ErrorKind::DegenerateInput, "fit_pca: eigendecomposition failed");
    // Eigen returns ascending order.
    for (Eigen::Index c = 0; c < k; ++c) {
      pca.coeff.col(c) = eig.eigenvectors().col(d - 1 - c);
      pca.variances(c) = std::max(0.0, eig.eigenvalues()(d - 1 - c));
    }
  } else {
    const Eigen::MatrixXd gram = (centered * centered.transpose()) / denom;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success)
      fail(ErrorKind::DegenerateInput, "fit_pca: eigendecomposition failed");
    const double top = eig.eigenvalues()(n - 1);
    Eigen::Index filled = 0;
    for (Eigen::Index c = 0; c < k; ++c) {
      const double lambda = c < n ? eig.eigenvalues()(n - 1 - c) : 0.0;
      if (c == filled && lambda > 1e-10 * top) {
        pca.coeff.col(c) = centered.transpose() * eig.eigenvectors().col(n - 1 - c) /
                           std::sqrt(denom * lambda);
        pca.variances(c) = lambda;
        ++filled;
      } else {
        pca.variances(c) = 0.0;
      }
    }
    orthonormalize(pca.coeff, filled);
  }
  sign_normalize(pca.coeff);
  return pca;
}

CompactFeature project(const PcaModel& pca, std::span<const double> vectorized) {
  if (vectorized.size() != pca.input_dim())
    fail(ErrorKind::InvalidInput,
         "project: histogram has " + std::to_string(vectorized.size()) +
             " entries, PCA expects " + std::to_string(pca.input_dim()));
  const Eigen::Map<const Eigen::VectorXd> h(vectorized.data(),
                                            static_cast<Eigen::Index>(vectorized.size()));
  const Eigen::VectorXd v = pca.coeff.transpose() * (h - pca.bias);
  return {std::vector<double>(v.data(), v.data() + v.size())};
}

CompactFeature project(const PcaModel& pca, const RgbUvHistogram& h) {
  return project(pca, std::span<const double>(h.bins));
}

}  // namespace wbaug
