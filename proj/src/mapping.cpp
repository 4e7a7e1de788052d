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

#include "wbaug/mapping.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>

#if defined(__linux__)
#include <sys/mman.h>
#endif

#include "wbaug/error.hpp"

namespace wbaug {

namespace {

using Gram = Eigen::Matrix<double, 9, 9>;
using Cross = Eigen::Matrix<double, 9, 3>;

Eigen::Matrix<double, 9, 1> lift(const RgbColor& c) {
  const KernelVector k = kernel_phi(c);
  return Eigen::Map<const Eigen::Matrix<double, 9, 1>>(k.data());
}

ColorTransform from_solution(const Cross& x) {
  ColorTransform t;
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 9; ++col) t(row, col) = x(col, row);
  return t;
}

// Column-pivoted QR on the explicit kernel matrix; used when the normal
// equations are too ill-conditioned to trust.
ColorTransform solve_qr(std::span<const RgbColor> source,
                        std::span<const RgbColor> target,
                        const Eigen::Matrix<double, 9, 1>& scale) {
  const auto n = static_cast<Eigen::Index>(source.size());
  Eigen::MatrixXd a(n, 9);
  Eigen::MatrixXd b(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.row(i) = lift(source[i]).cwiseProduct(scale).transpose();
    b(i, 0) = target[i].r;
    b(i, 1) = target[i].g;
    b(i, 2) = target[i].b;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1.0 / kFitConditionLimit);
  if (qr.rank() < 9)
    fail(ErrorKind::DegenerateInput,
         "fit_transform: kernelized source colors have rank " +
             std::to_string(qr.rank()) + " < 9 (too few distinct colors)");
  Cross x = qr.solve(b);
  for (int col = 0; col < 9; ++col) x.row(col) *= scale(col);
  return from_solution(x);
}

}  // namespace

std::string_view style_code(Style s) {
  switch (s) {
    case Style::CameraStandard: return "CS";
    case Style::AdobeStandard: return "AS";
    case Style::Corrected: return "";
  }
  return "";
}

std::optional<Style> parse_style_code(std::string_view code) {
  if (code == "CS") return Style::CameraStandard;
  if (code == "AS") return Style::AdobeStandard;
  return std::nullopt;
}

const std::vector<WbSetting>& canonical_settings() {
  static const std::vector<WbSetting> settings = [] {
    std::vector<WbSetting> out;
    for (std::uint32_t t : {2850u, 3800u, 5500u, 6500u, 7500u}) {
      out.push_back({t, Style::CameraStandard});
      out.push_back({t, Style::AdobeStandard});
    }
    return out;
  }();
  return settings;
}

std::string setting_name(const WbSetting& s) {
  if (s.style == Style::Corrected) return "corrected";
  return std::to_string(s.temperature) + "K_" + std::string(style_code(s.style));
}

std::optional<WbSetting> parse_setting(std::string_view name) {
  if (name == "corrected") return WbSetting::corrected();
  const auto k = name.find("K_");
  if (k == std::string_view::npos || k == 0) return std::nullopt;
  std::uint32_t temperature = 0;
  const auto [ptr, ec] =
      std::from_chars(name.data(), name.data() + k, temperature);
  if (ec != std::errc{} || ptr != name.data() + k || temperature == 0)
    return std::nullopt;
  const auto style = parse_style_code(name.substr(k + 2));
  if (!style) return std::nullopt;
  return WbSetting{temperature, *style};
}

ColorTransform ColorTransform::identity(WbSetting tag) {
  ColorTransform t;
  t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
  t.tag = tag;
  return t;
}

ColorTransform fit_transform(std::span<const RgbColor> source,
                             std::span<const RgbColor> target) {
  if (source.size() != target.size())
    fail(ErrorKind::InvalidInput,
         "fit_transform: source has " + std::to_string(source.size()) +
             " colors, target has " + std::to_string(target.size()));
  if (source.size() < 9)
    fail(ErrorKind::InvalidInput,
         "fit_transform: need at least 9 color pairs, got " +
             std::to_string(source.size()));

  Gram gram = Gram::Zero();
  Cross cross = Cross::Zero();
  for (std::size_t i = 0; i < source.size(); ++i) {
    const auto& t = target[i];
    if (!std::isfinite(t.r) || !std::isfinite(t.g) || !std::isfinite(t.b))
      fail(ErrorKind::InvalidInput, "fit_transform: non-finite target color");
    const auto k = lift(source[i]);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(k);
    cross.col(0) += k * t.r;
    cross.col(1) += k * t.g;
    cross.col(2) += k * t.b;
  }
  gram = gram.selfadjointView<Eigen::Lower>();

  // Jacobi equilibration so the condition estimate reflects geometry rather
  // than the relative scale of linear and quadratic terms.
  Eigen::Matrix<double, 9, 1> scale;
  for (int i = 0; i < 9; ++i) {
    if (!(gram(i, i) > 0.0))
      fail(ErrorKind::DegenerateInput,
           "fit_transform: kernel term " + std::to_string(i) +
               " is identically zero over the source colors");
    scale(i) = 1.0 / std::sqrt(gram(i, i));
  }
  const Gram scaled = scale.asDiagonal() * gram * scale.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Gram> eig(scaled,
                                                Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(8);
  if (!(lo > 0.0) || hi / lo > kFitConditionLimit)
    return solve_qr(source, target, scale);

  const Eigen::LLT<Gram> llt(scaled);
  if (llt.info() != Eigen::Success) return solve_qr(source, target, scale);
  Cross x = llt.solve(scale.asDiagonal() * cross);
  for (int col = 0; col < 9; ++col) x.row(col) *= scale(col);
  return from_solution(x);
}

ColorTransform fit_transform(const ImageBuffer& source,
                             const ImageBuffer& target,
                             std::size_t max_pixels) {
  if (source.width() != target.width() || source.height() != target.height())
    fail(ErrorKind::InvalidInput,
         "fit_transform: image dimensions differ (" +
             std::to_string(source.width()) + "x" +
             std::to_string(source.height()) + " vs " +
             std::to_string(target.width()) + "x" +
             std::to_string(target.height()) + ")");
  const std::size_t n = source.pixel_count();
  const std::size_t stride =
      (max_pixels == 0 || n <= max_pixels) ? 1
                                           : (n + max_pixels - 1) / max_pixels;
  std::vector<RgbColor> src;
  std::vector<RgbColor> tgt;
  src.reserve(n / stride + 1);
  tgt.reserve(n / stride + 1);
  for (std::size_t i = 0; i < n; i += stride) {
    src.push_back(source.pixel(i));
    tgt.push_back(target.pixel(i));
  }
  return fit_transform(src, tgt);
}

namespace {

// Pixels are processed in planar blocks so the per-pixel loop vectorizes.
// Each output is summed in kernel order and no clone enables fused
// multiply-add, so results match across block sizes and CPU dispatch.
#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
__attribute__((target_clones("avx2", "default")))
#endif
void apply_planar(const double* m, const float* in, float* dst, std::size_t n) {
  constexpr std::size_t kBlock = 256;
  alignas(64) double r[kBlock], g[kBlock], b[kBlock], v[3][kBlock];
  for (std::size_t base = 0; base < n; base += kBlock) {
    const std::size_t len = std::min(kBlock, n - base);
    const float* src = in + 3 * base;
    for (std::size_t i = 0; i < len; ++i) {
      r[i] = src[3 * i];
      g[i] = src[3 * i + 1];
      b[i] = src[3 * i + 2];
    }
    for (int c = 0; c < 3; ++c) {
      const double* row = m + 9 * c;
      double* o = v[c];
      for (std::size_t i = 0; i < len; ++i) {
        const double x = row[0] * r[i] + row[1] * g[i] + row[2] * b[i] +
                         row[3] * (r[i] * g[i]) + row[4] * (r[i] * b[i]) +
                         row[5] * (g[i] * b[i]) + row[6] * (r[i] * r[i]) +
                         row[7] * (g[i] * g[i]) + row[8] * (b[i] * b[i]);
        const double lo = x < 0.0 ? 0.0 : x;
        o[i] = lo > 1.0 ? 1.0 : lo;
      }
    }
    float* d = dst + 3 * base;
    for (std::size_t i = 0; i < len; ++i) {
      d[3 * i] = static_cast<float>(v[0][i]);
      d[3 * i + 1] = static_cast<float>(v[1][i]);
      d[3 * i + 2] = static_cast<float>(v[2][i]);
    }
  }
}

// Large outputs are faulted in 2 MB pages where the kernel allows it.
void advise_huge_pages(void* p, std::size_t bytes) {
#if defined(__linux__) && defined(MADV_HUGEPAGE)
  constexpr std::uintptr_t kPage = 4096;
  if (bytes < (std::size_t{8} << 20)) return;
  const auto begin = (reinterpret_cast<std::uintptr_t>(p) + kPage - 1) & ~(kPage - 1);
  const auto end = (reinterpret_cast<std::uintptr_t>(p) + bytes) & ~(kPage - 1);
  if (end > begin) ::madvise(reinterpret_cast<void*>(begin), end - begin, MADV_HUGEPAGE);
#else
  (void)p;
  (void)bytes;
#endif
}

}  // namespace

ImageBuffer apply_transform(const ColorTransform& t, const ImageBuffer& img) {
  for (double v : t.m)
    if (!std::isfinite(v))
      fail(ErrorKind::InvalidInput, "apply_transform: non-finite matrix entry");
  if (img.empty()) fail(ErrorKind::InvalidInput, "apply_transform: empty image");

  double m[27];
  std::copy(t.m.begin(), t.m.end(), m);
  std::vector<float> out;
  out.reserve(img.data().size());
  advise_huge_pages(out.data(), out.capacity() * sizeof(float));
  out.resize(img.data().size());
  apply_planar(m, img.data().data(), out.data(), img.pixel_count());
  return ImageBuffer(img.width(), img.height(), std::move(out));
}

double mean_abs_error(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width() != b.width() || a.height() != b.height())
    fail(ErrorKind::InvalidInput, "mean_abs_error: dimensions differ");
  const auto x = a.data();
  const auto y = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    sum += std::abs(static_cast<double>(x[i]) - static_cast<double>(y[i]));
  return x.empty() ? 0.0 : sum / static_cast<double>(x.size());
}

}  // namespace wbaug
