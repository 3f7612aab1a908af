// Copyright 2026 The Lumen Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "lumen/core.hpp"
#include "lumen/grid.hpp"
#include "lumen/parallel.hpp"

namespace lumen {

/// Normalized, symmetric 1D Gaussian taps with radius ceil(3 sigma).
struct GaussianKernel {
  double sigma = 0.0;
  int radius = 0;
  std::vector<double> taps{1.0};

  GaussianKernel() = default;
  explicit GaussianKernel(double s) : sigma(s) {
    if (!(s >= 0.0)) throw ContractError("gaussian sigma must be non-negative");
    if (s == 0.0) return;
    radius = static_cast<int>(std::ceil(3.0 * s));
    taps.assign(static_cast<std::size_t>(2 * radius + 1), 0.0);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
      const double w = std::exp(-0.5 * static_cast<double>(i * i) / (s * s));
      taps[static_cast<std::size_t>(i + radius)] = w;
      sum += w;
    }
    for (double& w : taps) w /= sum;
  }

  [[nodiscard]] double tap(int offset) const { return taps[static_cast<std::size_t>(offset + radius)]; }
};

namespace detail {

inline Image convolve_rows(const Image& in, const GaussianKernel& k) {
  Image out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      double acc = 0.0;
      for (int i = -k.radius; i <= k.radius; ++i) acc += k.tap(i) * in.mirrored(x + i, y);
      out(x, y) = acc;
    }
  }
  return out;
}

inline Image convolve_cols(const Image& in, const GaussianKernel& k) {
  Image out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      double acc = 0.0;
      for (int i = -k.radius; i <= k.radius; ++i) acc += k.tap(i) * in.mirrored(x, y + i);
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace detail

/// Separable Gaussian blur with independent per-axis sigmas and mirrored borders.
inline Image gaussian_smooth(const Image& grid, double sigma_x, double sigma_y) {
  Image out = grid;
  if (sigma_x > 0.0) out = detail::convolve_rows(out, GaussianKernel(sigma_x));
  if (sigma_y > 0.0) out = detail::convolve_cols(out, GaussianKernel(sigma_y));
  if (sigma_x < 0.0 || sigma_y < 0.0) throw ContractError("gaussian sigma must be non-negative");
  return out;
}

inline Image gaussian_smooth(const Image& grid, double sigma) { return gaussian_smooth(grid, sigma, sigma); }

/// Catmull-Rom weights for the taps at offsets -1, 0, 1, 2 from floor(x), t = x - floor(x).
constexpr std::array<double, 4> catmull_rom_weights(double t) noexcept {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0), 0.5 * (-3.0 * t3 + 4.0 * t2 + t),
          0.5 * (t3 - t2)};
}

/// Catmull-Rom bicubic interpolation with mirrored borders. Exact on lattice points.
inline double bicubic_sample(const Image& grid, double x, double y) noexcept {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const int x0 = static_cast<int>(fx);
  const int y0 = static_cast<int>(fy);
  const auto wx = catmull_rom_weights(x - fx);
  const auto wy = catmull_rom_weights(y - fy);
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    if (wy[j] == 0.0) continue;
    double row = 0.0;
    for (int i = 0; i < 4; ++i) {
      if (wx[i] == 0.0) continue;
      row += wx[i] * grid.mirrored(x0 - 1 + i, y0 - 1 + j);
    }
    acc += wy[j] * row;
  }
  return acc;
}

/// Source coordinate of target sample `i` under pixel-center aligned uniform scaling.
constexpr double source_coordinate(int i, int source_n, int target_n) noexcept {
  return (static_cast<double>(i) + 0.5) * static_cast<double>(source_n) / static_cast<double>(target_n) - 0.5;
}

/// Anti-alias blur width for shrinking an axis by `ratio` (< 1) given the base presmoothing sigma.
inline double antialias_sigma(double presmooth_sigma, double ratio) {
  if (ratio >= 1.0 || presmooth_sigma <= 0.0) return 0.0;
  return presmooth_sigma * std::sqrt(1.0 / (ratio * ratio) - 1.0);
}

/// Resize to target dimensions. Shrinking axes are blurred first (see antialias_sigma).
inline Image rescale(const Image& grid, int target_w, int target_h, double presmooth_sigma) {
  if (target_w < 1 || target_h < 1) throw ContractError("rescale target dimensions must be >= 1");
  if (grid.empty()) throw ContractError("rescale of an empty grid");
  const double rx = static_cast<double>(target_w) / grid.width();
  const double ry = static_cast<double>(target_h) / grid.height();
  const double sx = antialias_sigma(presmooth_sigma, rx);
  const double sy = antialias_sigma(presmooth_sigma, ry);
  const Image src = (sx > 0.0 || sy > 0.0) ? gaussian_smooth(grid, sx, sy) : grid;
  Image out(target_w, target_h);
  for (int y = 0; y < target_h; ++y) {
    const double v = source_coordinate(y, grid.height(), target_h);
    for (int x = 0; x < target_w; ++x) {
      out(x, y) = bicubic_sample(src, source_coordinate(x, grid.width(), target_w), v);
    }
  }
  return out;
}

/// Spatial bicubic upscale. Values are not rescaled; the caller owns the unit change.
inline DisparityField upscale_disparity(const DisparityField& field, int target_w, int target_h) {
  if (target_w < field.width() || target_h < field.height()) {
    throw ContractError("upscale_disparity target must not be smaller than the source");
  }
  return DisparityField(rescale(field, target_w, target_h, 0.0));
}

struct WarpedLightField {
  LightField lf;
  /// Indexed like LightField::slot; empty for invalid views.
  std::vector<Mask> validity;
};

/// Resamples every valid view at x + offset * omega(x) so that it aligns with
/// the central view. Samples whose source lies outside the image are flagged 0.
inline WarpedLightField warp_lightfield(const LightField& lf, const DisparityField& omega, int threads = 1) {
  const int w = lf.width();
  const int h = lf.height();
  if (omega.width() != w || omega.height() != h) {
    throw ContractError("warp_lightfield: disparity field " + std::to_string(omega.width()) + "x" +
                        std::to_string(omega.height()) + " does not match views " + std::to_string(w) + "x" +
                        std::to_string(h));
  }
  std::vector<View> views(lf.views().size());
  std::vector<Mask> validity(lf.views().size());
  const auto indices = lf.valid_views();
  parallel_for(indices.size(), threads, [&](std::size_t k) {
    const ViewIndex vi = indices[k];
    const std::size_t slot = lf.slot(vi);
    const View& src = lf.view(vi);
    Mask valid(w, h, 1);
    if (vi == lf.center()) {
      views[slot] = src;
      validity[slot] = std::move(valid);
      return;
    }
    const Offset off = lf.offset(vi);
    View dst(w, h);
    const double max_x = static_cast<double>(w - 1);
    const double max_y = static_cast<double>(h - 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double sx = x + off.x * omega(x, y);
        const double sy = y + off.y * omega(x, y);
        if (sx < 0.0 || sx > max_x || sy < 0.0 || sy > max_y) valid(x, y) = 0;
        for (std::size_t c = 0; c < 3; ++c) dst[c](x, y) = bicubic_sample(src[c], sx, sy);
      }
    }
    views[slot] = std::move(dst);
    validity[slot] = std::move(valid);
  });
  return {lf.with_views(std::move(views)), std::move(validity)};
}

}  // namespace lumen
