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

#include <algorithm>
#include <cmath>
#include <vector>

#include "lumen/core.hpp"
#include "lumen/grid.hpp"

namespace lumen {

struct GuidedMedianConfig {
  int window_radius = 7;
  double sigma_color = 0.1;
  double sigma_spatial = 3.5;
  double occlusion_threshold = 0.01;
  int box_radius = 5;

  void validate() const {
    if (window_radius < 1) throw ContractError("guided median: window radius must be >= 1");
    if (!(sigma_color > 0.0 && sigma_spatial > 0.0)) throw ContractError("guided median: sigmas must be positive");
    if (box_radius < 0) throw ContractError("guided median: box radius must be >= 0");
  }
};

struct OcclusionMask {
  Mask mask;
  double threshold_used = 0.0;
  int box_radius = 0;

  [[nodiscard]] std::size_t count() const {
    return static_cast<std::size_t>(std::count_if(mask.values().begin(), mask.values().end(),
                                                  [](std::uint8_t v) { return v != 0; }));
  }
};

/// |grad w|^2 by central differences with mirrored borders.
inline Image squared_gradient_magnitude(const Image& omega) {
  Image out(omega.width(), omega.height());
  for (int y = 0; y < omega.height(); ++y) {
    for (int x = 0; x < omega.width(); ++x) {
      const double gx = 0.5 * (omega.mirrored(x + 1, y) - omega.mirrored(x - 1, y));
      const double gy = 0.5 * (omega.mirrored(x, y + 1) - omega.mirrored(x, y - 1));
      out(x, y) = gx * gx + gy * gy;
    }
  }
  return out;
}

/// Mean over the (2r+1)^2 window, mirrored borders.
inline Image box_filter(const Image& in, int r) {
  const double norm = 1.0 / static_cast<double>((2 * r + 1) * (2 * r + 1));
  Image rows(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += in.mirrored(x + i, y);
      rows(x, y) = s;
    }
  }
  Image out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      double s = 0.0;
      for (int i = -r; i <= r; ++i) s += rows.mirrored(x, y + i);
      out(x, y) = s * norm;
    }
  }
  return out;
}

/// Marks pixels whose box-averaged squared disparity gradient exceeds the threshold.
inline OcclusionMask detect_occlusion(const Image& omega, const GuidedMedianConfig& cfg) {
  cfg.validate();
  const Image response = box_filter(squared_gradient_magnitude(omega), cfg.box_radius);
  OcclusionMask out{Mask(omega.width(), omega.height(), 0), cfg.occlusion_threshold, cfg.box_radius};
  for (std::size_t i = 0; i < response.size(); ++i) {
    out.mask.values()[i] = response.values()[i] > cfg.occlusion_threshold ? 1 : 0;
  }
  return out;
}

/// Smallest value whose cumulative weight reaches half the total. Ties in value
/// keep their input order.
inline double weighted_median(std::vector<std::pair<double, double>>& value_weight) {
  std::stable_sort(value_weight.begin(), value_weight.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  double total = 0.0;
  for (const auto& [v, wt] : value_weight) total += wt;
  const double half = 0.5 * total;
  double cum = 0.0;
  for (const auto& [v, wt] : value_weight) {
    cum += wt;
    if (cum >= half) return v;
  }
  return value_weight.back().first;
}

/// Replaces every masked disparity with the guide-weighted median of its
/// window (clipped at the image border). Reads only the input field.
inline DisparityField guided_median(const Image& omega, const OcclusionMask& mask, const View& guide,
                                    const GuidedMedianConfig& cfg) {
  cfg.validate();
  require_same_shape(omega, mask.mask, "guided_median mask");
  if (guide.width() != omega.width() || guide.height() != omega.height()) {
    throw ContractError("guided_median: guide view does not match disparity field");
  }
  const int w = omega.width();
  const int h = omega.height();
  const int r = cfg.window_radius;
  const double inv_color = 1.0 / (2.0 * cfg.sigma_color * cfg.sigma_color);
  const double inv_spatial = 1.0 / (2.0 * cfg.sigma_spatial * cfg.sigma_spatial);
  DisparityField out(omega);
  std::vector<std::pair<double, double>> window;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.mask(x, y)) continue;
      window.clear();
      for (int qy = std::max(0, y - r); qy <= std::min(h - 1, y + r); ++qy) {
        for (int qx = std::max(0, x - r); qx <= std::min(w - 1, x + r); ++qx) {
          double color = 0.0;
          for (std::size_t c = 0; c < 3; ++c) {
            const double d = guide[c](x, y) - guide[c](qx, qy);
            color += d * d;
          }
          const double dist2 = static_cast<double>((qx - x) * (qx - x) + (qy - y) * (qy - y));
          window.emplace_back(omega(qx, qy), std::exp(-color * inv_color) * std::exp(-dist2 * inv_spatial));
        }
      }
      out(x, y) = weighted_median(window);
    }
  }
  return out;
}

}  // namespace lumen
