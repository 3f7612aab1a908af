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

// Synthetic light-fields with analytic ground-truth disparity. Every view is
// evaluated directly from a continuous band-limited texture, so no image
// resampling is involved and the generator can serve as an oracle for the
// warping and estimation code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include "lumen/core.hpp"

namespace lumen {

/// Smooth random texture: a linear sum of equal-amplitude random-phase cosines
/// with radial frequency in [0.1, 0.7] * `cutoff` * Nyquist. The sum stays
/// strictly band-limited, and keeping clear of the cutoff holds the bicubic
/// resampling error well below 1e-3. Values are mapped affinely into [0, 1]; `normalize_over` stretches
/// the contrast to the range actually taken on a region.
class BandLimitedTexture {
 public:
  BandLimitedTexture(std::uint64_t seed, double cutoff, int components = 64) {
    if (!(cutoff > 0.0 && cutoff <= 1.0)) throw ContractError("texture cutoff must lie in (0,1]");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double f_max = 0.5 * cutoff;
    waves_.reserve(static_cast<std::size_t>(components));
    double total = 0.0;
    for (int i = 0; i < components; ++i) {
      const double r = f_max * (0.1 + 0.6 * unit(rng));
      const double a = 2.0 * std::numbers::pi * unit(rng);
      const double phase = 2.0 * std::numbers::pi * unit(rng);
      waves_.push_back({2.0 * std::numbers::pi * r * std::cos(a), 2.0 * std::numbers::pi * r * std::sin(a), phase, 1.0});
      total += 1.0;
    }
    // The analytic bound |sum| <= total keeps values in [0, 1] everywhere.
    bias_ = 0.5;
    gain_ = 0.5 / total;
  }

  /// Maps the extremes over [x0, x1] x [y0, y1] (sampled every half pixel)
  /// to [0.02, 0.98]. Points off the sampling lattice may overshoot by a
  /// fraction of a percent; the final clamp only guards against that.
  void normalize_over(double x0, double y0, double x1, double y1) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double y = y0; y <= y1; y += 0.5) {
      for (double x = x0; x <= x1; x += 0.5) {
        const double v = raw(x, y);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    if (!(hi > lo)) return;
    gain_ = 0.96 / (hi - lo);
    bias_ = 0.02 - gain_ * lo;
  }

  [[nodiscard]] double operator()(double x, double y) const noexcept {
    return std::clamp(bias_ + gain_ * raw(x, y), 0.0, 1.0);
  }

 private:
  [[nodiscard]] double raw(double x, double y) const noexcept {
    double s = 0.0;
    for (const Wave& w : waves_) s += w.amp * std::cos(w.kx * x + w.ky * y + w.phase);
    return s;
  }

  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves_;
  double bias_ = 0.5;
  double gain_ = 1.0;
};

struct PlaneScene {
  double d = 0.0;
};

/// Left of edge_column the disparity is d_left, from edge_column on d_right.
/// The side with the larger disparity is the foreground and occludes the other.
struct StepScene {
  double d_left = 0.0;
  double d_right = 0.0;
  int edge_column = 0;
};

/// Disparity ramps linearly from d_min at column 0 to d_max at the last column.
struct SlopeScene {
  double d_min = 0.0;
  double d_max = 0.0;
};

using SceneKind = std::variant<PlaneScene, StepScene, SlopeScene>;

struct SceneSpec {
  SceneKind kind = PlaneScene{};
  int width = 64;
  int height = 64;
  int views_s = 3;
  int views_t = 3;
  ViewIndex center{1, 1};
  double kappa_k = 1.0;
  std::uint64_t texture_seed = 1;
  double texture_cutoff = 0.25;
  double noise_sigma = 0.0;

  [[nodiscard]] double max_abs_disparity() const {
    return std::visit(
        [](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, PlaneScene>) return std::abs(k.d);
          else if constexpr (std::is_same_v<K, StepScene>) return std::max(std::abs(k.d_left), std::abs(k.d_right));
          else return std::max(std::abs(k.d_min), std::abs(k.d_max));
        },
        kind);
  }

  [[nodiscard]] double max_offset() const {
    double m = 0.0;
    for (int t = 0; t < views_t; ++t)
      for (int s = 0; s < views_s; ++s) m = std::max(m, relative_offset({s, t}, center, kappa_k).norm());
    return m;
  }

  void validate() const {
    if (width < 5 || height < 5) throw ContractError("scene must be at least 5x5 pixels");
    if (views_s < 1 || views_t < 1 || views_s * views_t < 2) throw ContractError("scene needs at least two views");
    if (center.s < 0 || center.s >= views_s || center.t < 0 || center.t >= views_t) {
      throw ContractError("scene center view outside the directional grid");
    }
    if (noise_sigma < 0.0) throw ContractError("noise sigma must be non-negative");
    if (max_abs_disparity() * max_offset() >= std::min(width, height) / 4.0) {
      throw ContractError("scene disparity too large: warps must stay within a quarter of the image");
    }
    if (const auto* st = std::get_if<StepScene>(&kind); st && (st->edge_column <= 0 || st->edge_column >= width)) {
      throw ContractError("step edge column must lie strictly inside the image");
    }
  }
};

struct SyntheticLightField {
  LightField lf;
  DisparityField ground_truth;
};

namespace detail {

struct ChannelTextures {
  std::array<BandLimitedTexture, 3> near;
  std::array<BandLimitedTexture, 3> far;
};

inline ChannelTextures make_textures(std::uint64_t seed, double cutoff) {
  std::seed_seq seq{seed, std::uint64_t{0x5eed}};
  std::array<std::uint64_t, 6> s{};
  std::array<std::uint32_t, 12> raw{};
  seq.generate(raw.begin(), raw.end());
  for (std::size_t i = 0; i < 6; ++i) s[i] = (std::uint64_t{raw[2 * i]} << 32) | raw[2 * i + 1];
  return {{BandLimitedTexture(s[0], cutoff), BandLimitedTexture(s[1], cutoff), BandLimitedTexture(s[2], cutoff)},
          {BandLimitedTexture(s[3], cutoff), BandLimitedTexture(s[4], cutoff), BandLimitedTexture(s[5], cutoff)}};
}

}  // namespace detail

inline double ground_truth_at(const SceneSpec& spec, double x) {
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, PlaneScene>) return k.d;
        else if constexpr (std::is_same_v<K, StepScene>) return x < k.edge_column - 0.5 ? k.d_left : k.d_right;
        else return k.d_min + (k.d_max - k.d_min) * x / (spec.width - 1);
      },
      spec.kind);
}

/// Renders the scene. View theta at pixel p shows the scene point x of the
/// central view that satisfies p = x + offset(theta) * omega(x).
inline SyntheticLightField generate(const SceneSpec& spec) {
  spec.validate();
  auto tex = detail::make_textures(spec.texture_seed, spec.texture_cutoff);
  const int w = spec.width;
  const int h = spec.height;
  {
    // Every texture coordinate the views can reach lies within this margin.
    double reach = 0.0;
    for (int t = 0; t < spec.views_t; ++t)
      for (int s = 0; s < spec.views_s; ++s) {
        const Offset off = relative_offset({s, t}, spec.center, spec.kappa_k);
        reach = std::max({reach, std::abs(off.x), std::abs(off.y)});
      }
    double d_max = 0.0;
    for (int x = 0; x < w; ++x) d_max = std::max(d_max, std::abs(ground_truth_at(spec, x)));
    const double m = reach * d_max * 2.0 + 1.0;
    for (auto* group : {&tex.near, &tex.far})
      for (auto& t : *group) t.normalize_over(-m, -m, w - 1 + m, h - 1 + m);
  }

  auto sample = [&](Offset off, double px, double py, std::size_t c) -> double {
    return std::visit(
        [&](const auto& k) -> double {
          using K = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<K, PlaneScene>) {
            return tex.near[c](px - off.x * k.d, py - off.y * k.d);
          } else if constexpr (std::is_same_v<K, SlopeScene>) {
            const double slope = (k.d_max - k.d_min) / (w - 1);
            const double xs = (px - off.x * k.d_min) / (1.0 + off.x * slope);
            const double d = k.d_min + slope * xs;
            return tex.near[c](xs, py - off.y * d);
          } else {
            const bool left_front = k.d_left > k.d_right;
            const double d_front = left_front ? k.d_left : k.d_right;
            const double d_back = left_front ? k.d_right : k.d_left;
            const double boundary = k.edge_column - 0.5;
            const double xf = px - off.x * d_front;
            const bool hits_front = left_front ? xf < boundary : xf >= boundary;
            if (hits_front) return tex.near[c](xf, py - off.y * d_front);
            return tex.far[c](px - off.x * d_back, py - off.y * d_back);
          }
        },
        spec.kind);
  };

  const std::size_t n = static_cast<std::size_t>(spec.views_s) * static_cast<std::size_t>(spec.views_t);
  std::vector<View> views(n);
  std::mt19937_64 noise_rng(spec.texture_seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  for (int t = 0; t < spec.views_t; ++t) {
    for (int s = 0; s < spec.views_s; ++s) {
      const Offset off = relative_offset({s, t}, spec.center, spec.kappa_k);
      View v(w, h);
      for (std::size_t c = 0; c < 3; ++c) {
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < w; ++x) {
            double val = sample(off, x, y, c);
            if (spec.noise_sigma > 0.0) val = std::clamp(val + noise(noise_rng), 0.0, 1.0);
            v[c](x, y) = val;
          }
        }
      }
      views[static_cast<std::size_t>(t) * static_cast<std::size_t>(spec.views_s) + static_cast<std::size_t>(s)] =
          std::move(v);
    }
  }

  DisparityField gt(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) gt(x, y) = ground_truth_at(spec, x);

  return {LightField(spec.views_s, spec.views_t, spec.center, spec.kappa_k, std::move(views), std::vector<bool>(n, true)),
          std::move(gt)};
}

}  // namespace lumen
