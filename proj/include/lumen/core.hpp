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
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "lumen/errors.hpp"
#include "lumen/grid.hpp"

namespace lumen {

/// Directional coordinate of a sub-aperture view: s is the column, t the row.
struct ViewIndex {
  int s = 0;
  int t = 0;

  bool operator==(const ViewIndex&) const = default;
};

inline std::string to_string(ViewIndex v) {
  return "(" + std::to_string(v.s) + "," + std::to_string(v.t) + ")";
}

/// Displacement direction of a view relative to the central one, with the
/// horizontal lens-plane scale already applied.
struct Offset {
  double x = 0.0;
  double y = 0.0;

  [[nodiscard]] double norm() const noexcept { return std::hypot(x, y); }
  bool operator==(const Offset&) const = default;
};

/// Offset of view `theta` relative to `center`: (k * ds, dt).
constexpr Offset relative_offset(ViewIndex theta, ViewIndex center, double kappa_k) noexcept {
  return {kappa_k * static_cast<double>(theta.s - center.s), static_cast<double>(theta.t - center.t)};
}

enum class ColorSpace { RGB, HSV };

inline const char* to_string(ColorSpace c) { return c == ColorSpace::RGB ? "rgb" : "hsv"; }

/// One sub-aperture image: three radiance channels on a common grid, values in [0,1].
struct View {
  std::array<Image, 3> channels;

  View() = default;
  View(int width, int height, double fill = 0.0)
      : channels{Image(width, height, fill), Image(width, height, fill), Image(width, height, fill)} {}
  explicit View(std::array<Image, 3> ch) : channels(std::move(ch)) {
    if (!channels[0].same_shape(channels[1]) || !channels[0].same_shape(channels[2])) {
      throw ContractError("view channels must share dimensions");
    }
  }

  [[nodiscard]] int width() const noexcept { return channels[0].width(); }
  [[nodiscard]] int height() const noexcept { return channels[0].height(); }
  [[nodiscard]] bool empty() const noexcept { return channels[0].empty(); }

  Image& operator[](std::size_t c) noexcept { return channels[c]; }
  const Image& operator[](std::size_t c) const noexcept { return channels[c]; }

  bool operator==(const View&) const = default;
};

/// Per-pixel disparity relative to the central view, in pixels per unit
/// directional offset at the resolution of the grid.
class DisparityField : public Image {
 public:
  using Image::Image;
  DisparityField() = default;
  explicit DisparityField(Image values) : Image(std::move(values)) {}
};

/// A regular ns x nt grid of sub-aperture views sharing one spatial resolution.
/// Views flagged invalid (vignetted corners and the like) carry no pixels.
class LightField {
 public:
  LightField() = default;

  LightField(int ns, int nt, ViewIndex center, double kappa_k, std::vector<View> views, std::vector<bool> valid)
      : ns_(ns), nt_(nt), center_(center), kappa_k_(kappa_k), views_(std::move(views)), valid_(std::move(valid)) {
    validate();
  }

  [[nodiscard]] int ns() const noexcept { return ns_; }
  [[nodiscard]] int nt() const noexcept { return nt_; }
  [[nodiscard]] ViewIndex center() const noexcept { return center_; }
  [[nodiscard]] double kappa_k() const noexcept { return kappa_k_; }
  [[nodiscard]] int width() const noexcept { return view(center_).width(); }
  [[nodiscard]] int height() const noexcept { return view(center_).height(); }

  [[nodiscard]] bool contains(ViewIndex v) const noexcept { return v.s >= 0 && v.s < ns_ && v.t >= 0 && v.t < nt_; }
  [[nodiscard]] bool is_valid(ViewIndex v) const { return valid_[slot(v)]; }
  [[nodiscard]] const View& view(ViewIndex v) const { return views_[slot(v)]; }
  [[nodiscard]] View& view(ViewIndex v) { return views_[slot(v)]; }
  [[nodiscard]] const View& center_view() const { return view(center_); }

  [[nodiscard]] Offset offset(ViewIndex v) const noexcept { return relative_offset(v, center_, kappa_k_); }

  [[nodiscard]] int valid_count() const noexcept {
    return static_cast<int>(std::count(valid_.begin(), valid_.end(), true));
  }

  /// All valid view indices in row-major (t, then s) order.
  [[nodiscard]] std::vector<ViewIndex> valid_views() const {
    std::vector<ViewIndex> out;
    for (int t = 0; t < nt_; ++t)
      for (int s = 0; s < ns_; ++s)
        if (valid_[slot({s, t})]) out.push_back({s, t});
    return out;
  }

  /// Same geometry, replaced views. Invalid slots may be empty.
  [[nodiscard]] LightField with_views(std::vector<View> views) const {
    return LightField(ns_, nt_, center_, kappa_k_, std::move(views), valid_);
  }

  [[nodiscard]] const std::vector<View>& views() const noexcept { return views_; }
  [[nodiscard]] const std::vector<bool>& valid_flags() const noexcept { return valid_; }

  [[nodiscard]] std::size_t slot(ViewIndex v) const {
    if (!contains(v)) throw ContractError("view index " + to_string(v) + " outside directional grid");
    return static_cast<std::size_t>(v.t) * static_cast<std::size_t>(ns_) + static_cast<std::size_t>(v.s);
  }

  bool operator==(const LightField&) const = default;

 private:
  void validate() const {
    if (ns_ <= 0 || nt_ <= 0) throw ContractError("directional grid extents must be positive");
    const auto n = static_cast<std::size_t>(ns_) * static_cast<std::size_t>(nt_);
    if (views_.size() != n || valid_.size() != n) throw ContractError("view table size does not match ns*nt");
    if (!contains(center_)) throw ContractError("center view " + to_string(center_) + " outside directional grid");
    if (!valid_[slot(center_)]) throw DataError("center view " + to_string(center_) + " is not valid");
    if (valid_count() < 2) throw DataError("light-field needs at least two valid views");
    const View& c = views_[slot(center_)];
    if (c.width() <= 0 || c.height() <= 0) throw ContractError("center view is empty");
    for (std::size_t i = 0; i < n; ++i) {
      if (valid_[i] && (views_[i].width() != c.width() || views_[i].height() != c.height())) {
        throw DataError("valid views must share the central view's dimensions");
      }
    }
    if (!std::isfinite(kappa_k_)) throw ContractError("kappa must be finite");
  }

  int ns_ = 0;
  int nt_ = 0;
  ViewIndex center_{};
  double kappa_k_ = 1.0;
  std::vector<View> views_;
  std::vector<bool> valid_;
};

/// HSV triple, each component in [0,1]; hue is degrees / 360.
struct Hsv {
  double h, s, v;
};

/// Hue is a linear scalar here (no wrap-around distance); gray pixels get h = 0.
inline Hsv rgb_to_hsv(double r, double g, double b) noexcept {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out{0.0, 0.0, mx};
  if (mx <= 0.0 || delta <= 0.0) return out;
  out.s = delta / mx;
  double h;
  if (mx == r) {
    h = (g - b) / delta;
    if (h < 0.0) h += 6.0;
  } else if (mx == g) {
    h = (b - r) / delta + 2.0;
  } else {
    h = (r - g) / delta + 4.0;
  }
  out.h = h / 6.0;
  return out;
}

inline View rgb_to_hsv(const View& rgb) {
  View out(rgb.width(), rgb.height());
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      const Hsv hsv = rgb_to_hsv(rgb[0](x, y), rgb[1](x, y), rgb[2](x, y));
      out[0](x, y) = hsv.h;
      out[1](x, y) = hsv.s;
      out[2](x, y) = hsv.v;
    }
  }
  return out;
}

inline LightField to_color_space(const LightField& lf, ColorSpace cs) {
  if (cs == ColorSpace::RGB) return lf;
  std::vector<View> views = lf.views();
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (lf.valid_flags()[i]) views[i] = rgb_to_hsv(views[i]);
  }
  return lf.with_views(std::move(views));
}

}  // namespace lumen
