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
#include <vector>

#include "lumen/core.hpp"
#include "lumen/grid.hpp"
#include "lumen/parallel.hpp"

namespace lumen {

/// Symmetric 2x2 tensor [[j11, j12], [j12, j22]].
struct MotionTensor2 {
  double j11 = 0.0;
  double j12 = 0.0;
  double j22 = 0.0;

  /// w^T J w with w = (u, 1).
  [[nodiscard]] constexpr double quadratic(double u) const noexcept { return j11 * u * u + 2.0 * j12 * u + j22; }

  constexpr void add_outer(double a, double b) noexcept {
    j11 += a * a;
    j12 += a * b;
    j22 += b * b;
  }

  friend bool operator==(const MotionTensor2&, const MotionTensor2&) = default;
};

using TensorGrid = Grid<MotionTensor2>;

/// Per-channel intensity (J_g) and gradient (J_G) light-field motion tensors
/// summed over all non-central views, plus how many views fed each pixel.
struct TensorField {
  std::array<TensorGrid, 3> intensity;
  std::array<TensorGrid, 3> gradient;
  Grid<int> view_count;

  [[nodiscard]] int width() const noexcept { return view_count.width(); }
  [[nodiscard]] int height() const noexcept { return view_count.height(); }
};

struct Gradient {
  Image gx;
  Image gy;
};

/// Fourth-order central differences (1, -8, 0, 8, -1) / 12 with mirrored borders.
inline Gradient spatial_gradient(const Image& grid) {
  if (grid.width() < 5 || grid.height() < 5) throw ContractError("spatial_gradient needs at least a 5x5 grid");
  Gradient g{Image(grid.width(), grid.height()), Image(grid.width(), grid.height())};
  constexpr double kScale = 1.0 / 12.0;
  for (int y = 0; y < grid.height(); ++y) {
    for (int x = 0; x < grid.width(); ++x) {
      // Paired differences keep the result exactly zero on constant regions.
      g.gx(x, y) = kScale * ((grid.mirrored(x - 2, y) - grid.mirrored(x + 2, y)) +
                             8.0 * (grid.mirrored(x + 1, y) - grid.mirrored(x - 1, y)));
      g.gy(x, y) = kScale * ((grid.mirrored(x, y - 2) - grid.mirrored(x, y + 2)) +
                             8.0 * (grid.mirrored(x, y + 1) - grid.mirrored(x, y - 1)));
    }
  }
  return g;
}

/// (warped - center) / |offset|.
inline Image directional_derivative(const Image& warped, const Image& center, Offset offset) {
  require_same_shape(warped, center, "directional_derivative");
  const double n = offset.norm();
  if (!(n > 0.0)) throw ContractError("directional_derivative: zero view offset");
  Image out(warped.width(), warped.height());
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = (warped.values()[i] - center.values()[i]) / n;
  return out;
}

namespace detail {

/// Adds d d^T for d = (offset . grad(L), |offset| L_theta) at every valid pixel.
inline void accumulate_view(TensorGrid& j, const Gradient& grad, const Image& l_theta, Offset off,
                            const Mask& valid) {
  const double n = off.norm();
  for (int y = 0; y < j.height(); ++y) {
    for (int x = 0; x < j.width(); ++x) {
      if (!valid(x, y)) continue;
      j(x, y).add_outer(off.x * grad.gx(x, y) + off.y * grad.gy(x, y), n * l_theta(x, y));
    }
  }
}

}  // namespace detail

/// Builds J_g and J_G per channel from a light-field that is already warped
/// onto the central view. Views are summed in row-major directional order.
inline TensorField accumulate_tensors(const LightField& warped, const std::vector<Mask>& validity, int threads = 1) {
  const int w = warped.width();
  const int h = warped.height();
  if (validity.size() != warped.views().size()) throw ContractError("accumulate_tensors: validity table size");
  std::vector<ViewIndex> others;
  for (ViewIndex v : warped.valid_views())
    if (!(v == warped.center())) others.push_back(v);
  if (others.empty()) throw DataError("light-field has no valid non-central view; no constancy constraint exists");

  TensorField tf;
  tf.view_count = Grid<int>(w, h, 0);
  for (std::size_t c = 0; c < 3; ++c) {
    tf.intensity[c] = TensorGrid(w, h);
    tf.gradient[c] = TensorGrid(w, h);
  }
  for (ViewIndex v : others) {
    const Mask& m = validity[warped.slot(v)];
    require_same_shape(m, tf.view_count, "accumulate_tensors validity");
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) tf.view_count(x, y) += m(x, y) ? 1 : 0;
  }
  if (std::all_of(tf.view_count.values().begin(), tf.view_count.values().end(), [](int n) { return n == 0; })) {
    throw DataError("no pixel has a valid non-central view; no constancy constraint exists");
  }

  const View& center = warped.center_view();
  parallel_for(3, threads, [&](std::size_t c) {
    const Gradient gc = spatial_gradient(center[c]);
    for (ViewIndex v : others) {
      const Offset off = warped.offset(v);
      const Image& lv = warped.view(v)[c];
      const Mask& valid = validity[warped.slot(v)];
      const Gradient g = spatial_gradient(lv);
      detail::accumulate_view(tf.intensity[c], g, directional_derivative(lv, center[c], off), off, valid);
      // Gradient constancy: the x- and y-derivative images play the role of L.
      detail::accumulate_view(tf.gradient[c], spatial_gradient(g.gx), directional_derivative(g.gx, gc.gx, off),
                              off, valid);
      detail::accumulate_view(tf.gradient[c], spatial_gradient(g.gy), directional_derivative(g.gy, gc.gy, off),
                              off, valid);
    }
  });
  return tf;
}

/// Derivative of the robust penalizer sqrt(s + eps).
inline double robust_derivative(double s, double eps) noexcept { return 0.5 / std::sqrt(s + eps); }

struct DataTermParams {
  double gamma = 0.0;
  double epsilon_g = 1e-6;
  double epsilon_G = 1e-6;
  ColorSpace color_space = ColorSpace::HSV;
};

/// First row of the robustly weighted joint tensor.
struct JointTensor {
  Image j11;
  Image j12;
};

/// Evaluates the lagged data-term weights at the displacement `increment`.
/// RGB penalizes the channel sum jointly; HSV penalizes each channel separately.
inline JointTensor joint_tensor(const TensorField& tf, const Image& increment, const DataTermParams& p) {
  if (p.gamma < 0.0) throw ContractError("joint_tensor: gamma must be non-negative");
  require_same_shape(increment, tf.view_count, "joint_tensor");
  const int w = tf.width();
  const int h = tf.height();
  JointTensor out{Image(w, h), Image(w, h)};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double u = increment(x, y);
      double j11 = 0.0;
      double j12 = 0.0;
      if (p.color_space == ColorSpace::RGB) {
        MotionTensor2 sg;
        MotionTensor2 sG;
        for (std::size_t c = 0; c < 3; ++c) {
          const auto& a = tf.intensity[c](x, y);
          const auto& b = tf.gradient[c](x, y);
          sg.j11 += a.j11, sg.j12 += a.j12, sg.j22 += a.j22;
          sG.j11 += b.j11, sG.j12 += b.j12, sG.j22 += b.j22;
        }
        const double wg = robust_derivative(sg.quadratic(u), p.epsilon_g);
        const double wG = p.gamma * robust_derivative(sG.quadratic(u), p.epsilon_G);
        j11 = wg * sg.j11 + wG * sG.j11;
        j12 = wg * sg.j12 + wG * sG.j12;
      } else {
        for (std::size_t c = 0; c < 3; ++c) {
          const auto& a = tf.intensity[c](x, y);
          const auto& b = tf.gradient[c](x, y);
          const double wg = robust_derivative(a.quadratic(u), p.epsilon_g);
          const double wG = p.gamma * robust_derivative(b.quadratic(u), p.epsilon_G);
          j11 += wg * a.j11 + wG * b.j11;
          j12 += wg * a.j12 + wG * b.j12;
        }
      }
      out.j11(x, y) = j11;
      out.j12(x, y) = j12;
    }
  }
  return out;
}

}  // namespace lumen
