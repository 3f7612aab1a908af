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

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lumen/core.hpp"
#include "lumen/postproc.hpp"
#include "lumen/resample.hpp"
#include "lumen/solver.hpp"
#include "lumen/tensor.hpp"

namespace lumen {

/// Smallest side a pyramid level may have.
inline constexpr int kMinLevelSize = 8;

struct PipelineConfig {
  double gamma = 0.0;
  double sigma = 0.5;
  double eta = 0.8;
  int levels = 11;
  ColorSpace color_space = ColorSpace::HSV;
  /// Carries the smoothness weight alpha.
  SolverConfig solver;
  bool postproc_enabled = false;
  GuidedMedianConfig postproc;
  int threads = 1;

  void validate() const {
    solver.validate();
    if (!(gamma >= 0.0)) throw ContractError("pipeline: gamma must be non-negative");
    if (!(sigma >= 0.0)) throw ContractError("pipeline: sigma must be non-negative");
    if (!(eta > 0.0 && eta < 1.0)) throw ContractError("pipeline: eta must lie in (0,1)");
    if (levels < 0) throw ContractError("pipeline: levels must be non-negative");
    if (postproc_enabled) postproc.validate();
  }
};

struct PyramidLevel {
  LightField lf;
  int width = 0;
  int height = 0;
  /// Horizontal size ratio to the next finer level (1 at level 0).
  double scale_to_next = 1.0;
};

struct Pyramid {
  std::vector<PyramidLevel> levels;
  std::vector<std::string> warnings;
};

/// Spatial size of level i: round(eta^i * N).
inline int level_extent(int n, double eta, int level) {
  return static_cast<int>(std::lround(std::pow(eta, level) * n));
}

/// Largest level count not exceeding `requested` that keeps eta^l * min(w,h) >= kMinLevelSize.
inline int usable_levels(int width, int height, double eta, int requested) {
  const double min_dim = std::min(width, height);
  int l = requested;
  while (l > 0 && std::pow(eta, l) * min_dim < kMinLevelSize) --l;
  return l;
}

namespace detail {

inline LightField map_views(const LightField& lf, int threads, auto&& fn) {
  std::vector<View> views(lf.views().size());
  const auto idx = lf.valid_views();
  parallel_for(idx.size(), threads, [&](std::size_t k) {
    const View& src = lf.view(idx[k]);
    View dst;
    for (std::size_t c = 0; c < 3; ++c) dst[c] = fn(src[c]);
    views[lf.slot(idx[k])] = std::move(dst);
  });
  return lf.with_views(std::move(views));
}

}  // namespace detail

/// Color conversion and presmoothing at full resolution, then a cascade of
/// anti-aliased bicubic reductions down to the coarsest level.
inline Pyramid build_pyramid(const LightField& lf, const PipelineConfig& cfg) {
  cfg.validate();
  Pyramid pyr;
  const int w = lf.width();
  const int h = lf.height();
  const int levels = usable_levels(w, h, cfg.eta, cfg.levels);
  if (levels < cfg.levels) {
    pyr.warnings.push_back("requested " + std::to_string(cfg.levels) + " levels but " + std::to_string(w) + "x" +
                           std::to_string(h) + " supports only " + std::to_string(levels) + " at eta=" +
                           std::to_string(cfg.eta) + "; clamped");
  }
  const LightField converted = to_color_space(lf, cfg.color_space);
  LightField base = detail::map_views(converted, cfg.threads, [&](const Image& ch) { return gaussian_smooth(ch, cfg.sigma); });
  pyr.levels.push_back({std::move(base), w, h, 1.0});
  for (int i = 1; i <= levels; ++i) {
    const PyramidLevel& finer = pyr.levels.back();
    const int lw = level_extent(w, cfg.eta, i);
    const int lh = level_extent(h, cfg.eta, i);
    LightField coarse = detail::map_views(finer.lf, cfg.threads,
                                          [&](const Image& ch) { return rescale(ch, lw, lh, cfg.sigma); });
    const double ratio = static_cast<double>(finer.width) / lw;
    pyr.levels.push_back({std::move(coarse), lw, lh, ratio});
  }
  return pyr;
}

/// Optional ground truth used only to fill LevelRecord::error.
struct GroundTruthProbe {
  const DisparityField* ground_truth = nullptr;
  /// Border excluded from the error, in full-resolution pixels.
  int margin = 0;
};

struct LevelRecord {
  int level = 0;
  int width = 0;
  int height = 0;
  int sweeps = 0;
  int lag_steps = 0;
  double residual = 0.0;
  double mean_abs_increment = 0.0;
  /// Mean absolute error in full-resolution disparity units; NaN without ground truth.
  double error = std::numeric_limits<double>::quiet_NaN();
};

struct EstimateResult {
  DisparityField omega;
  /// Full-resolution estimate before post-processing.
  DisparityField raw;
  std::optional<OcclusionMask> occlusion;
  std::vector<LevelRecord> levels;  // coarsest first
  std::vector<std::string> warnings;
  int effective_levels = 0;
};

/// Mean |a - b| over pixels at least `margin` away from every border.
inline double interior_mae(const Image& a, const Image& b, int margin) {
  require_same_shape(a, b, "interior_mae");
  double sum = 0.0;
  std::size_t n = 0;
  for (int y = margin; y < a.height() - margin; ++y)
    for (int x = margin; x < a.width() - margin; ++x) sum += std::abs(a(x, y) - b(x, y)), ++n;
  return n ? sum / static_cast<double>(n) : 0.0;
}

/// Coarse-to-fine warping estimate of the central-view disparity.
inline EstimateResult estimate(const LightField& lf, const PipelineConfig& cfg, GroundTruthProbe probe = {}) {
  const Pyramid pyr = build_pyramid(lf, cfg);
  EstimateResult out;
  out.warnings = pyr.warnings;
  const int top = static_cast<int>(pyr.levels.size()) - 1;
  out.effective_levels = top;
  const DataTermParams data{cfg.gamma, cfg.solver.epsilon_g, cfg.solver.epsilon_G, cfg.color_space};
  const int full_w = pyr.levels.front().width;

  DisparityField omega(pyr.levels[static_cast<std::size_t>(top)].width,
                       pyr.levels[static_cast<std::size_t>(top)].height, 0.0);
  for (int i = top; i >= 0; --i) {
    const PyramidLevel& level = pyr.levels[static_cast<std::size_t>(i)];
    DisparityField omega_hat;
    if (i == top) {
      omega_hat = omega;
    } else {
      omega_hat = upscale_disparity(omega, level.width, level.height);
      const double ratio = pyr.levels[static_cast<std::size_t>(i) + 1].scale_to_next;
      for (double& v : omega_hat.values()) v *= ratio;
    }
    const WarpedLightField warped = warp_lightfield(level.lf, omega_hat, cfg.threads);
    const TensorField tf = accumulate_tensors(warped.lf, warped.validity, cfg.threads);
    SolveResult sol = solve_increment(tf, omega_hat, level.lf.center_view(), cfg.solver, data);

    LevelRecord rec;
    rec.level = i;
    rec.width = level.width;
    rec.height = level.height;
    rec.sweeps = sol.sweeps;
    rec.lag_steps = sol.lag_steps;
    rec.residual = sol.residual;
    double inc = 0.0;
    for (std::size_t k = 0; k < omega_hat.size(); ++k) inc += std::abs(sol.omega.values()[k] - omega_hat.values()[k]);
    rec.mean_abs_increment = inc / static_cast<double>(omega_hat.size());
    if (probe.ground_truth) {
      const double to_full = static_cast<double>(full_w) / level.width;
      const Image gt = rescale(*probe.ground_truth, level.width, level.height, 0.0);
      Image scaled = sol.omega;
      for (double& v : scaled.values()) v *= to_full;
      const int margin = static_cast<int>(std::ceil(probe.margin / to_full));
      rec.error = interior_mae(scaled, gt, margin);
    }
    out.levels.push_back(rec);
    omega = std::move(sol.omega);
  }

  out.raw = omega;
  if (cfg.postproc_enabled) {
    OcclusionMask mask = detect_occlusion(omega, cfg.postproc);
    out.omega = guided_median(omega, mask, lf.center_view(), cfg.postproc);
    out.occlusion = std::move(mask);
  } else {
    out.omega = std::move(omega);
  }
  return out;
}

}  // namespace lumen
