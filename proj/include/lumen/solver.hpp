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
#include <string>

#include "lumen/core.hpp"
#include "lumen/grid.hpp"
#include "lumen/tensor.hpp"

namespace lumen {

enum class Penalizer { TV_L1, TV_L2, IMAGE_DRIVEN };

inline const char* to_string(Penalizer p) {
  switch (p) {
    case Penalizer::TV_L1: return "tvl1";
    case Penalizer::TV_L2: return "tvl2";
    case Penalizer::IMAGE_DRIVEN: return "image";
  }
  return "?";
}

struct SolverConfig {
  double alpha = 1.0;
  int inner_iterations = 10;
  int lag_steps = 10;
  double sor_omega = 1.88;
  double epsilon_s = 1e-6;
  double epsilon_g = 1e-6;
  double epsilon_G = 1e-6;
  Penalizer penalizer = Penalizer::TV_L1;
  double residual_tol = 1e-6;

  void validate() const {
    if (!(alpha > 0.0)) throw ContractError("solver: alpha must be positive");
    if (inner_iterations < 1 || lag_steps < 1) throw ContractError("solver: iteration counts must be positive");
    if (!(sor_omega > 0.0 && sor_omega < 2.0)) throw ContractError("solver: SOR factor must lie in (0,2)");
    if (!(epsilon_s > 0.0 && epsilon_g > 0.0 && epsilon_G > 0.0)) throw ContractError("solver: epsilons must be positive");
  }
};

/// Per-pixel diffusivity of the smoothness term, frozen for one lag step.
///   TV_L1:        1 / (2 sqrt(|grad w|^2 + eps))   (central differences on w)
///   TV_L2:        1
///   IMAGE_DRIVEN: 1 / sqrt(|grad I|^2 + eps)       (I = central view, channels summed)
inline Image smoothness_weight(const Image& omega, const View& center_view, Penalizer penalizer, double epsilon_s) {
  const int w = omega.width();
  const int h = omega.height();
  Image out(w, h, 1.0);
  switch (penalizer) {
    case Penalizer::TV_L2:
      break;
    case Penalizer::TV_L1:
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const double gx = 0.5 * (omega.mirrored(x + 1, y) - omega.mirrored(x - 1, y));
          const double gy = 0.5 * (omega.mirrored(x, y + 1) - omega.mirrored(x, y - 1));
          out(x, y) = 0.5 / std::sqrt(gx * gx + gy * gy + epsilon_s);
        }
      }
      break;
    case Penalizer::IMAGE_DRIVEN: {
      if (center_view.width() != w || center_view.height() != h) {
        throw ContractError("smoothness_weight: guide view does not match disparity field");
      }
      Image mag(w, h, 0.0);
      for (std::size_t c = 0; c < 3; ++c) {
        const Gradient g = spatial_gradient(center_view[c]);
        for (std::size_t i = 0; i < mag.size(); ++i) {
          mag.values()[i] += g.gx.values()[i] * g.gx.values()[i] + g.gy.values()[i] * g.gy.values()[i];
        }
      }
      for (std::size_t i = 0; i < mag.size(); ++i) out.values()[i] = 1.0 / std::sqrt(mag.values()[i] + epsilon_s);
      break;
    }
  }
  return out;
}

/// One frozen-coefficient linear system
///   diag * w + rhs - alpha * sum_nb (D_nb + D_c)/2 * (w_nb - w) = 0
/// on the 4-neighborhood with no-flux borders (missing neighbors dropped).
struct LaggedSystem {
  Image diag;
  Image rhs;
  Image diffusivity;
  double alpha = 1.0;

  [[nodiscard]] int width() const noexcept { return diag.width(); }
  [[nodiscard]] int height() const noexcept { return diag.height(); }

  void validate(const Image& omega) const {
    require_same_shape(diag, omega, "lagged system diag");
    require_same_shape(rhs, omega, "lagged system rhs");
    require_same_shape(diffusivity, omega, "lagged system diffusivity");
  }
};

namespace detail {

template <typename Fn>
inline void for_each_neighbor(int x, int y, int w, int h, Fn&& fn) {
  if (x > 0) fn(x - 1, y);
  if (x + 1 < w) fn(x + 1, y);
  if (y > 0) fn(x, y - 1);
  if (y + 1 < h) fn(x, y + 1);
}

}  // namespace detail

/// Pixels whose diagonal falls below this are skipped for the sweep.
inline constexpr double kDegenerateDiagonal = 1e-12;

/// One forward lexicographic SOR sweep, in place.
inline void gauss_seidel_sweep(Image& omega, const LaggedSystem& sys, double sor_omega) {
  sys.validate(omega);
  const int w = omega.width();
  const int h = omega.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dc = sys.diffusivity(x, y);
      double weight_sum = 0.0;
      double neighbor_sum = 0.0;
      detail::for_each_neighbor(x, y, w, h, [&](int nx, int ny) {
        const double wt = 0.5 * (sys.diffusivity(nx, ny) + dc);
        weight_sum += wt;
        neighbor_sum += wt * omega(nx, ny);
      });
      const double denom = sys.diag(x, y) + sys.alpha * weight_sum;
      if (denom < kDegenerateDiagonal) continue;
      const double gs = (-sys.rhs(x, y) + sys.alpha * neighbor_sum) / denom;
      omega(x, y) = (1.0 - sor_omega) * omega(x, y) + sor_omega * gs;
    }
  }
}

/// Convenience overload matching the solver's per-level inputs.
inline void gauss_seidel_sweep(Image& omega, const Image& jbar11, const Image& jbar12, const Image& diffusivity,
                               double alpha, double sor_omega) {
  gauss_seidel_sweep(omega, LaggedSystem{jbar11, jbar12, diffusivity, alpha}, sor_omega);
}

/// Pointwise residual of the lagged system at omega.
inline Image lagged_residual(const Image& omega, const LaggedSystem& sys) {
  sys.validate(omega);
  const int w = omega.width();
  const int h = omega.height();
  Image r(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dc = sys.diffusivity(x, y);
      double flux = 0.0;
      detail::for_each_neighbor(x, y, w, h, [&](int nx, int ny) {
        flux += 0.5 * (sys.diffusivity(nx, ny) + dc) * (omega(nx, ny) - omega(x, y));
      });
      r(x, y) = sys.diag(x, y) * omega(x, y) + sys.rhs(x, y) - sys.alpha * flux;
    }
  }
  return r;
}

inline double max_abs(const Image& g) {
  double m = 0.0;
  for (double v : g.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Quadratic energy whose gradient is lagged_residual: minimized by the fixed point.
inline double lagged_energy(const Image& omega, const LaggedSystem& sys) {
  sys.validate(omega);
  const int w = omega.width();
  const int h = omega.height();
  double e = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = omega(x, y);
      e += 0.5 * sys.diag(x, y) * v * v + sys.rhs(x, y) * v;
      if (x + 1 < w) {
        const double d = omega(x + 1, y) - v;
        e += 0.5 * sys.alpha * 0.5 * (sys.diffusivity(x + 1, y) + sys.diffusivity(x, y)) * d * d;
      }
      if (y + 1 < h) {
        const double d = omega(x, y + 1) - v;
        e += 0.5 * sys.alpha * 0.5 * (sys.diffusivity(x, y + 1) + sys.diffusivity(x, y)) * d * d;
      }
    }
  }
  return e;
}

struct SolveResult {
  DisparityField omega;
  /// Coefficients of the last lag step; omega approximately solves this system.
  LaggedSystem final_system;
  double residual = 0.0;
  int sweeps = 0;
  int lag_steps = 0;
  bool converged = false;
};

/// Solves for the total displacement at one pyramid level. The tensors were
/// built on views warped by omega_hat, so the data term acts on the increment
/// (omega - omega_hat) while the smoothness term acts on omega itself.
inline SolveResult solve_increment(const TensorField& tf, const DisparityField& omega_hat, const View& center_view,
                                   const SolverConfig& cfg, const DataTermParams& data) {
  cfg.validate();
  require_same_shape(omega_hat, tf.view_count, "solve_increment");
  SolveResult res;
  res.omega = omega_hat;
  Image increment(omega_hat.width(), omega_hat.height(), 0.0);
  for (int lag = 0; lag < cfg.lag_steps && !res.converged; ++lag) {
    for (std::size_t i = 0; i < increment.size(); ++i) {
      increment.values()[i] = res.omega.values()[i] - omega_hat.values()[i];
    }
    JointTensor jt = joint_tensor(tf, increment, data);
    LaggedSystem sys;
    sys.alpha = cfg.alpha;
    sys.rhs = std::move(jt.j12);
    for (std::size_t i = 0; i < sys.rhs.size(); ++i) sys.rhs.values()[i] -= jt.j11.values()[i] * omega_hat.values()[i];
    sys.diag = std::move(jt.j11);
    sys.diffusivity = smoothness_weight(res.omega, center_view, cfg.penalizer, cfg.epsilon_s);
    for (int it = 0; it < cfg.inner_iterations; ++it) {
      gauss_seidel_sweep(res.omega, sys, cfg.sor_omega);
      ++res.sweeps;
      res.residual = max_abs(lagged_residual(res.omega, sys));
      if (res.residual < cfg.residual_tol) {
        res.converged = true;
        break;
      }
    }
    res.final_system = std::move(sys);
    res.lag_steps = lag + 1;
    for (int y = 0; y < res.omega.height(); ++y) {
      for (int x = 0; x < res.omega.width(); ++x) {
        if (!std::isfinite(res.omega(x, y))) {
          throw NumericalError("non-finite disparity at pixel (" + std::to_string(x) + "," + std::to_string(y) + ")",
                               x, y);
        }
      }
    }
  }
  return res;
}

}  // namespace lumen
